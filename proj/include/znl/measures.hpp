#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "znl/dynamics.hpp"
#include "znl/empirical.hpp"
#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/sfde.hpp"
#include "znl/types.hpp"

namespace znl::measures {

struct OccupationOptions {
    std::uint64_t master_seed = 0;
    std::size_t n_paths = 1;
    int threads = 0;
    std::optional<GridSpec> grid;   // inferred from a pilot deterministic run if absent
    std::size_t reservoir = 4096;
    std::size_t record_stride = 1;  // keep every k-th grid state
    bool use_grid = true;           // high-dimensional models go reservoir-only
};

// Krylov-Bogoliubov style occupation measure: states X^eps(t), t in
// [burn_in, t_final], pooled across paths with equal weights.
EmpiricalMeasure occupation_estimate(const ModelSpec& model, const Vec& x0, const SimParams& params,
                                     const OccupationOptions& options);

struct SfdeOccupation {
    EmpiricalMeasure marginal;      // law of X(t), the segment evaluated at theta = 0
    double mean_sup_norm = 0.0;     // time-average segment sup-norm
    double mean_sup6_first = 0.0;   // 6th-moment average over [burn, mid]
    double mean_sup6_second = 0.0;  // and over [mid, t_final]
};

SfdeOccupation occupation_estimate_sfde(const DelayModel& model, const SegmentState& phi0,
                                        const SimParams& params, const OccupationOptions& options);

// Fraction of reservoir mass within distance delta of the candidate set;
// distances are scale * |x - c| (scale = sqrt(h) gives the discrete L2 norm
// for method-of-lines states).
double support_mass(const EmpiricalMeasure& measure, const dynamics::CandidateSet& candidates,
                    double delta, double scale = 1.0);

// Same mass split by nearest candidate label.
std::map<std::string, double> support_shares(const EmpiricalMeasure& measure,
                                             const dynamics::CandidateSet& candidates, double delta,
                                             double scale = 1.0);

struct TightnessRow {
    double epsilon = 0.0;
    double radius = 0.0;
    double outside = 0.0;
};

struct TightnessTable {
    std::vector<TightnessRow> rows;
    std::vector<double> sup_outside;  // per radius, sup over epsilon
    bool decreasing = false;          // sup outside-mass nonincreasing in R
    bool pass = false;                // decreasing and largest-R value < tolerance
};

TightnessTable tightness_scan(const std::vector<std::pair<double, const EmpiricalMeasure*>>& measures,
                              const std::vector<double>& radii, double tolerance = 0.01);

struct SweepEntry {
    double epsilon = 0.0;
    double w1_to_previous = 0.0;  // 0 for the first entry
    double support = 0.0;
    std::map<std::string, double> shares;
    double leak = 0.0;
    std::vector<double> outside;  // aligned with SweepOptions::radii
    EmpiricalMeasure measure;
};

struct SweepReport {
    std::string model_label;
    std::uint64_t master_seed = 0;
    double delta = 0.0;
    std::vector<double> radii;
    std::vector<SweepEntry> entries;     // epsilons strictly decreasing
    bool support_trend_ok = false;       // support mass non-decreasing up to slack
    bool w1_cauchy_ok = false;           // consecutive weak distances decreasing up to slack
};

struct SweepOptions {
    OccupationOptions occupation;
    double delta = 0.3;
    double support_scale = 1.0;
    std::vector<double> radii = {2.0, 4.0};
    double trend_slack = 0.03;
    int w1_directions = 32;  // for sliced W1 in dimension >= 2
};

// The eps -> 0 experiment: per-epsilon occupation measures, consecutive weak
// distances, support masses and the tightness table.
SweepReport convergence_sweep(const ModelSpec& model, const Vec& x0, const std::vector<double>& epsilons,
                              const SimParams& params, const dynamics::CandidateSet& candidates,
                              const SweepOptions& options);

}  // namespace znl::measures
