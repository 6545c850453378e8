#pragma once

#include <complex>
#include <string>
#include <vector>

#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/types.hpp"
#include "znl/zoo.hpp"

namespace znl::dynamics {

enum class Classification { stable, saddle, unstable_focus, unstable_node, center_unknown };
const char* classification_name(Classification c);

struct LabeledPoint {
    Vec x;
    std::string label;
    Classification cls = Classification::center_unknown;
    std::vector<std::complex<double>> eigenvalues;
};

struct SampledOrbit {
    std::string label;
    std::vector<Vec> points;  // ordered along the orbit
    double period = 0.0;
};

// Labeled approximation of the Birkhoff center: equilibria plus sampled
// closed orbits.
struct CandidateSet {
    std::vector<LabeledPoint> points;
    std::vector<SampledOrbit> curves;
    bool empty() const { return points.empty() && curves.empty(); }
    // min over points and curve samples of scale * |x - c|.
    double distance(const Vec& x, double scale = 1.0) const;
    // label of the nearest component ("" when empty).
    std::string nearest_label(const Vec& x) const;
};

struct EquilibriumSearch {
    std::vector<Vec> roots;  // deduplicated, sorted lexicographically
    int dropped = 0;         // seeds that did not converge
};

// Newton iterations on b(x) = 0 from each seed; converged roots deduplicated
// at absolute tolerance 1e-6.
EquilibriumSearch find_equilibria(const ModelSpec& model, const std::vector<Vec>& seeds,
                                  double newton_tol = 1e-10, int max_iter = 60);

// Uniform seed grid over the box [lo, hi], per_dim points per dimension.
std::vector<Vec> seed_grid(const Vec& lo, const Vec& hi, int per_dim);

struct ClassifyResult {
    Classification cls = Classification::center_unknown;
    std::vector<std::complex<double>> eigenvalues;
};

// Eigenvalues of the drift Jacobian at an equilibrium; classification by the
// sign pattern of real parts (near-zero real parts give center_unknown).
ClassifyResult classify_equilibrium(const ModelSpec& model, const Vec& x_star);

enum class OmegaKind { equilibrium, periodic, other };

struct OmegaSample {
    OmegaKind kind = OmegaKind::other;
    std::vector<Vec> samples;
    double period = 0.0;
};

// Integrates the semiflow, discards the burn-in, and inspects the tail:
// equilibrium when the tail diameter is below cluster_eps, periodic when
// nearest returns to the tail start recur with a consistent period.
OmegaSample omega_limit_sample(const ModelSpec& model, const Vec& x0, const SimParams& params,
                               double cluster_eps);

// Analytic candidate sets for zoo models where the source analysis states
// them; numerically discovered (Newton + omega-limit sampling) otherwise.
CandidateSet birkhoff_candidates(const zoo::ZooSelection& selection);

// Generic fallback: equilibria from a seed grid, classified, plus an
// omega-limit probe from the given start.
CandidateSet numeric_candidates(const ModelSpec& model, const Vec& lo, const Vec& hi, int seeds_per_dim,
                                const Vec& probe_x0, const SimParams& probe_params);

}  // namespace znl::dynamics
