#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "znl/types.hpp"

namespace znl {

// One atom of the finite-activity jump intensity measure: mark y and rate w.
struct JumpAtom {
    Vec mark;
    double rate = 0.0;
};

struct JumpCatalogue {
    int mark_dim = 0;
    std::vector<JumpAtom> atoms;
    double truncation_radius = 1.0;  // all atoms satisfy |mark| < truncation_radius
    std::function<Vec(const Vec&, const Vec&)> jump_map;  // F(x, y)

    double total_rate() const;
    // Sum_j w_j F(x, y_j); subtracted as the compensator drift.
    Vec compensator(const Vec& x, int dim) const;
    void validate(int dim) const;
};

enum class NoiseKind { Ito, Stratonovich };

// A finite-dimensional stochastic evolution system
//   dX = b(X) dt + eps sigma(X) dW + eps * jump terms.
// The noise intensity eps is a simulation parameter, never stored here.
struct ModelSpec {
    int dim = 0;           // m
    int brownian_dim = 0;  // k
    std::function<Vec(const Vec&)> drift;           // b : R^m -> R^m
    std::function<Mat(const Vec&)> diffusion;       // sigma : R^m -> R^{m x k}
    std::optional<JumpCatalogue> jumps;
    NoiseKind noise_kind = NoiseKind::Ito;

    // Optional analytic derivatives. drift_jacobian(x) is m x m.
    // diffusion_jacobian(x)[j](i, l) = d sigma_{ij} / d x_l (one m x m matrix per column).
    std::function<Mat(const Vec&)> drift_jacobian;
    std::function<std::vector<Mat>(const Vec&)> diffusion_jacobian;

    // Stratonovich correction per unit eps^2: the effective Ito drift at
    // intensity eps is b(x) + eps^2 * ito_correction(x). Filled in by
    // stratonovich_to_ito or precomputed for zoo models.
    std::function<Vec(const Vec&)> ito_correction;

    std::string label;

    bool has_jumps() const { return jumps.has_value() && !jumps->atoms.empty(); }
    // b(x) + eps^2 * correction; the drift actually integrated at intensity eps.
    Vec effective_drift(const Vec& x, double epsilon) const;
};

// Evaluates b(x) with dimension and finiteness checks.
Vec eval_drift(const ModelSpec& model, const Vec& x);

// Evaluates sigma(x) with shape and finiteness checks.
Mat eval_diffusion(const ModelSpec& model, const Vec& x);

struct JumpEvent {
    double time = 0.0;
    int atom = 0;
    Vec mark;
};

struct NoiseRecord {
    double epsilon = 0.0;
    std::vector<Vec> brownian;                 // per-step increments, k-dim
    std::vector<std::vector<JumpEvent>> jumps; // events applied in each step
};

// A simulated trajectory; states[i] is the state at times[i].
struct PathSample {
    std::vector<double> times;
    std::vector<Vec> states;
    std::optional<NoiseRecord> noise;

    const Vec& last() const { return states.back(); }
    std::size_t size() const { return states.size(); }
};

}  // namespace znl
