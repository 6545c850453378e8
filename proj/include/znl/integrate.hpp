#pragma once

#include <functional>
#include <utility>

#include "znl/model.hpp"
#include "znl/rng.hpp"
#include "znl/types.hpp"

namespace znl {

struct SimParams {
    double dt = 1e-3;
    double t_final = 1.0;
    double burn_in = 0.0;
    double epsilon = 0.0;
    bool record_noise = false;
    double blowup_norm = 1e8;

    void validate() const;
    std::size_t n_steps() const;
};

// Called for every grid state including the initial one (step 0, t = 0).
using StepSink = std::function<void(std::size_t step, double t, const Vec& x)>;

// Deterministic semiflow: classical RK4 on xdot = b(x). epsilon is ignored.
void flow_run(const ModelSpec& model, const Vec& x0, const SimParams& params, const StepSink& sink);
PathSample flow(const ModelSpec& model, const Vec& x0, const SimParams& params);

// Euler-Maruyama jump-diffusion step at intensity eps:
//   x <- x + b_eff(x) dt + eps sigma(x) dW - eps * compensator(x) dt,
// then jump events in (t, t+dt] applied in order: x <- x + eps F(x, y).
// Requires Ito form (convert Stratonovich models first).
void em_run(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream,
            const StepSink& sink, NoiseRecord* record = nullptr);
PathSample em_path(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream);

// (X^eps, X^0) driven by the same noise realization on the same grid.
using PairSink = std::function<void(std::size_t step, double t, const Vec& x_eps, const Vec& x_det)>;
void coupled_run(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream,
                 const PairSink& sink);
std::pair<PathSample, PathSample> coupled_pair(const ModelSpec& model, const Vec& x0,
                                               const SimParams& params, RngStream& stream);

}  // namespace znl
