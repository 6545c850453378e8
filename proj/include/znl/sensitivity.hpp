#pragma once

#include <cstdint>
#include <functional>

#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/types.hpp"

namespace znl::sensitivity {

// Tangent trajectory eta_t = D_x X(t, x) h along a recorded base path.
struct VariationalPath {
    std::vector<double> times;
    std::vector<Vec> eta;
    Vec direction;  // h
};

// Euler recursion eta <- eta + Db(X) eta dt + eps sum_j (D sigma_col_j(X) eta) dW_j,
// reusing the increments recorded on the base path. Diffusion-only: models
// with a jump catalogue are rejected.
VariationalPath variational_path(const ModelSpec& model, const PathSample& base, const Vec& h);

struct GradientEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

// Monte-Carlo gradient D_x E phi(X_t) h via the stochastic-integral weight
//   (1/t) E[ phi(X_t) int_0^t < sigma_eff^T (sigma_eff sigma_eff^T)^{-1} eta_s, dW_s > ]
// with sigma_eff = eps sigma. The per-step system solve guards the condition
// number of sigma sigma^T (DegenerateDiffusion above 1e8).
GradientEstimate bel_gradient(const ModelSpec& model, const std::function<double(const Vec&)>& phi,
                              double t, const Vec& x, const Vec& h, std::size_t n_paths,
                              const SimParams& params, std::uint64_t master_seed, int threads = 0);

// Central-difference oracle (E phi(X_t^{x + delta h}) - E phi(X_t^{x - delta h})) / (2 delta)
// with common random numbers: both shifted paths replay the same stream.
GradientEstimate fd_gradient(const ModelSpec& model, const std::function<double(const Vec&)>& phi,
                             double t, const Vec& x, const Vec& h, double delta, std::size_t n_paths,
                             const SimParams& params, std::uint64_t master_seed, int threads = 0);

}  // namespace znl::sensitivity
