#pragma once

#include <functional>

#include "znl/model.hpp"
#include "znl/types.hpp"

namespace znl {

// Default finite-difference steps, scaled with |x|.
double fd_step_jacobian(const Vec& x);  // 1e-5 * (1 + |x|)
double fd_step_hessian(const Vec& x);   // 1e-4 * (1 + |x|)

// Central-difference Jacobian of a vector field; entry (i, j) =
// (f_i(x + h e_j) - f_i(x - h e_j)) / (2h). h <= 0 selects the default step.
Mat jacobian_fd(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 0.0);

// Central-difference gradient and Hessian of a scalar field.
Vec gradient_fd(const std::function<double(const Vec&)>& f, const Vec& x, double h = 0.0);
Mat hessian_fd(const std::function<double(const Vec&)>& f, const Vec& x, double h = 0.0);

// Jacobian of the model drift: analytic when provided, finite differences otherwise.
Mat drift_jacobian(const ModelSpec& model, const Vec& x);

// Converts a Stratonovich model to Ito form by filling ito_correction with
// (1/2) Sum_j D sigma_{. j} sigma_{. j} (applied at integration time scaled
// by eps^2). Requires diffusion_jacobian.
ModelSpec stratonovich_to_ito(const ModelSpec& model);

}  // namespace znl
