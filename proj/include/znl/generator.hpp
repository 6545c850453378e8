#pragma once

#include <functional>
#include <vector>

#include "znl/model.hpp"
#include "znl/rng.hpp"
#include "znl/types.hpp"

namespace znl {

// A nonnegative C^2 candidate function with gradient and Hessian access.
struct LyapunovSpec {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;

    // Fills gradient/hessian with central finite differences (step 1e-4 (1+|x|)).
    static LyapunovSpec from_value(std::function<double(const Vec&)> value);
    // Largest relative mismatch of gradient/hessian against finite differences
    // over the given sample points.
    double cross_check(const std::vector<Vec>& points) const;
};

// L^eps V(x) = <grad V, b_eff> + (eps^2/2) sum a_ij d2V_ij
//            + sum_j w_j (V(x + eps F(x,y_j)) - V(x) - <grad V, eps F(x,y_j)>).
// The jump term is exact summation over the finite atom catalogue.
double generator_apply(const LyapunovSpec& V, const ModelSpec& model, double epsilon, const Vec& x);

struct ShellRow {
    double radius = 0.0;
    double inf_v = 0.0;    // min of V over sphere samples at |x| = R
    double sup_lv = 0.0;   // max of L^eps V over shells |x| in {R, 1.5R, 2R}
    double a_r = 0.0;      // -sup_lv
};

struct LyapunovScan {
    std::vector<ShellRow> rows;
    bool inf_v_increasing = false;
    bool a_r_increasing = false;
    bool violation = false;  // sup L^eps V > 0 at the largest radius, or inf V not positive
};

// Samples spheres |x| = R (normalized Gaussian directions) to collect
// monotonicity evidence for the drift conditions. Diagnostic only; the sup
// over |x| > R is approximated by shells at R, 1.5R and 2R.
LyapunovScan lyapunov_scan(const LyapunovSpec& V, const ModelSpec& model, double epsilon,
                           const std::vector<double>& radii, int samples_per_shell, RngStream& stream);

struct GrowthReport {
    double c1 = 0.0;  // min over samples of -<b(x), x> / |x|^q
    double c2 = 0.0;  // max over samples of (0.5 |sigma|_F^2 + sum |F|^2 w) / |x|^q
    bool pass = false;
};

GrowthReport polynomial_growth_check(const ModelSpec& model, double q, const std::vector<double>& radii,
                                     int samples_per_shell, RngStream& stream);

struct HopfieldCondition {
    double gamma = 0.0;
    double threshold = 0.0;
    bool satisfied = false;
};

// Dissipativity threshold for the delayed Hopfield model:
//   gamma(kappa) = 9 [ (2 sqrt(kappa) - 1) / (sqrt(kappa) - 1)^2 + 1 ],
//   threshold    = gamma^2 e^{6 tau} (16 L^3 |A|^3)^2 / (1 - kappa e^{-3 tau})^2,
// satisfied iff b_min > threshold. Requires kappa in (1, e^{3 tau}).
HopfieldCondition hopfield_condition(double b_min, double tau, double kappa, double lipschitz_g,
                                     double a_norm);

// Uniform point on the sphere |x| = radius via a normalized Gaussian vector.
Vec sphere_sample(RngStream& stream, int dim, double radius);

}  // namespace znl
