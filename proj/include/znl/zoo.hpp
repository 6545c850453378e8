#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/rng.hpp"
#include "znl/sfde.hpp"
#include "znl/types.hpp"

namespace znl::zoo {

// Ornstein-Uhlenbeck sanity fixture: b = -x, sigma = I.
struct OuParams {
    int dim = 1;
};

// Planar system with an attracting unit cycle and unstable focus at O:
//   xdot = x - y - x (x^2 + y^2),  ydot = x + y - y (x^2 + y^2),
// diffusion (x^2 + y^2) I_2.
struct LimitCycleParams {};

// Gradient-plus-rotation field whose omega-limit sets trace the Bernoulli
// lemniscate (x^2 + y^2)^2 = 4 (x^2 - y^2); saddle at O, unstable foci at
// (+-sqrt(2), 0). Diffusion defaults to the identity.
struct LemniscateParams {};

// Three-species competitive system, one shared Stratonovich Brownian factor:
//   dy_i = y_i (1 - y_i - beta y_{i+1} - gamma y_{i+2}) dt + eps y_i o dW.
struct MayLeonardParams {
    double beta = 1.2;
    double gamma = 0.9;
};

// Scalar logistic equation dg = g (1 - g) dt + eps g o dW.
struct LogisticParams {};

// Monotone cyclic feedback system xdot_i = -b_i x_i + f_i(x_{i+1 mod n})
// with bounded sigmoid nonlinearities f_i(s) = tanh(gain_i s), the last one
// multiplied by delta in {-1, +1}. Additive identity diffusion.
struct GoodwinParams {
    std::vector<double> decay;  // b_i > 0
    std::vector<double> gain;   // > 0
    int delta = -1;
    int dim() const { return static_cast<int>(decay.size()); }
};

// Method-of-lines discretization of u_t = u_xx + lambda^2 u (1 - u^3 term)
// on (0,1) with Dirichlet ends, n_grid interior nodes, independent Brownian
// per node scaled by 1/sqrt(h).
struct ChafeeInfanteParams {
    double lambda = 4.0;
    int n_grid = 64;
    double grid_h() const { return 1.0 / (n_grid + 1); }
};

// Delayed Hopfield network dx = [-B x(t) + A g(x(t - tau))] dt + eps sigma dW
// with g_i(s) = g_scale tanh(s + g_shift) and constant identity diffusion.
struct HopfieldParams {
    Vec decay_diag;   // diagonal of B
    Mat coupling;     // A
    double tau = 1.0;
    double g_scale = 0.2;
    double g_shift = 1.0;

    static HopfieldParams defaults();
    double b_min() const { return decay_diag.minCoeff(); }
    double coupling_norm() const;  // operator norm |A|
    double lipschitz_g() const { return g_scale; }
};

using ZooSelection = std::variant<OuParams, LimitCycleParams, LemniscateParams, MayLeonardParams,
                                  LogisticParams, GoodwinParams, ChafeeInfanteParams, HopfieldParams>;

ModelSpec build(const OuParams& p);
ModelSpec build(const LimitCycleParams& p);
ModelSpec build(const LemniscateParams& p);
ModelSpec build(const MayLeonardParams& p);
ModelSpec build(const LogisticParams& p);
ModelSpec build(const GoodwinParams& p);
ModelSpec build(const ChafeeInfanteParams& p);
DelayModel build(const HopfieldParams& p);

struct BuiltModel {
    std::optional<ModelSpec> ode;
    std::optional<DelayModel> delay;
    Vec default_x0;
    std::string name;
};

BuiltModel build(const ZooSelection& selection);
Vec default_x0(const ZooSelection& selection);
std::string selection_name(const ZooSelection& selection);

// Lemniscate helpers shared with tests: the invariant polynomial
// I(x,y) = (x^2+y^2)^2 - 4 (x^2-y^2) and the equilibria.
double lemniscate_invariant(const Vec& x);
std::vector<Vec> lemniscate_equilibria();

// May-Leonard equilibria: O, axial R1..R3, interior P, and the planar R_ij
// when (1-beta)(1-beta gamma) > 0 and (1-gamma)(1-beta gamma) > 0.
std::vector<std::pair<std::string, Vec>> may_leonard_equilibria(const MayLeonardParams& p);

// Replaces the diffusion by s(|x|) M where s is the quintic smoothstep in
// |x| between r and r+1: exactly 0 on B_r(O) and exactly M outside B_{r+1}(O).
ModelSpec cutoff_diffusion(const ModelSpec& model, double r, const Mat& M);

struct DecompositionResult {
    double sup_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Checks the pathwise identity X(t) = g(t) Phi0(int_0^t g ds, y/g0) between
// the May-Leonard diffusion and the rescaled deterministic flow on a shared
// Brownian path. g comes from the scalar logistic equation; the time-change
// integral uses trapezoidal accumulation and Phi0 is interpolated from an
// RK4 trajectory on the same step size. At eps = 0 both sides reduce to the
// deterministic flow.
DecompositionResult decomposition_check(const MayLeonardParams& p, double g0, const Vec& y,
                                        const SimParams& params, RngStream& stream,
                                        double tolerance = 1e-6);
// Same check with externally supplied scalar Brownian increments (for coupled
// step-size studies). dw must hold n_steps entries when epsilon != 0.
DecompositionResult decomposition_check_given(const MayLeonardParams& p, double g0, const Vec& y,
                                              double epsilon, double dt, std::size_t n_steps,
                                              const std::vector<double>& dw, double tolerance = 1e-6);

}  // namespace znl::zoo
