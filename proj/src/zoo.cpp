#include "znl/zoo.hpp"

#include <cmath>

namespace znl::zoo {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) fail(Errc::BadParams, std::string(name) + " must be positive");
}

}  // namespace

ModelSpec build(const OuParams& p) {
    if (p.dim < 1) fail(Errc::BadParams, "ou dim must be >= 1");
    ModelSpec model;
    model.dim = p.dim;
    model.brownian_dim = p.dim;
    model.label = "ou";
    model.drift = [](const Vec& x) { return Vec(-x); };
    const int m = p.dim;
    model.diffusion = [m](const Vec&) { return Mat(Mat::Identity(m, m)); };
    model.drift_jacobian = [m](const Vec&) { return Mat(-Mat::Identity(m, m)); };
    model.diffusion_jacobian = [m](const Vec&) { return std::vector<Mat>(m, Mat::Zero(m, m)); };
    return model;
}

ModelSpec build(const LimitCycleParams&) {
    ModelSpec model;
    model.dim = 2;
    model.brownian_dim = 2;
    model.label = "limit_cycle";
    model.drift = [](const Vec& v) {
        const double x = v[0], y = v[1];
        const double r2 = x * x + y * y;
        Vec b(2);
        b << x - y - x * r2, x + y - y * r2;
        return b;
    };
    model.diffusion = [](const Vec& v) {
        const double r2 = v[0] * v[0] + v[1] * v[1];
        return Mat(r2 * Mat::Identity(2, 2));
    };
    model.drift_jacobian = [](const Vec& v) {
        const double x = v[0], y = v[1];
        Mat jac(2, 2);
        jac << 1.0 - 3.0 * x * x - y * y, -1.0 - 2.0 * x * y,
               1.0 - 2.0 * x * y,          1.0 - x * x - 3.0 * y * y;
        return jac;
    };
    model.diffusion_jacobian = [](const Vec& v) {
        const double x = v[0], y = v[1];
        std::vector<Mat> ds(2, Mat::Zero(2, 2));
        ds[0](0, 0) = 2.0 * x;
        ds[0](0, 1) = 2.0 * y;
        ds[1](1, 0) = 2.0 * x;
        ds[1](1, 1) = 2.0 * y;
        return ds;
    };
    return model;
}

double lemniscate_invariant(const Vec& v) {
    const double x = v[0], y = v[1];
    const double r2 = x * x + y * y;
    return r2 * r2 - 4.0 * (x * x - y * y);
}

std::vector<Vec> lemniscate_equilibria() {
    const double s = std::sqrt(2.0);
    Vec o = Vec::Zero(2);
    Vec pp(2), pm(2);
    pp << s, 0.0;
    pm << -s, 0.0;
    return {pm, o, pp};
}

namespace {

// f(I) = I (I^2 + 4) / (4 (1 + I^2)^{7/4}), g(I) = (I^2 + 4) / (4 (1 + I^2)^{11/8}),
// the derivative factors of the Lyapunov part V(I) and the rotation part H(I).
double lemniscate_f(double i) {
    return i * (i * i + 4.0) / (4.0 * std::pow(1.0 + i * i, 1.75));
}
double lemniscate_g(double i) {
    return (i * i + 4.0) / (4.0 * std::pow(1.0 + i * i, 1.375));
}
double lemniscate_df(double i) {
    const double i2 = i * i;
    return (-0.5 * i2 * i2 - 7.0 * i2 + 4.0) / (4.0 * std::pow(1.0 + i2, 2.75));
}
double lemniscate_dg(double i) {
    const double i2 = i * i;
    return (-0.75 * i2 * i - 9.0 * i) / (4.0 * std::pow(1.0 + i2, 2.375));
}

}  // namespace

ModelSpec build(const LemniscateParams&) {
    ModelSpec model;
    model.dim = 2;
    model.brownian_dim = 2;
    model.label = "lemniscate";
    model.drift = [](const Vec& v) {
        const double x = v[0], y = v[1];
        const double r2 = x * x + y * y;
        const double i = lemniscate_invariant(v);
        const double ix = 4.0 * x * r2 - 8.0 * x;
        const double iy = 4.0 * y * r2 + 8.0 * y;
        const double f = lemniscate_f(i);
        const double g = lemniscate_g(i);
        Vec b(2);
        b << -f * ix - g * iy, -f * iy + g * ix;
        return b;
    };
    model.diffusion = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    model.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>(2, Mat::Zero(2, 2)); };
    model.drift_jacobian = [](const Vec& v) {
        const double x = v[0], y = v[1];
        const double r2 = x * x + y * y;
        const double i = lemniscate_invariant(v);
        const double ix = 4.0 * x * r2 - 8.0 * x;
        const double iy = 4.0 * y * r2 + 8.0 * y;
        const double ixx = 12.0 * x * x + 4.0 * y * y - 8.0;
        const double ixy = 8.0 * x * y;
        const double iyy = 4.0 * x * x + 12.0 * y * y + 8.0;
        const double f = lemniscate_f(i), df = lemniscate_df(i);
        const double g = lemniscate_g(i), dg = lemniscate_dg(i);
        Mat jac(2, 2);
        jac(0, 0) = -df * ix * ix - f * ixx - dg * ix * iy - g * ixy;
        jac(0, 1) = -df * iy * ix - f * ixy - dg * iy * iy - g * iyy;
        jac(1, 0) = -df * ix * iy - f * ixy + dg * ix * ix + g * ixx;
        jac(1, 1) = -df * iy * iy - f * iyy + dg * iy * ix + g * ixy;
        return jac;
    };
    return model;
}

ModelSpec build(const MayLeonardParams& p) {
    check_positive(p.beta, "may_leonard beta");
    check_positive(p.gamma, "may_leonard gamma");
    ModelSpec model;
    model.dim = 3;
    model.brownian_dim = 1;
    model.label = "may_leonard";
    model.noise_kind = NoiseKind::Stratonovich;
    const double beta = p.beta, gamma = p.gamma;
    model.drift = [beta, gamma](const Vec& y) {
        Vec b(3);
        b[0] = y[0] * (1.0 - y[0] - beta * y[1] - gamma * y[2]);
        b[1] = y[1] * (1.0 - y[1] - beta * y[2] - gamma * y[0]);
        b[2] = y[2] * (1.0 - y[2] - beta * y[0] - gamma * y[1]);
        return b;
    };
    model.diffusion = [](const Vec& y) {
        Mat s(3, 1);
        s << y[0], y[1], y[2];
        return s;
    };
    model.drift_jacobian = [beta, gamma](const Vec& y) {
        Mat jac(3, 3);
        jac << 1.0 - 2.0 * y[0] - beta * y[1] - gamma * y[2], -beta * y[0], -gamma * y[0],
               -gamma * y[1], 1.0 - 2.0 * y[1] - beta * y[2] - gamma * y[0], -beta * y[1],
               -beta * y[2], -gamma * y[2], 1.0 - 2.0 * y[2] - beta * y[0] - gamma * y[1];
        return jac;
    };
    model.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>{Mat::Identity(3, 3)}; };
    // Stratonovich correction per unit eps^2: (1/2) D sigma sigma = y / 2.
    model.ito_correction = [](const Vec& y) { return Vec(0.5 * y); };
    return model;
}

ModelSpec build(const LogisticParams&) {
    ModelSpec model;
    model.dim = 1;
    model.brownian_dim = 1;
    model.label = "logistic";
    model.noise_kind = NoiseKind::Stratonovich;
    model.drift = [](const Vec& g) {
        Vec b(1);
        b[0] = g[0] * (1.0 - g[0]);
        return b;
    };
    model.diffusion = [](const Vec& g) {
        Mat s(1, 1);
        s(0, 0) = g[0];
        return s;
    };
    model.drift_jacobian = [](const Vec& g) {
        Mat jac(1, 1);
        jac(0, 0) = 1.0 - 2.0 * g[0];
        return jac;
    };
    model.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>{Mat::Identity(1, 1)}; };
    model.ito_correction = [](const Vec& g) { return Vec(0.5 * g); };
    return model;
}

ModelSpec build(const GoodwinParams& p) {
    const int n = p.dim();
    if (n < 1) fail(Errc::BadParams, "goodwin needs at least one component");
    if (p.gain.size() != p.decay.size()) fail(Errc::BadParams, "goodwin decay/gain sizes disagree");
    for (double b : p.decay) check_positive(b, "goodwin decay");
    for (double a : p.gain) check_positive(a, "goodwin gain");
    if (p.delta != 1 && p.delta != -1) fail(Errc::BadParams, "goodwin delta must be +1 or -1");

    ModelSpec model;
    model.dim = n;
    model.brownian_dim = n;
    model.label = "goodwin";
    const std::vector<double> decay = p.decay;
    const std::vector<double> gain = p.gain;
    const double delta = p.delta;
    model.drift = [decay, gain, delta, n](const Vec& x) {
        Vec b(n);
        for (int i = 0; i < n; ++i) {
            const int next = (i + 1) % n;
            const double sign = (i == n - 1) ? delta : 1.0;
            b[i] = -decay[i] * x[i] + sign * std::tanh(gain[i] * x[next]);
        }
        return b;
    };
    model.diffusion = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    model.drift_jacobian = [decay, gain, delta, n](const Vec& x) {
        Mat jac = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const int next = (i + 1) % n;
            const double sign = (i == n - 1) ? delta : 1.0;
            const double th = std::tanh(gain[i] * x[next]);
            jac(i, i) += -decay[i];
            jac(i, next) += sign * gain[i] * (1.0 - th * th);
        }
        return jac;
    };
    model.diffusion_jacobian = [n](const Vec&) { return std::vector<Mat>(n, Mat::Zero(n, n)); };
    return model;
}

ModelSpec build(const ChafeeInfanteParams& p) {
    check_positive(p.lambda, "chafee_infante lambda");
    if (p.n_grid < 8) fail(Errc::BadParams, "chafee_infante n_grid must be >= 8");
    ModelSpec model;
    const int n = p.n_grid;
    const double h = p.grid_h();
    const double inv_h2 = 1.0 / (h * h);
    const double lam2 = p.lambda * p.lambda;
    model.dim = n;
    model.brownian_dim = n;
    model.label = "chafee_infante";
    model.drift = [n, inv_h2, lam2](const Vec& u) {
        Vec b(n);
        for (int i = 0; i < n; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;     // Dirichlet ends
            const double right = i + 1 < n ? u[i + 1] : 0.0;
            b[i] = inv_h2 * (right - 2.0 * u[i] + left) + lam2 * u[i] * (1.0 - u[i] * u[i]);
        }
        return b;
    };
    const double amp = 1.0 / std::sqrt(h);  // space-time white-noise surrogate
    model.diffusion = [n, amp](const Vec&) { return Mat(amp * Mat::Identity(n, n)); };
    model.drift_jacobian = [n, inv_h2, lam2](const Vec& u) {
        Mat jac = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            jac(i, i) = -2.0 * inv_h2 + lam2 * (1.0 - 3.0 * u[i] * u[i]);
            if (i > 0) jac(i, i - 1) = inv_h2;
            if (i + 1 < n) jac(i, i + 1) = inv_h2;
        }
        return jac;
    };
    model.diffusion_jacobian = [n](const Vec&) { return std::vector<Mat>(n, Mat::Zero(n, n)); };
    return model;
}

HopfieldParams HopfieldParams::defaults() {
    HopfieldParams p;
    p.decay_diag = Vec::Ones(2);
    const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
    p.coupling = Mat(2, 2);
    p.coupling << 0.2 * c, -0.2 * s, 0.2 * s, 0.2 * c;
    p.tau = 1.0;
    p.g_scale = 0.2;
    p.g_shift = 1.0;
    return p;
}

double HopfieldParams::coupling_norm() const {
    return coupling.jacobiSvd().singularValues()(0);
}

DelayModel build(const HopfieldParams& p) {
    const int m = static_cast<int>(p.decay_diag.size());
    if (m < 1) fail(Errc::BadParams, "hopfield needs at least one unit");
    if (p.coupling.rows() != m || p.coupling.cols() != m)
        fail(Errc::BadParams, "hopfield coupling matrix shape mismatch");
    for (int i = 0; i < m; ++i) check_positive(p.decay_diag[i], "hopfield decay");
    check_positive(p.tau, "hopfield tau");
    if (p.g_scale < 0.0) fail(Errc::BadParams, "hopfield g_scale must be nonnegative");

    DelayModel model;
    model.decay = p.decay_diag.asDiagonal();
    model.coupling = p.coupling;
    const double scale = p.g_scale, shift = p.g_shift;
    model.g = [scale, shift](const Vec& x) {
        Vec out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = scale * std::tanh(x[i] + shift);
        return out;
    };
    model.sigma = [m](const SegmentState&) { return Mat(Mat::Identity(m, m)); };
    model.brownian_dim = m;
    model.tau = p.tau;
    model.label = "hopfield";
    return model;
}

std::vector<std::pair<std::string, Vec>> may_leonard_equilibria(const MayLeonardParams& p) {
    std::vector<std::pair<std::string, Vec>> eq;
    eq.emplace_back("O", Vec::Zero(3));
    Vec r1(3), r2(3), r3(3);
    r1 << 1, 0, 0;
    r2 << 0, 1, 0;
    r3 << 0, 0, 1;
    eq.emplace_back("R1", r1);
    eq.emplace_back("R2", r2);
    eq.emplace_back("R3", r3);
    eq.emplace_back("P", Vec(Vec::Ones(3) / (1.0 + p.beta + p.gamma)));
    const double bg = 1.0 - p.beta * p.gamma;
    if ((1.0 - p.beta) * bg > 0.0 && (1.0 - p.gamma) * bg > 0.0) {
        Vec r12(3), r23(3), r31(3);
        r12 << (1.0 - p.beta) / bg, (1.0 - p.gamma) / bg, 0.0;
        r23 << 0.0, (1.0 - p.beta) / bg, (1.0 - p.gamma) / bg;
        r31 << (1.0 - p.gamma) / bg, 0.0, (1.0 - p.beta) / bg;
        eq.emplace_back("R12", r12);
        eq.emplace_back("R23", r23);
        eq.emplace_back("R31", r31);
    }
    return eq;
}

BuiltModel build(const ZooSelection& selection) {
    BuiltModel out;
    out.name = selection_name(selection);
    out.default_x0 = default_x0(selection);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HopfieldParams>)
                out.delay = build(p);
            else
                out.ode = build(p);
        },
        selection);
    return out;
}

Vec default_x0(const ZooSelection& selection) {
    return std::visit(
        [](const auto& p) -> Vec {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, OuParams>) {
                return Vec::Ones(p.dim);
            } else if constexpr (std::is_same_v<T, LimitCycleParams>) {
                Vec x(2);
                x << 2.0, 0.0;
                return x;
            } else if constexpr (std::is_same_v<T, LemniscateParams>) {
                Vec x(2);
                x << 3.0, 0.0;
                return x;
            } else if constexpr (std::is_same_v<T, MayLeonardParams>) {
                Vec x(3);
                x << 0.5, 0.25, 0.25;
                return x;
            } else if constexpr (std::is_same_v<T, LogisticParams>) {
                return Vec::Ones(1);
            } else if constexpr (std::is_same_v<T, GoodwinParams>) {
                return Vec(0.5 * Vec::Ones(p.dim()));
            } else if constexpr (std::is_same_v<T, ChafeeInfanteParams>) {
                const int n = p.n_grid;
                Vec x(n);
                for (int i = 0; i < n; ++i)
                    x[i] = 0.5 * std::sin(M_PI * (i + 1) * p.grid_h());
                return x;
            } else {
                return Vec::Zero(p.decay_diag.size());
            }
        },
        selection);
}

std::string selection_name(const ZooSelection& selection) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, OuParams>) return "ou";
            else if constexpr (std::is_same_v<T, LimitCycleParams>) return "limit_cycle";
            else if constexpr (std::is_same_v<T, LemniscateParams>) return "lemniscate";
            else if constexpr (std::is_same_v<T, MayLeonardParams>) return "may_leonard";
            else if constexpr (std::is_same_v<T, LogisticParams>) return "logistic";
            else if constexpr (std::is_same_v<T, GoodwinParams>) return "goodwin";
            else if constexpr (std::is_same_v<T, ChafeeInfanteParams>) return "chafee_infante";
            else return "hopfield";
        },
        selection);
}

ModelSpec cutoff_diffusion(const ModelSpec& model, double r, const Mat& M) {
    check_positive(r, "cutoff radius");
    if (M.rows() != model.dim) fail(Errc::DimensionMismatch, "cutoff matrix row count mismatch");
    ModelSpec out = model;
    out.brownian_dim = static_cast<int>(M.cols());
    out.noise_kind = NoiseKind::Ito;
    out.diffusion_jacobian = nullptr;
    out.ito_correction = nullptr;
    out.label = model.label + "_cutoff";
    out.diffusion = [r, M](const Vec& x) {
        const double u = x.norm();
        if (u <= r) return Mat(Mat::Zero(M.rows(), M.cols()));
        if (u >= r + 1.0) return M;
        const double t = u - r;
        const double s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        return Mat(s * M);
    };
    return out;
}

DecompositionResult decomposition_check(const MayLeonardParams& p, double g0, const Vec& y,
                                        const SimParams& params, RngStream& stream,
                                        double tolerance) {
    params.validate();
    const std::size_t n = params.n_steps();
    std::vector<double> dw;
    if (params.epsilon != 0.0) {
        dw.reserve(n);
        const double sqrt_dt = std::sqrt(params.dt);
        for (std::size_t i = 0; i < n; ++i) dw.push_back(sqrt_dt * stream.normal());
    }
    return decomposition_check_given(p, g0, y, params.epsilon, params.dt, n, dw, tolerance);
}

DecompositionResult decomposition_check_given(const MayLeonardParams& p, double g0, const Vec& y,
                                              double epsilon, double dt, std::size_t n_steps,
                                              const std::vector<double>& dw, double tolerance) {
    check_positive(g0, "g0");
    require_dim(y, 3, "initial state");
    if (!(y.minCoeff() > 0.0)) fail(Errc::BadParams, "initial state must lie in the open positive octant");
    if (epsilon != 0.0 && dw.size() < n_steps)
        fail(Errc::BadParams, "need one Brownian increment per step");

    const ModelSpec ml = build(p);

    // Scalar logistic path and its trapezoidal time-change integral.
    std::vector<double> g(n_steps + 1), s(n_steps + 1);
    g[0] = g0;
    s[0] = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        double gi = g[i];
        double drift = gi * (1.0 - gi) + 0.5 * epsilon * epsilon * gi;
        double gn = gi + dt * drift;
        if (epsilon != 0.0) gn += epsilon * gi * dw[i];
        g[i + 1] = gn;
        s[i + 1] = s[i] + 0.5 * dt * (g[i] + g[i + 1]);
    }

    // Left-hand side: the May-Leonard path itself. At eps = 0 the identity is
    // deterministic, so both sides use the deterministic integrator.
    std::vector<Vec> lhs(n_steps + 1);
    if (epsilon == 0.0) {
        SimParams det;
        det.dt = dt;
        det.t_final = static_cast<double>(n_steps) * dt;
        PathSample path = flow(ml, y, det);
        lhs = std::move(path.states);
    } else {
        lhs[0] = y;
        Vec x = y;
        for (std::size_t i = 0; i < n_steps; ++i) {
            Vec x_new = x + dt * ml.effective_drift(x, epsilon);
            x_new += (epsilon * dw[i]) * ml.diffusion(x).col(0);
            x = std::move(x_new);
            if (!all_finite(x)) fail(Errc::BlowUp, "May-Leonard path blew up");
            lhs[i + 1] = x;
        }
    }

    // Deterministic flow from y/g0 out to the largest rescaled time, linearly
    // interpolated between RK4 grid points.
    double s_max = 0.0;
    for (double v : s) s_max = std::max(s_max, v);
    const std::size_t n_flow = static_cast<std::size_t>(std::ceil(s_max / dt)) + 2;
    SimParams det;
    det.dt = dt;
    det.t_final = static_cast<double>(n_flow) * dt;
    PathSample base = flow(ml, Vec(y / g0), det);
    auto flow_at = [&](double t) -> Vec {
        const double pos = t / dt;
        const std::size_t lo = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(pos))),
                                        base.states.size() - 2);
        const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
        return (1.0 - w) * base.states[lo] + w * base.states[lo + 1];
    };

    DecompositionResult result;
    result.tolerance = tolerance;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const Vec rhs = g[i] * flow_at(s[i]);
        result.sup_error = std::max(result.sup_error, (lhs[i] - rhs).norm());
    }
    result.pass = result.sup_error <= tolerance;
    return result;
}

}  // namespace znl::zoo
