#include "znl/sfde.hpp"

#include <cmath>

#include "znl/calculus.hpp"

namespace znl {

namespace {

std::size_t lag_steps(double tau, double dt) {
    const double ratio = tau / dt;
    const double rounded = std::round(ratio);
    if (!(tau > 0.0)) fail(Errc::BadParams, "tau must be positive");
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        fail(Errc::DtDoesNotDivideTau, "dt does not divide tau");
    return static_cast<std::size_t>(rounded);
}

}  // namespace

SegmentState::SegmentState(double tau, double dt, std::vector<Vec> samples)
    : tau_(tau), dt_(dt), ring_(std::move(samples)) {
    const std::size_t n_lag = lag_steps(tau, dt);
    if (ring_.size() != n_lag + 1)
        fail(Errc::BadParams, "segment needs tau/dt + 1 samples, got " + std::to_string(ring_.size()));
}

SegmentState SegmentState::constant(double tau, double dt, const Vec& x) {
    const std::size_t n_lag = lag_steps(tau, dt);
    return SegmentState(tau, dt, std::vector<Vec>(n_lag + 1, x));
}

SegmentState SegmentState::from_function(double tau, double dt, int dim,
                                         const std::function<Vec(double)>& phi) {
    const std::size_t n_lag = lag_steps(tau, dt);
    std::vector<Vec> samples;
    samples.reserve(n_lag + 1);
    for (std::size_t i = 0; i <= n_lag; ++i) {
        Vec v = phi(-tau + static_cast<double>(i) * dt);
        require_dim(v, dim, "initial segment sample");
        samples.push_back(std::move(v));
    }
    return SegmentState(tau, dt, std::move(samples));
}

const Vec& SegmentState::head() const { return ring_[(start_ + ring_.size() - 1) % ring_.size()]; }

const Vec& SegmentState::delayed() const { return ring_[start_]; }

Vec SegmentState::eval(double theta) const {
    if (theta < -tau_ - 1e-12 || theta > 1e-12)
        fail(Errc::BadParams, "theta outside [-tau, 0]");
    const double pos = (theta + tau_) / dt_;
    const std::size_t lo = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(pos))),
                                    ring_.size() - 1);
    const std::size_t hi = std::min(lo + 1, ring_.size() - 1);
    const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
    const Vec& a = ring_[(start_ + lo) % ring_.size()];
    const Vec& b = ring_[(start_ + hi) % ring_.size()];
    return (1.0 - w) * a + w * b;
}

double SegmentState::sup_norm() const {
    double best = 0.0;
    for (const auto& v : ring_) best = std::max(best, v.lpNorm<Eigen::Infinity>());
    return best;
}

void SegmentState::push(const Vec& x) {
    ring_[start_] = x;
    start_ = (start_ + 1) % ring_.size();
}

Vec DelayModel::drift(const Vec& x_now, const Vec& x_delayed) const {
    return -(decay * x_now) + coupling * g(x_delayed);
}

void sfde_run(const DelayModel& model, const SegmentState& phi0, const SimParams& params,
              RngStream& stream, const SegmentSink& sink) {
    params.validate();
    const std::size_t n_lag = lag_steps(model.tau, params.dt);
    if (phi0.length() != n_lag + 1 || std::abs(phi0.dt() - params.dt) > 1e-12 * params.dt)
        fail(Errc::BadParams, "initial segment grid does not match sim.dt");
    if (phi0.dim() != model.dim()) fail(Errc::DimensionMismatch, "initial segment dimension mismatch");

    const double dt = params.dt;
    const double eps = params.epsilon;
    const double sqrt_dt = std::sqrt(dt);
    const int k = model.brownian_dim;
    const std::size_t n = params.n_steps();

    SegmentState seg = phi0;
    sink(0, 0.0, seg);
    Vec dw(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double t_next = static_cast<double>(i + 1) * dt;
        Vec x = seg.head();
        const double norm = x.norm();
        if (!std::isfinite(norm) || norm > params.blowup_norm)
            fail(Errc::BlowUp, "delay model '" + model.label + "' blew up at t = " + std::to_string(t_next));
        Vec x_new = x + dt * model.drift(x, seg.delayed());
        if (eps != 0.0 && k > 0) {
            for (int j = 0; j < k; ++j) dw[j] = sqrt_dt * stream.normal();
            x_new += eps * (model.sigma(seg) * dw);
        }
        seg.push(x_new);
        sink(i + 1, t_next, seg);
    }
}

PathSample sfde_path(const DelayModel& model, const SegmentState& phi0, const SimParams& params,
                     RngStream& stream) {
    PathSample path;
    path.times.reserve(params.n_steps() + 1);
    path.states.reserve(params.n_steps() + 1);
    sfde_run(model, phi0, params, stream, [&](std::size_t, double t, const SegmentState& seg) {
        path.times.push_back(t);
        path.states.push_back(seg.head());
    });
    return path;
}

Vec delay_equilibrium(const DelayModel& model, const Vec& seed, double tol, int max_iter) {
    Vec p = seed;
    auto residual = [&](const Vec& x) { return model.drift(x, x); };
    for (int it = 0; it < max_iter; ++it) {
        Vec r = residual(p);
        if (r.norm() < tol) return p;
        Mat jac = jacobian_fd(residual, p);
        Vec step = jac.partialPivLu().solve(-r);
        if (!all_finite(step)) fail(Errc::SingularJacobian, "Newton step failed for delay equilibrium");
        p += step;
    }
    if (residual(p).norm() < tol) return p;
    fail(Errc::BadParams, "delay equilibrium Newton did not converge");
}

}  // namespace znl
