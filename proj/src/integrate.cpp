#include "znl/integrate.hpp"

#include <cmath>
#include <sstream>

namespace znl {

void SimParams::validate() const {
    if (!(dt > 0.0)) fail(Errc::BadParams, "sim.dt must be positive");
    if (!(t_final >= dt)) fail(Errc::BadParams, "sim.t_final must be at least dt");
    if (burn_in < 0.0 || burn_in >= t_final) fail(Errc::BadParams, "sim.burn_in must lie in [0, t_final)");
    if (epsilon < 0.0) fail(Errc::BadParams, "sim.epsilon must be nonnegative");
    if (!(blowup_norm > 0.0)) fail(Errc::BadParams, "sim.blowup_norm must be positive");
}

std::size_t SimParams::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

namespace {

[[noreturn]] void blow_up(const std::string& label, double t, double norm) {
    std::ostringstream out;
    out << "model '" << label << "' exceeded |x| = " << norm << " at t = " << t;
    fail(Errc::BlowUp, out.str());
}

void check_state(const ModelSpec& model, const SimParams& params, double t, const Vec& x) {
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm > params.blowup_norm) blow_up(model.label, t, norm);
}

}  // namespace

void flow_run(const ModelSpec& model, const Vec& x0, const SimParams& params, const StepSink& sink) {
    params.validate();
    require_dim(x0, model.dim, "initial state");
    const double dt = params.dt;
    const std::size_t n = params.n_steps();
    Vec x = x0;
    sink(0, 0.0, x);
    Vec k1, k2, k3, k4;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        check_state(model, params, t, x);
        k1 = model.drift(x);
        k2 = model.drift(x + (0.5 * dt) * k1);
        k3 = model.drift(x + (0.5 * dt) * k2);
        k4 = model.drift(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_state(model, params, t + dt, x);
        sink(i + 1, t + dt, x);
    }
}

PathSample flow(const ModelSpec& model, const Vec& x0, const SimParams& params) {
    PathSample path;
    path.times.reserve(params.n_steps() + 1);
    path.states.reserve(params.n_steps() + 1);
    flow_run(model, x0, params, [&](std::size_t, double t, const Vec& x) {
        path.times.push_back(t);
        path.states.push_back(x);
    });
    return path;
}

void em_run(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream,
            const StepSink& sink, NoiseRecord* record) {
    params.validate();
    require_dim(x0, model.dim, "initial state");
    if (model.noise_kind == NoiseKind::Stratonovich)
        fail(Errc::StratonovichNotConverted, "convert '" + model.label + "' to Ito form before stepping");

    const double dt = params.dt;
    const double eps = params.epsilon;
    const std::size_t n = params.n_steps();
    const int k = model.brownian_dim;
    const bool jumps = model.has_jumps() && eps != 0.0;

    std::vector<JumpEvent> events;
    std::size_t next_event = 0;
    if (jumps) events = jump_events(stream, *model.jumps, params.t_final);

    if (record) {
        record->epsilon = eps;
        record->brownian.clear();
        record->jumps.clear();
        record->brownian.reserve(n);
        record->jumps.resize(jumps ? n : 0);
    }

    const double sqrt_dt = std::sqrt(dt);
    Vec x = x0;
    sink(0, 0.0, x);
    Vec dw(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double t_next = static_cast<double>(i + 1) * dt;
        check_state(model, params, t, x);

        Vec x_new = x + dt * model.effective_drift(x, eps);
        if (eps != 0.0) {
            for (int j = 0; j < k; ++j) dw[j] = sqrt_dt * stream.normal();
            x_new += eps * (model.diffusion(x) * dw);
            if (record) record->brownian.push_back(dw);
        } else if (record) {
            record->brownian.push_back(Vec::Zero(k));
        }
        if (jumps) {
            x_new -= (eps * dt) * model.jumps->compensator(x, model.dim);
            while (next_event < events.size() && events[next_event].time <= t_next) {
                const JumpEvent& ev = events[next_event];
                x_new += eps * model.jumps->jump_map(x_new, ev.mark);
                if (record) record->jumps[i].push_back(ev);
                ++next_event;
            }
        }
        x = std::move(x_new);
        check_state(model, params, t_next, x);
        sink(i + 1, t_next, x);
    }
}

PathSample em_path(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream) {
    PathSample path;
    path.times.reserve(params.n_steps() + 1);
    path.states.reserve(params.n_steps() + 1);
    NoiseRecord record;
    em_run(model, x0, params, stream,
           [&](std::size_t, double t, const Vec& x) {
               path.times.push_back(t);
               path.states.push_back(x);
           },
           params.record_noise ? &record : nullptr);
    if (params.record_noise) path.noise = std::move(record);
    return path;
}

void coupled_run(const ModelSpec& model, const Vec& x0, const SimParams& params, RngStream& stream,
                 const PairSink& sink) {
    params.validate();
    require_dim(x0, model.dim, "initial state");
    if (model.noise_kind == NoiseKind::Stratonovich)
        fail(Errc::StratonovichNotConverted, "convert '" + model.label + "' to Ito form before stepping");

    const double dt = params.dt;
    const double eps = params.epsilon;
    const std::size_t n = params.n_steps();
    const int k = model.brownian_dim;
    const bool jumps = model.has_jumps() && eps != 0.0;

    std::vector<JumpEvent> events;
    std::size_t next_event = 0;
    if (jumps) events = jump_events(stream, *model.jumps, params.t_final);

    const double sqrt_dt = std::sqrt(dt);
    Vec xe = x0;  // X^eps
    Vec xd = x0;  // X^0, same grid, same draws consumed
    sink(0, 0.0, xe, xd);
    Vec dw(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double t_next = static_cast<double>(i + 1) * dt;
        check_state(model, params, t, xe);
        check_state(model, params, t, xd);

        Vec xe_new = xe + dt * model.effective_drift(xe, eps);
        Vec xd_new = xd + dt * model.drift(xd);
        if (eps != 0.0) {
            for (int j = 0; j < k; ++j) dw[j] = sqrt_dt * stream.normal();
            xe_new += eps * (model.diffusion(xe) * dw);
        }
        if (jumps) {
            xe_new -= (eps * dt) * model.jumps->compensator(xe, model.dim);
            while (next_event < events.size() && events[next_event].time <= t_next) {
                xe_new += eps * model.jumps->jump_map(xe_new, events[next_event].mark);
                ++next_event;
            }
        }
        xe = std::move(xe_new);
        xd = std::move(xd_new);
        check_state(model, params, t_next, xe);
        check_state(model, params, t_next, xd);
        sink(i + 1, t_next, xe, xd);
    }
}

std::pair<PathSample, PathSample> coupled_pair(const ModelSpec& model, const Vec& x0,
                                               const SimParams& params, RngStream& stream) {
    PathSample a, b;
    coupled_run(model, x0, params, stream, [&](std::size_t, double t, const Vec& xe, const Vec& xd) {
        a.times.push_back(t);
        a.states.push_back(xe);
        b.times.push_back(t);
        b.states.push_back(xd);
    });
    return {std::move(a), std::move(b)};
}

}  // namespace znl
