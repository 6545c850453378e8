#pragma once

#include <functional>

#include "znl/integrate.hpp"
#include "znl/model.hpp"
#include "znl/rng.hpp"
#include "znl/types.hpp"

namespace znl {

// Sliding window X_t(theta) = X(t + theta), theta in [-tau, 0], sampled on the
// integration grid. The ring holds ceil(tau/dt) + 1 states.
class SegmentState {
public:
    SegmentState(double tau, double dt, std::vector<Vec> samples);
    static SegmentState constant(double tau, double dt, const Vec& x);
    static SegmentState from_function(double tau, double dt, int dim,
                                      const std::function<Vec(double)>& phi);

    const Vec& head() const;     // X(t)
    const Vec& delayed() const;  // X(t - tau)
    Vec eval(double theta) const;  // piecewise linear between grid samples
    double sup_norm() const;
    void push(const Vec& x);

    double tau() const { return tau_; }
    double dt() const { return dt_; }
    int dim() const { return static_cast<int>(ring_.front().size()); }
    std::size_t length() const { return ring_.size(); }

private:
    double tau_;
    double dt_;
    std::vector<Vec> ring_;  // ring_[(start_ + i) % L] is the sample at theta = -tau + i dt
    std::size_t start_ = 0;
};

// Delayed drift -B x(t) + A g(x(t - tau)) with segment-dependent diffusion.
struct DelayModel {
    Mat decay;      // B
    Mat coupling;   // A
    std::function<Vec(const Vec&)> g;
    std::function<Mat(const SegmentState&)> sigma;  // m x k
    int brownian_dim = 0;
    double tau = 1.0;
    std::string label;

    int dim() const { return static_cast<int>(decay.rows()); }
    Vec drift(const Vec& x_now, const Vec& x_delayed) const;
};

using SegmentSink = std::function<void(std::size_t step, double t, const SegmentState& segment)>;

// Euler-Maruyama with delayed drift; dt must divide tau exactly.
void sfde_run(const DelayModel& model, const SegmentState& phi0, const SimParams& params,
              RngStream& stream, const SegmentSink& sink);
PathSample sfde_path(const DelayModel& model, const SegmentState& phi0, const SimParams& params,
                     RngStream& stream);

// Newton solve of -B p + A g(p) = 0 from the given seed.
Vec delay_equilibrium(const DelayModel& model, const Vec& seed, double tol = 1e-12, int max_iter = 100);

}  // namespace znl
