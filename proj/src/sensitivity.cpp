#include "znl/sensitivity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "znl/calculus.hpp"
#include "znl/ensemble.hpp"

namespace znl::sensitivity {

namespace {

std::vector<Mat> diffusion_column_jacobians(const ModelSpec& model, const Vec& x) {
    if (model.diffusion_jacobian) return model.diffusion_jacobian(x);
    std::vector<Mat> ds;
    ds.reserve(model.brownian_dim);
    for (int j = 0; j < model.brownian_dim; ++j) {
        auto column = [&model, j](const Vec& p) { return Vec(model.diffusion(p).col(j)); };
        ds.push_back(jacobian_fd(column, x));
    }
    return ds;
}

}  // namespace

VariationalPath variational_path(const ModelSpec& model, const PathSample& base, const Vec& h) {
    if (!base.noise) fail(Errc::MissingNoiseRecord, "base path carries no noise record");
    if (model.has_jumps()) fail(Errc::JumpsUnsupported, "variational flow is diffusion-only");
    require_dim(h, model.dim, "direction");
    if (base.states.size() != base.noise->brownian.size() + 1)
        fail(Errc::MissingNoiseRecord, "noise record does not align with the path");

    const double eps = base.noise->epsilon;
    VariationalPath out;
    out.direction = h;
    out.times = base.times;
    out.eta.reserve(base.states.size());
    Vec eta = h;
    out.eta.push_back(eta);
    for (std::size_t i = 0; i + 1 < base.states.size(); ++i) {
        const double dt = base.times[i + 1] - base.times[i];
        const Vec& x = base.states[i];
        Vec next = eta + dt * (drift_jacobian(model, x) * eta);
        if (eps != 0.0) {
            const std::vector<Mat> ds = diffusion_column_jacobians(model, x);
            const Vec& dw = base.noise->brownian[i];
            for (int j = 0; j < model.brownian_dim; ++j) next += (eps * dw[j]) * (ds[j] * eta);
        }
        eta = std::move(next);
        if (!all_finite(eta)) fail(Errc::NonFiniteOutput, "variational path not finite");
        out.eta.push_back(eta);
    }
    return out;
}

namespace {

struct MomentAcc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    void merge(const MomentAcc& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    GradientEstimate estimate() const {
        GradientEstimate g;
        g.n_paths = n;
        if (n == 0) return g;
        const double mean = sum / static_cast<double>(n);
        g.estimate = mean;
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(n - 1));
            g.std_error = std::sqrt(var / static_cast<double>(n));
        }
        return g;
    }
};

}  // namespace

GradientEstimate bel_gradient(const ModelSpec& model, const std::function<double(const Vec&)>& phi,
                              double t, const Vec& x, const Vec& h, std::size_t n_paths,
                              const SimParams& params, std::uint64_t master_seed, int threads) {
    if (!(t > 0.0)) fail(Errc::BadParams, "t must be positive");
    if (model.has_jumps()) fail(Errc::JumpsUnsupported, "BEL gradient is diffusion-only");
    if (!(params.epsilon > 0.0)) fail(Errc::BadParams, "BEL gradient needs epsilon > 0");
    SimParams p = params;
    p.t_final = t;
    p.record_noise = true;
    p.validate();

    const double eps = p.epsilon;
    auto per_path = [&](std::size_t, RngStream& stream) {
        PathSample base = em_path(model, x, p, stream);
        VariationalPath var = variational_path(model, base, h);
        double weight = 0.0;
        for (std::size_t i = 0; i + 1 < base.states.size(); ++i) {
            const Mat sigma_eff = eps * model.diffusion(base.states[i]);
            const Mat gram = sigma_eff * sigma_eff.transpose();
            Eigen::SelfAdjointEigenSolver<Mat> es(gram);
            const double lo = es.eigenvalues().minCoeff();
            const double hi = es.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > 1e8)
                fail(Errc::DegenerateDiffusion, "sigma sigma^T condition number exceeds 1e8");
            const Vec z = gram.ldlt().solve(var.eta[i]);
            weight += (sigma_eff.transpose() * z).dot(base.noise->brownian[i]);
        }
        return phi(base.last()) * weight / t;
    };

    EnsembleOptions ens;
    ens.master_seed = master_seed;
    ens.n_paths = n_paths;
    ens.threads = threads;
    MomentAcc acc = run_ensemble<MomentAcc>(
        ens, per_path, MomentAcc{}, [](MomentAcc& a, std::size_t, double v) { a.add(v); },
        [](MomentAcc& a, MomentAcc&& b) { a.merge(b); });
    return acc.estimate();
}

GradientEstimate fd_gradient(const ModelSpec& model, const std::function<double(const Vec&)>& phi,
                             double t, const Vec& x, const Vec& h, double delta, std::size_t n_paths,
                             const SimParams& params, std::uint64_t master_seed, int threads) {
    if (!(delta > 0.0)) fail(Errc::BadParams, "delta must be positive");
    SimParams p = params;
    p.t_final = t;
    p.validate();

    auto per_path = [&](std::size_t path_index, RngStream&) {
        // Common random numbers: both shifted starts replay the same stream.
        RngStream plus = derive_stream(master_seed, path_index);
        RngStream minus = derive_stream(master_seed, path_index);
        const double up = phi(em_path(model, Vec(x + delta * h), p, plus).last());
        const double down = phi(em_path(model, Vec(x - delta * h), p, minus).last());
        return (up - down) / (2.0 * delta);
    };

    EnsembleOptions ens;
    ens.master_seed = master_seed;
    ens.n_paths = n_paths;
    ens.threads = threads;
    MomentAcc acc = run_ensemble<MomentAcc>(
        ens, per_path, MomentAcc{}, [](MomentAcc& a, std::size_t, double v) { a.add(v); },
        [](MomentAcc& a, MomentAcc&& b) { a.merge(b); });
    return acc.estimate();
}

}  // namespace znl::sensitivity
