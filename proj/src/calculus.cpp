#include "znl/calculus.hpp"

namespace znl {

double fd_step_jacobian(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }
double fd_step_hessian(const Vec& x) { return 1e-4 * (1.0 + x.norm()); }

Mat jacobian_fd(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    if (h <= 0.0) h = fd_step_jacobian(x);
    const Eigen::Index m = x.size();
    Vec probe = x;
    probe[0] += h;
    Vec f0 = f(probe);
    const Eigen::Index n = f0.size();
    Mat jac(n, m);
    probe[0] = x[0] - h;
    Vec f1 = f(probe);
    jac.col(0) = (f0 - f1) / (2.0 * h);
    probe[0] = x[0];
    for (Eigen::Index j = 1; j < m; ++j) {
        probe[j] = x[j] + h;
        f0 = f(probe);
        probe[j] = x[j] - h;
        f1 = f(probe);
        probe[j] = x[j];
        jac.col(j) = (f0 - f1) / (2.0 * h);
    }
    if (!all_finite(jac)) fail(Errc::NonFiniteOutput, "finite-difference Jacobian not finite");
    return jac;
}

Vec gradient_fd(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    if (h <= 0.0) h = fd_step_hessian(x);
    const Eigen::Index m = x.size();
    Vec grad(m);
    Vec probe = x;
    for (Eigen::Index j = 0; j < m; ++j) {
        probe[j] = x[j] + h;
        const double fp = f(probe);
        probe[j] = x[j] - h;
        const double fm = f(probe);
        probe[j] = x[j];
        grad[j] = (fp - fm) / (2.0 * h);
    }
    if (!all_finite(grad)) fail(Errc::NonFiniteOutput, "finite-difference gradient not finite");
    return grad;
}

Mat hessian_fd(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    if (h <= 0.0) h = fd_step_hessian(x);
    const Eigen::Index m = x.size();
    Mat hess(m, m);
    const double f0 = f(x);
    Vec probe = x;
    for (Eigen::Index i = 0; i < m; ++i) {
        probe[i] = x[i] + h;
        const double fp = f(probe);
        probe[i] = x[i] - h;
        const double fm = f(probe);
        probe[i] = x[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        for (Eigen::Index j = i + 1; j < m; ++j) {
            probe[i] = x[i] + h;
            probe[j] = x[j] + h;
            const double fpp = f(probe);
            probe[j] = x[j] - h;
            const double fpm = f(probe);
            probe[i] = x[i] - h;
            const double fmm = f(probe);
            probe[j] = x[j] + h;
            const double fmp = f(probe);
            probe[i] = x[i];
            probe[j] = x[j];
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    if (!all_finite(hess)) fail(Errc::NonFiniteOutput, "finite-difference Hessian not finite");
    return hess;
}

Mat drift_jacobian(const ModelSpec& model, const Vec& x) {
    if (model.drift_jacobian) return model.drift_jacobian(x);
    return jacobian_fd(model.drift, x);
}

ModelSpec stratonovich_to_ito(const ModelSpec& model) {
    if (model.noise_kind != NoiseKind::Stratonovich)
        fail(Errc::BadParams, "model '" + model.label + "' is not Stratonovich");
    ModelSpec out = model;
    out.noise_kind = NoiseKind::Ito;
    if (out.ito_correction) return out;  // zoo models carry the analytic conversion
    if (!model.diffusion_jacobian)
        fail(Errc::MissingJacobian, "Stratonovich conversion needs diffusion_jacobian");
    auto sigma = model.diffusion;
    auto dsigma = model.diffusion_jacobian;
    const int k = model.brownian_dim;
    out.ito_correction = [sigma, dsigma, k](const Vec& x) {
        Mat s = sigma(x);
        std::vector<Mat> ds = dsigma(x);
        Vec corr = Vec::Zero(x.size());
        for (int j = 0; j < k; ++j) corr += 0.5 * (ds[j] * s.col(j));
        return corr;
    };
    return out;
}

}  // namespace znl
