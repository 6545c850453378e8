#include "znl/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "znl/calculus.hpp"

namespace znl {

LyapunovSpec LyapunovSpec::from_value(std::function<double(const Vec&)> value) {
    LyapunovSpec spec;
    spec.value = value;
    spec.gradient = [value](const Vec& x) { return gradient_fd(value, x); };
    spec.hessian = [value](const Vec& x) { return hessian_fd(value, x); };
    return spec;
}

double LyapunovSpec::cross_check(const std::vector<Vec>& points) const {
    double worst = 0.0;
    for (const Vec& x : points) {
        const Vec g = gradient(x);
        const Vec g_fd = gradient_fd(value, x);
        const Mat h = hessian(x);
        const Mat h_fd = hessian_fd(value, x);
        const double gs = std::max(1.0, g_fd.norm());
        const double hs = std::max(1.0, h_fd.norm());
        worst = std::max(worst, (g - g_fd).norm() / gs);
        worst = std::max(worst, (h - h_fd).norm() / hs);
    }
    return worst;
}

double generator_apply(const LyapunovSpec& V, const ModelSpec& model, double epsilon, const Vec& x) {
    require_dim(x, model.dim, "state");
    if (model.noise_kind == NoiseKind::Stratonovich && !model.ito_correction)
        fail(Errc::StratonovichNotConverted, "generator needs the Ito form of '" + model.label + "'");

    const Vec grad = V.gradient(x);
    double result = grad.dot(model.effective_drift(x, epsilon));

    if (epsilon != 0.0) {
        const Mat sigma = model.diffusion(x);
        const Mat a = sigma * sigma.transpose();
        const Mat hess = V.hessian(x);
        result += 0.5 * epsilon * epsilon * a.cwiseProduct(hess).sum();
    }

    if (model.has_jumps()) {
        const double v0 = V.value(x);
        for (const auto& atom : model.jumps->atoms) {
            const Vec f = model.jumps->jump_map(x, atom.mark);
            result += atom.rate * (V.value(x + epsilon * f) - v0 - epsilon * grad.dot(f));
        }
    }

    if (!std::isfinite(result)) fail(Errc::NonFiniteOutput, "generator value not finite");
    return result;
}

Vec sphere_sample(RngStream& stream, int dim, double radius) {
    if (!(radius > 0.0)) fail(Errc::BadParams, "sphere radius must be positive");
    Vec v(dim);
    double norm = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = stream.normal();
        norm = v.norm();
    } while (norm == 0.0);
    return (radius / norm) * v;
}

LyapunovScan lyapunov_scan(const LyapunovSpec& V, const ModelSpec& model, double epsilon,
                           const std::vector<double>& radii, int samples_per_shell, RngStream& stream) {
    if (radii.empty()) fail(Errc::BadParams, "radii list must not be empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) fail(Errc::BadParams, "radii must be positive");
        if (i > 0 && radii[i] <= radii[i - 1]) fail(Errc::BadParams, "radii must be increasing");
    }
    static constexpr double kShellMultipliers[] = {1.0, 1.5, 2.0};

    LyapunovScan scan;
    for (double radius : radii) {
        ShellRow row;
        row.radius = radius;
        row.inf_v = std::numeric_limits<double>::infinity();
        row.sup_lv = -std::numeric_limits<double>::infinity();
        for (double mult : kShellMultipliers) {
            for (int s = 0; s < samples_per_shell; ++s) {
                const Vec x = sphere_sample(stream, model.dim, mult * radius);
                if (mult == 1.0) row.inf_v = std::min(row.inf_v, V.value(x));
                row.sup_lv = std::max(row.sup_lv, generator_apply(V, model, epsilon, x));
            }
        }
        row.a_r = -row.sup_lv;
        scan.rows.push_back(row);
    }

    scan.inf_v_increasing = true;
    scan.a_r_increasing = true;
    for (std::size_t i = 1; i < scan.rows.size(); ++i) {
        if (scan.rows[i].inf_v <= scan.rows[i - 1].inf_v) scan.inf_v_increasing = false;
        if (scan.rows[i].a_r <= scan.rows[i - 1].a_r) scan.a_r_increasing = false;
    }
    scan.violation = scan.rows.back().sup_lv > 0.0 || !(scan.rows.front().inf_v > 0.0);
    return scan;
}

GrowthReport polynomial_growth_check(const ModelSpec& model, double q, const std::vector<double>& radii,
                                     int samples_per_shell, RngStream& stream) {
    if (q < 2.0) fail(Errc::BadParams, "growth exponent q must be >= 2");
    GrowthReport report;
    report.c1 = std::numeric_limits<double>::infinity();
    report.c2 = -std::numeric_limits<double>::infinity();
    for (double radius : radii) {
        for (int s = 0; s < samples_per_shell; ++s) {
            const Vec x = sphere_sample(stream, model.dim, radius);
            const double rq = std::pow(x.norm(), q);
            report.c1 = std::min(report.c1, -model.drift(x).dot(x) / rq);
            double noise = 0.5 * model.diffusion(x).squaredNorm();
            if (model.has_jumps()) {
                for (const auto& atom : model.jumps->atoms)
                    noise += atom.rate * model.jumps->jump_map(x, atom.mark).squaredNorm();
            }
            report.c2 = std::max(report.c2, noise / rq);
        }
    }
    report.pass = report.c1 > 0.0;
    return report;
}

HopfieldCondition hopfield_condition(double b_min, double tau, double kappa, double lipschitz_g,
                                     double a_norm) {
    if (!(tau > 0.0)) fail(Errc::BadParams, "tau must be positive");
    const double kappa_max = std::exp(3.0 * tau);
    if (!(kappa > 1.0) || !(kappa < kappa_max))
        fail(Errc::KappaOutOfRange, "kappa must lie in (1, e^{3 tau}) = (1, " + std::to_string(kappa_max) + ")");

    HopfieldCondition cond;
    const double sk = std::sqrt(kappa);
    cond.gamma = 9.0 * ((2.0 * sk - 1.0) / ((sk - 1.0) * (sk - 1.0)) + 1.0);
    const double cube = 16.0 * std::pow(lipschitz_g, 3) * std::pow(a_norm, 3);
    const double denom = 1.0 - kappa * std::exp(-3.0 * tau);
    cond.threshold = cond.gamma * cond.gamma * std::exp(6.0 * tau) * cube * cube / (denom * denom);
    cond.satisfied = b_min > cond.threshold;
    return cond;
}

}  // namespace znl
