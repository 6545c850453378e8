#include "znl/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "znl/calculus.hpp"

namespace znl::dynamics {

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::stable: return "stable";
        case Classification::saddle: return "saddle";
        case Classification::unstable_focus: return "unstable_focus";
        case Classification::unstable_node: return "unstable_node";
        case Classification::center_unknown: return "center_unknown";
    }
    return "?";
}

double CandidateSet::distance(const Vec& x, double scale) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, scale * (x - p.x).norm());
    for (const auto& c : curves)
        for (const auto& q : c.points) best = std::min(best, scale * (x - q).norm());
    return best;
}

std::string CandidateSet::nearest_label(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    std::string label;
    for (const auto& p : points) {
        const double d = (x - p.x).norm();
        if (d < best) {
            best = d;
            label = p.label;
        }
    }
    for (const auto& c : curves) {
        for (const auto& q : c.points) {
            const double d = (x - q).norm();
            if (d < best) {
                best = d;
                label = c.label;
            }
        }
    }
    return label;
}

std::vector<Vec> seed_grid(const Vec& lo, const Vec& hi, int per_dim) {
    if (per_dim < 1) fail(Errc::BadParams, "seed grid needs per_dim >= 1");
    const int m = static_cast<int>(lo.size());
    std::size_t total = 1;
    for (int d = 0; d < m; ++d) total *= static_cast<std::size_t>(per_dim);
    std::vector<Vec> seeds;
    seeds.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vec x(m);
        std::size_t rest = idx;
        for (int d = 0; d < m; ++d) {
            const int i = static_cast<int>(rest % static_cast<std::size_t>(per_dim));
            rest /= static_cast<std::size_t>(per_dim);
            x[d] = per_dim == 1 ? 0.5 * (lo[d] + hi[d])
                                : lo[d] + (hi[d] - lo[d]) * static_cast<double>(i) / (per_dim - 1);
        }
        seeds.push_back(std::move(x));
    }
    return seeds;
}

namespace {

bool lexicographic_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

}  // namespace

EquilibriumSearch find_equilibria(const ModelSpec& model, const std::vector<Vec>& seeds,
                                  double newton_tol, int max_iter) {
    EquilibriumSearch out;
    constexpr double kDedupeTol = 1e-6;
    for (const Vec& seed : seeds) {
        require_dim(seed, model.dim, "seed");
        Vec x = seed;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            Vec b = model.drift(x);
            if (!all_finite(b)) break;
            if (b.norm() < newton_tol) {
                converged = true;
                break;
            }
            Mat jac = drift_jacobian(model, x);
            Eigen::PartialPivLU<Mat> lu(jac);
            Vec step = lu.solve(-b);
            if (!all_finite(step)) break;
            // Crude damping keeps wild seeds from shooting off to infinity.
            const double limit = 10.0 * (1.0 + x.norm());
            if (step.norm() > limit) step *= limit / step.norm();
            x += step;
        }
        if (!converged || !all_finite(x)) {
            ++out.dropped;
            continue;
        }
        bool duplicate = false;
        for (const Vec& r : out.roots) {
            if ((r - x).lpNorm<Eigen::Infinity>() < kDedupeTol) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.roots.push_back(x);
    }
    std::sort(out.roots.begin(), out.roots.end(), lexicographic_less);
    return out;
}

ClassifyResult classify_equilibrium(const ModelSpec& model, const Vec& x_star) {
    require_dim(x_star, model.dim, "equilibrium");
    if (model.drift(x_star).norm() > 1e-6)
        fail(Errc::BadParams, "point is not an equilibrium of '" + model.label + "'");

    ClassifyResult result;
    const Mat jac = drift_jacobian(model, x_star);
    Eigen::EigenSolver<Mat> solver(jac);
    if (solver.info() != Eigen::Success) {
        result.cls = Classification::center_unknown;
        return result;
    }
    const auto& values = solver.eigenvalues();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        result.eigenvalues.emplace_back(values[i].real(), values[i].imag());
        scale = std::max(scale, std::abs(values[i]));
    }
    const double tol = 1e-9 * std::max(1.0, scale);

    int positive = 0, negative = 0, near_zero = 0;
    bool complex_pair = false;
    for (const auto& ev : result.eigenvalues) {
        if (ev.real() > tol)
            ++positive;
        else if (ev.real() < -tol)
            ++negative;
        else
            ++near_zero;
        if (std::abs(ev.imag()) > tol) complex_pair = true;
    }
    if (near_zero > 0 || scale == 0.0)
        result.cls = Classification::center_unknown;
    else if (positive > 0 && negative > 0)
        result.cls = Classification::saddle;
    else if (negative == static_cast<int>(result.eigenvalues.size()))
        result.cls = Classification::stable;
    else
        result.cls = complex_pair ? Classification::unstable_focus : Classification::unstable_node;
    return result;
}

OmegaSample omega_limit_sample(const ModelSpec& model, const Vec& x0, const SimParams& params,
                               double cluster_eps) {
    if (!(cluster_eps > 0.0)) fail(Errc::BadParams, "cluster_eps must be positive");
    PathSample path = flow(model, x0, params);

    std::size_t tail_start = 0;
    while (tail_start < path.times.size() && path.times[tail_start] < params.burn_in) ++tail_start;
    if (tail_start + 2 >= path.states.size()) fail(Errc::BadParams, "burn_in leaves no tail");

    OmegaSample out;
    const Vec& p0 = path.states[tail_start];

    // Equilibrium: the whole tail stays within cluster_eps of its start.
    double diameter = 0.0;
    for (std::size_t i = tail_start; i < path.states.size(); ++i)
        diameter = std::max(diameter, (path.states[i] - p0).norm());
    if (diameter < cluster_eps) {
        out.kind = OmegaKind::equilibrium;
        out.samples.push_back(path.states.back());
        return out;
    }

    // Periodicity: local minima of |x(t) - p0| below cluster_eps are return
    // events; a consistent spacing between consecutive returns is a period.
    std::vector<double> returns;
    for (std::size_t i = tail_start + 2; i + 1 < path.states.size(); ++i) {
        const double prev = (path.states[i - 1] - p0).norm();
        const double cur = (path.states[i] - p0).norm();
        const double next = (path.states[i + 1] - p0).norm();
        if (cur < cluster_eps && cur <= prev && cur < next) {
            if (returns.empty() || path.times[i] - returns.back() > 10.0 * params.dt)
                returns.push_back(path.times[i]);
        }
    }
    if (returns.size() >= 3) {
        const double p1 = returns[1] - returns[0];
        const double p2 = returns[2] - returns[1];
        if (p1 > 0.0 && std::abs(p1 - p2) < 0.05 * std::max(p1, p2)) {
            out.kind = OmegaKind::periodic;
            out.period = 0.5 * (p1 + p2);
            const std::size_t per_steps = static_cast<std::size_t>(std::llround(out.period / params.dt));
            for (std::size_t i = tail_start; i < std::min(tail_start + per_steps, path.states.size()); ++i)
                out.samples.push_back(path.states[i]);
            return out;
        }
    }

    out.kind = OmegaKind::other;
    const std::size_t stride = std::max<std::size_t>(1, (path.states.size() - tail_start) / 512);
    for (std::size_t i = tail_start; i < path.states.size(); i += stride)
        out.samples.push_back(path.states[i]);
    return out;
}

namespace {

LabeledPoint classified_point(const ModelSpec& model, const Vec& x, const std::string& label) {
    LabeledPoint p;
    p.x = x;
    p.label = label;
    ClassifyResult res = classify_equilibrium(model, x);
    p.cls = res.cls;
    p.eigenvalues = std::move(res.eigenvalues);
    return p;
}

CandidateSet limit_cycle_candidates() {
    const ModelSpec model = zoo::build(zoo::LimitCycleParams{});
    CandidateSet set;
    set.points.push_back(classified_point(model, Vec::Zero(2), "O"));
    SampledOrbit circle;
    circle.label = "S1";
    circle.period = 2.0 * M_PI;
    for (int i = 0; i < 360; ++i) {
        const double theta = 2.0 * M_PI * i / 360.0;
        Vec q(2);
        q << std::cos(theta), std::sin(theta);
        circle.points.push_back(q);
    }
    set.curves.push_back(std::move(circle));
    return set;
}

CandidateSet lemniscate_candidates() {
    const ModelSpec model = zoo::build(zoo::LemniscateParams{});
    CandidateSet set;
    const auto eq = zoo::lemniscate_equilibria();
    set.points.push_back(classified_point(model, eq[1], "O"));
    set.points.push_back(classified_point(model, eq[2], "P+"));
    set.points.push_back(classified_point(model, eq[0], "P-"));
    return set;
}

CandidateSet may_leonard_candidates(const zoo::MayLeonardParams& p) {
    const ModelSpec model = zoo::build(p);
    CandidateSet set;
    for (const auto& [label, x] : zoo::may_leonard_equilibria(p))
        set.points.push_back(classified_point(model, x, label));
    return set;
}

CandidateSet chafee_candidates(const zoo::ChafeeInfanteParams& p) {
    const ModelSpec model = zoo::build(p);
    const int n = p.n_grid;
    // Seed the Newton search with low sine modes at several amplitudes; the
    // discrete branch structure is narrow enough that these catch every root.
    std::vector<Vec> seeds;
    seeds.push_back(Vec::Zero(n));
    for (int mode = 1; mode <= 3; ++mode) {
        for (double amp : {0.4, 0.9, 1.3}) {
            Vec up(n), down(n);
            for (int i = 0; i < n; ++i) {
                const double s = std::sin(M_PI * mode * (i + 1) * p.grid_h());
                up[i] = amp * s;
                down[i] = -amp * s;
            }
            seeds.push_back(up);
            seeds.push_back(down);
        }
    }
    EquilibriumSearch search = find_equilibria(model, seeds, 1e-11);
    CandidateSet set;
    for (std::size_t i = 0; i < search.roots.size(); ++i) {
        const Vec& root = search.roots[i];
        std::string label;
        if (root.norm() < 1e-6)
            label = "zero";
        else if (root.sum() > 0.0)
            label = "phi" + std::to_string((i % 9) + 1) + "+";
        else
            label = "phi" + std::to_string((i % 9) + 1) + "-";
        set.points.push_back(classified_point(model, root, label));
    }
    return set;
}

CandidateSet hopfield_candidates(const zoo::HopfieldParams& p) {
    const DelayModel model = zoo::build(p);
    const Vec eq = delay_equilibrium(model, Vec::Zero(model.dim()));
    CandidateSet set;
    LabeledPoint point;
    point.x = eq;
    point.label = "p";
    point.cls = Classification::stable;
    set.points.push_back(std::move(point));
    return set;
}

CandidateSet generic_zoo_candidates(const ModelSpec& model, const Vec& x0) {
    Vec lo = Vec::Constant(model.dim, -2.0);
    Vec hi = Vec::Constant(model.dim, 2.0);
    SimParams probe;
    probe.dt = 1e-3;
    probe.t_final = 200.0;
    probe.burn_in = 100.0;
    return numeric_candidates(model, lo, hi, model.dim <= 3 ? 5 : 1, x0, probe);
}

}  // namespace

CandidateSet numeric_candidates(const ModelSpec& model, const Vec& lo, const Vec& hi, int seeds_per_dim,
                                const Vec& probe_x0, const SimParams& probe_params) {
    EquilibriumSearch search = find_equilibria(model, seed_grid(lo, hi, seeds_per_dim));
    CandidateSet set;
    for (std::size_t i = 0; i < search.roots.size(); ++i)
        set.points.push_back(classified_point(model, search.roots[i], "E" + std::to_string(i)));
    OmegaSample omega = omega_limit_sample(model, probe_x0, probe_params, 1e-2);
    if (omega.kind == OmegaKind::periodic) {
        SampledOrbit orbit;
        orbit.label = "orbit";
        orbit.period = omega.period;
        orbit.points = std::move(omega.samples);
        set.curves.push_back(std::move(orbit));
    }
    return set;
}

CandidateSet birkhoff_candidates(const zoo::ZooSelection& selection) {
    return std::visit(
        [&](const auto& p) -> CandidateSet {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, zoo::LimitCycleParams>) {
                return limit_cycle_candidates();
            } else if constexpr (std::is_same_v<T, zoo::LemniscateParams>) {
                return lemniscate_candidates();
            } else if constexpr (std::is_same_v<T, zoo::MayLeonardParams>) {
                return may_leonard_candidates(p);
            } else if constexpr (std::is_same_v<T, zoo::ChafeeInfanteParams>) {
                return chafee_candidates(p);
            } else if constexpr (std::is_same_v<T, zoo::HopfieldParams>) {
                return hopfield_candidates(p);
            } else if constexpr (std::is_same_v<T, zoo::OuParams>) {
                const ModelSpec model = zoo::build(p);
                CandidateSet set;
                set.points.push_back(classified_point(model, Vec::Zero(p.dim), "O"));
                return set;
            } else if constexpr (std::is_same_v<T, zoo::LogisticParams>) {
                const ModelSpec model = zoo::build(p);
                CandidateSet set;
                set.points.push_back(classified_point(model, Vec::Zero(1), "O"));
                set.points.push_back(classified_point(model, Vec::Ones(1), "one"));
                return set;
            } else {
                const ModelSpec model = zoo::build(p);
                return generic_zoo_candidates(model, zoo::default_x0(selection));
            }
        },
        selection);
}

}  // namespace znl::dynamics
