#include "znl/measures.hpp"

#include <algorithm>
#include <cmath>

#include "znl/ensemble.hpp"
#include "znl/wasserstein.hpp"

namespace znl::measures {

namespace {

EmpiricalMeasure make_empty(const ModelSpec& model, const Vec& x0, const SimParams& params,
                            const OccupationOptions& options) {
    std::optional<GridSpec> grid;
    if (options.use_grid) {
        grid = options.grid ? *options.grid : GridSpec::infer(model, x0, params);
    }
    return EmpiricalMeasure(model.dim, std::move(grid), options.reservoir);
}

}  // namespace

EmpiricalMeasure occupation_estimate(const ModelSpec& model, const Vec& x0, const SimParams& params,
                                     const OccupationOptions& options) {
    params.validate();
    if (options.n_paths < 1) fail(Errc::BadParams, "n_paths must be >= 1");
    EmpiricalMeasure empty = make_empty(model, x0, params, options);

    const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
    const std::uint64_t salt = options.master_seed;
    auto per_path = [&](std::size_t path_index, RngStream& stream) {
        EmpiricalMeasure acc = empty;
        em_run(model, x0, params, stream, [&](std::size_t step, double t, const Vec& x) {
            if (t < params.burn_in || step % stride != 0) return;
            acc.add(x, sample_priority(salt, path_index, step));
        });
        return acc;
    };

    EnsembleOptions ens;
    ens.master_seed = options.master_seed;
    ens.n_paths = options.n_paths;
    ens.threads = options.threads;
    return run_ensemble<EmpiricalMeasure>(
        ens, per_path, empty,
        [](EmpiricalMeasure& acc, std::size_t, EmpiricalMeasure&& part) { acc.merge(part); },
        [](EmpiricalMeasure& acc, EmpiricalMeasure&& part) { acc.merge(part); });
}

SfdeOccupation occupation_estimate_sfde(const DelayModel& model, const SegmentState& phi0,
                                        const SimParams& params, const OccupationOptions& options) {
    params.validate();
    struct Acc {
        EmpiricalMeasure measure;
        double sup_sum = 0.0;
        double sup6_first = 0.0, sup6_second = 0.0;
        std::uint64_t n = 0, n_first = 0, n_second = 0;
    };

    std::optional<GridSpec> grid = options.use_grid ? options.grid : std::nullopt;
    Acc empty{EmpiricalMeasure(model.dim(), grid, options.reservoir), 0, 0, 0, 0, 0, 0};

    const double mid = 0.5 * (params.burn_in + params.t_final);
    const std::size_t stride = std::max<std::size_t>(1, options.record_stride);
    const std::uint64_t salt = options.master_seed;
    auto per_path = [&](std::size_t path_index, RngStream& stream) {
        Acc acc = empty;
        sfde_run(model, phi0, params, stream, [&](std::size_t step, double t, const SegmentState& seg) {
            if (t < params.burn_in || step % stride != 0) return;
            acc.measure.add(seg.head(), sample_priority(salt, path_index, step));
            const double sup = seg.sup_norm();
            acc.sup_sum += sup;
            ++acc.n;
            const double sup6 = std::pow(sup, 6);
            if (t < mid) {
                acc.sup6_first += sup6;
                ++acc.n_first;
            } else {
                acc.sup6_second += sup6;
                ++acc.n_second;
            }
        });
        return acc;
    };
    auto combine = [](Acc& a, Acc&& b) {
        a.measure.merge(b.measure);
        a.sup_sum += b.sup_sum;
        a.sup6_first += b.sup6_first;
        a.sup6_second += b.sup6_second;
        a.n += b.n;
        a.n_first += b.n_first;
        a.n_second += b.n_second;
    };

    EnsembleOptions ens;
    ens.master_seed = options.master_seed;
    ens.n_paths = options.n_paths;
    ens.threads = options.threads;
    Acc total = run_ensemble<Acc>(
        ens, per_path, empty, [&](Acc& a, std::size_t, Acc&& b) { combine(a, std::move(b)); },
        [&](Acc& a, Acc&& b) { combine(a, std::move(b)); });

    SfdeOccupation out{std::move(total.measure), 0.0, 0.0, 0.0};
    if (total.n > 0) out.mean_sup_norm = total.sup_sum / static_cast<double>(total.n);
    if (total.n_first > 0) out.mean_sup6_first = total.sup6_first / static_cast<double>(total.n_first);
    if (total.n_second > 0) out.mean_sup6_second = total.sup6_second / static_cast<double>(total.n_second);
    return out;
}

double support_mass(const EmpiricalMeasure& measure, const dynamics::CandidateSet& candidates,
                    double delta, double scale) {
    if (candidates.empty()) fail(Errc::EmptyCandidateSet, "candidate set is empty");
    if (!(delta > 0.0)) fail(Errc::BadParams, "delta must be positive");
    const std::vector<Vec> states = measure.reservoir();
    if (states.empty()) fail(Errc::BadParams, "measure has an empty reservoir");
    std::size_t inside = 0;
    for (const Vec& x : states)
        if (candidates.distance(x, scale) <= delta) ++inside;
    return static_cast<double>(inside) / static_cast<double>(states.size());
}

std::map<std::string, double> support_shares(const EmpiricalMeasure& measure,
                                             const dynamics::CandidateSet& candidates, double delta,
                                             double scale) {
    if (candidates.empty()) fail(Errc::EmptyCandidateSet, "candidate set is empty");
    const std::vector<Vec> states = measure.reservoir();
    if (states.empty()) fail(Errc::BadParams, "measure has an empty reservoir");
    std::map<std::string, double> shares;
    for (const auto& p : candidates.points) shares[p.label] = 0.0;
    for (const auto& c : candidates.curves) shares[c.label] = 0.0;
    const double unit = 1.0 / static_cast<double>(states.size());
    for (const Vec& x : states) {
        if (candidates.distance(x, scale) <= delta) shares[candidates.nearest_label(x)] += unit;
    }
    return shares;
}

TightnessTable tightness_scan(const std::vector<std::pair<double, const EmpiricalMeasure*>>& measures,
                              const std::vector<double>& radii, double tolerance) {
    if (measures.empty()) fail(Errc::BadParams, "tightness scan needs at least one measure");
    if (radii.empty()) fail(Errc::BadParams, "tightness scan needs at least one radius");
    TightnessTable table;
    table.sup_outside.assign(radii.size(), 0.0);
    for (std::size_t r = 0; r < radii.size(); ++r) {
        for (const auto& [eps, measure] : measures) {
            const double outside = measure->outside_mass(radii[r]);
            table.rows.push_back({eps, radii[r], outside});
            table.sup_outside[r] = std::max(table.sup_outside[r], outside);
        }
    }
    table.decreasing = true;
    for (std::size_t r = 1; r < radii.size(); ++r)
        if (table.sup_outside[r] > table.sup_outside[r - 1]) table.decreasing = false;
    table.pass = table.decreasing && table.sup_outside.back() < tolerance;
    return table;
}

SweepReport convergence_sweep(const ModelSpec& model, const Vec& x0, const std::vector<double>& epsilons,
                              const SimParams& params, const dynamics::CandidateSet& candidates,
                              const SweepOptions& options) {
    if (epsilons.size() < 2) fail(Errc::BadParams, "sweep needs at least two epsilons");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1])) fail(Errc::BadParams, "epsilons must be strictly decreasing");

    SweepReport report;
    report.model_label = model.label;
    report.master_seed = options.occupation.master_seed;
    report.delta = options.delta;
    report.radii = options.radii;

    // Share one grid across the sweep so histograms are comparable; infer it
    // once when not supplied.
    OccupationOptions occ = options.occupation;
    if (occ.use_grid && !occ.grid) occ.grid = GridSpec::infer(model, x0, params);

    for (double eps : epsilons) {
        SimParams p = params;
        p.epsilon = eps;
        SweepEntry entry{eps, 0.0, 0.0, {}, 0.0, {}, occupation_estimate(model, x0, p, occ)};
        entry.leak = entry.measure.leak_mass();
        entry.support = support_mass(entry.measure, candidates, options.delta, options.support_scale);
        entry.shares = support_shares(entry.measure, candidates, options.delta, options.support_scale);
        for (double radius : options.radii) entry.outside.push_back(entry.measure.outside_mass(radius));
        report.entries.push_back(std::move(entry));
    }

    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const EmpiricalMeasure& a = report.entries[i - 1].measure;
        const EmpiricalMeasure& b = report.entries[i].measure;
        report.entries[i].w1_to_previous =
            model.dim == 1 ? w1_distance_1d(a, b)
                           : sliced_w1(a, b, options.w1_directions, options.occupation.master_seed);
    }

    report.support_trend_ok = true;
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        if (report.entries[i].support < report.entries[i - 1].support - options.trend_slack)
            report.support_trend_ok = false;
    }
    report.w1_cauchy_ok = true;
    for (std::size_t i = 2; i < report.entries.size(); ++i) {
        const double prev = report.entries[i - 1].w1_to_previous;
        const double cur = report.entries[i].w1_to_previous;
        if (cur > prev * (1.0 + options.trend_slack) + options.trend_slack) report.w1_cauchy_ok = false;
    }
    return report;
}

}  // namespace znl::measures
