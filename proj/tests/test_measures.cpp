#include <doctest.h>

#include <cmath>

#include "znl/ensemble.hpp"
#include "znl/measures.hpp"
#include "znl/wasserstein.hpp"
#include "znl/zoo.hpp"
#include "test_support.hpp"

using namespace znl;
using namespace znl::testing;

namespace {

SimParams make_params(double dt, double t_final, double eps, double burn) {
    SimParams p;
    p.dt = dt;
    p.t_final = t_final;
    p.epsilon = eps;
    p.burn_in = burn;
    return p;
}

dynamics::CandidateSet point_candidates(const std::vector<std::pair<std::string, Vec>>& pts) {
    dynamics::CandidateSet set;
    for (const auto& [label, x] : pts) {
        dynamics::LabeledPoint p;
        p.x = x;
        p.label = label;
        set.points.push_back(std::move(p));
    }
    return set;
}

}  // namespace

TEST_CASE("empirical measure normalization") {
    GridSpec grid = GridSpec::uniform(vec2(-1.0, -1.0), vec2(1.0, 1.0), 16);
    EmpiricalMeasure m(2, grid, 64);
    RngStream stream(1, 0);
    for (int i = 0; i < 5000; ++i)
        m.add(vec2(3.0 * stream.uniform() - 1.5, 3.0 * stream.uniform() - 1.5),
              sample_priority(0, 0, static_cast<std::uint64_t>(i)));
    double total = m.leak_mass();
    for (double mass : m.masses()) total += mass;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(m.leak_mass() > 0.0);
    CHECK(m.reservoir().size() == 64);
}

TEST_CASE("reservoir merge is associative and split-invariant") {
    auto feed = [](EmpiricalMeasure& m, std::uint64_t path, int n) {
        RngStream stream(11, path);
        for (int i = 0; i < n; ++i)
            m.add(vec1(stream.normal()), sample_priority(99, path, static_cast<std::uint64_t>(i)));
    };
    EmpiricalMeasure whole(1, std::nullopt, 128);
    for (std::uint64_t p = 0; p < 10; ++p) feed(whole, p, 500);

    EmpiricalMeasure first(1, std::nullopt, 128), second(1, std::nullopt, 128);
    for (std::uint64_t p = 0; p < 5; ++p) feed(first, p, 500);
    for (std::uint64_t p = 5; p < 10; ++p) feed(second, p, 500);
    first.merge(second);

    const auto a = whole.reservoir();
    const auto b = first.reservoir();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK(whole.total_samples() == first.total_samples());
}

TEST_CASE("w1 distance: exact values on point masses") {
    EmpiricalMeasure a = EmpiricalMeasure::from_samples({vec1(0.0)});
    EmpiricalMeasure b = EmpiricalMeasure::from_samples({vec1(1.0)});
    CHECK(w1_distance_1d(a, a) == doctest::Approx(0.0));
    CHECK(w1_distance_1d(a, b) == doctest::Approx(1.0));
}

TEST_CASE("w1 distance of shifted Gaussians is the shift") {
    RngStream stream(3, 0);
    std::vector<Vec> xs, ys;
    for (int i = 0; i < 100000; ++i) {
        xs.push_back(vec1(stream.normal()));
        ys.push_back(vec1(stream.normal() + 0.5));
    }
    EmpiricalMeasure a = EmpiricalMeasure::from_samples(xs);
    EmpiricalMeasure b = EmpiricalMeasure::from_samples(ys);
    CHECK(std::abs(w1_distance_1d(a, b) - 0.5) < 0.02);
}

TEST_CASE("w1 is a metric on sample fixtures") {
    RngStream stream(4, 0);
    std::vector<EmpiricalMeasure> ms;
    for (int k = 0; k < 6; ++k) {
        std::vector<Vec> xs;
        const double shift = stream.normal();
        const double scale = 0.5 + stream.uniform();
        for (int i = 0; i < 400; ++i) xs.push_back(vec1(shift + scale * stream.normal()));
        ms.push_back(EmpiricalMeasure::from_samples(xs));
    }
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 0; j < ms.size(); ++j) {
            const double dij = w1_distance_1d(ms[i], ms[j]);
            CHECK(dij == doctest::Approx(w1_distance_1d(ms[j], ms[i])).epsilon(1e-12));
            for (std::size_t k = 0; k < ms.size(); ++k)
                CHECK(dij <= w1_distance_1d(ms[i], ms[k]) + w1_distance_1d(ms[k], ms[j]) + 1e-12);
        }
    }
}

TEST_CASE("sliced W1: axes directions on planar point masses") {
    EmpiricalMeasure a = EmpiricalMeasure::from_samples({vec2(0.0, 0.0)});
    EmpiricalMeasure b = EmpiricalMeasure::from_samples({vec2(1.0, 0.0)});
    CHECK(sliced_w1(a, a, 8, 5) == doctest::Approx(0.0));
    std::vector<Vec> axes = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
    CHECK(sliced_w1_directions(a, b, axes) == doctest::Approx(0.5));
}

TEST_CASE("sliced W1 noise floor for equal 2-d Gaussians") {
    RngStream stream(6, 0);
    std::vector<Vec> xs, ys;
    for (int i = 0; i < 100000; ++i) {
        xs.push_back(vec2(stream.normal(), stream.normal()));
        ys.push_back(vec2(stream.normal(), stream.normal()));
    }
    EmpiricalMeasure a = EmpiricalMeasure::from_samples(xs);
    EmpiricalMeasure b = EmpiricalMeasure::from_samples(ys);
    CHECK(sliced_w1(a, b, 16, 7) < 0.02);
}

TEST_CASE("occupation_estimate: OU matches the analytic stationary law") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    measures::OccupationOptions opts;
    opts.master_seed = 2025;
    opts.n_paths = 8;
    opts.reservoir = 8192;
    EmpiricalMeasure m =
        measures::occupation_estimate(ou, vec1(1.0), make_params(1e-3, 2000.0, 0.2, 100.0), opts);
    EmpiricalMeasure oracle =
        EmpiricalMeasure::from_samples(gaussian_quantile_atoms(0.0, std::sqrt(0.02), 131072));
    CHECK(w1_distance_1d(m, oracle) < 0.01);
}

TEST_CASE("occupation_estimate: eps = 0 from an equilibrium is a Dirac bin") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    measures::OccupationOptions opts;
    opts.grid = GridSpec::uniform(vec1(-1.0), vec1(1.0), 32);
    EmpiricalMeasure m =
        measures::occupation_estimate(ou, vec1(0.0), make_params(1e-3, 10.0, 0.0, 1.0), opts);
    const auto idx = opts.grid->index_of(vec1(0.0));
    REQUIRE(idx.has_value());
    CHECK(m.mass_at(*idx) == doctest::Approx(1.0));
    CHECK(m.leak_mass() == doctest::Approx(0.0));
}

TEST_CASE("occupation_estimate pools bit-exactly under path splits") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    SimParams p = make_params(1e-3, 20.0, 0.2, 2.0);
    measures::OccupationOptions whole;
    whole.master_seed = 90;
    whole.n_paths = 10;
    whole.grid = GridSpec::uniform(vec1(-2.0), vec1(2.0), 64);
    EmpiricalMeasure pooled = measures::occupation_estimate(ou, vec1(1.0), p, whole);

    measures::OccupationOptions half = whole;
    half.n_paths = 5;
    EmpiricalMeasure a = measures::occupation_estimate(ou, vec1(1.0), p, half);
    // Second half: same master seed, paths 5..9.
    EmpiricalMeasure b(1, whole.grid, half.reservoir);
    {
        EnsembleOptions ens{90, 5, 0, 5, 64};
        b = run_ensemble<EmpiricalMeasure>(
            ens,
            [&](std::size_t path, RngStream& stream) {
                EmpiricalMeasure acc(1, whole.grid, half.reservoir);
                em_run(ou, vec1(1.0), p, stream, [&](std::size_t step, double t, const Vec& x) {
                    if (t < p.burn_in) return;
                    acc.add(x, sample_priority(90, path, step));
                });
                return acc;
            },
            EmpiricalMeasure(1, whole.grid, half.reservoir),
            [](EmpiricalMeasure& acc, std::size_t, EmpiricalMeasure&& part) { acc.merge(part); },
            [](EmpiricalMeasure& acc, EmpiricalMeasure&& part) { acc.merge(part); });
    }
    a.merge(b);
    CHECK(a.total_samples() == pooled.total_samples());
    const auto ra = a.reservoir();
    const auto rp = pooled.reservoir();
    REQUIRE(ra.size() == rp.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i] == rp[i]);
    const auto ma = a.masses();
    const auto mp = pooled.masses();
    for (std::size_t i = 0; i < ma.size(); ++i) CHECK(ma[i] == mp[i]);
}

TEST_CASE("support_mass basics and monotonicity in delta") {
    auto candidates = point_candidates({{"origin", vec1(0.0)}});
    EmpiricalMeasure dirac = EmpiricalMeasure::from_samples({vec1(0.0), vec1(0.0)});
    CHECK(measures::support_mass(dirac, candidates, 0.1) == doctest::Approx(1.0));

    RngStream stream(8, 0);
    std::vector<Vec> uniform;
    for (int i = 0; i < 20000; ++i) uniform.push_back(vec1(stream.uniform()));
    EmpiricalMeasure u = EmpiricalMeasure::from_samples(uniform);
    CHECK(measures::support_mass(u, candidates, 0.25) == doctest::Approx(0.25).epsilon(0.05));

    double prev = 0.0;
    for (double delta : {0.1, 0.2, 0.4, 0.8}) {
        const double mass = measures::support_mass(u, candidates, delta);
        CHECK(mass >= prev);
        prev = mass;
    }

    dynamics::CandidateSet empty;
    CHECK_THROWS_AS(measures::support_mass(u, empty, 0.1), Error);
}

TEST_CASE("tightness_scan: Gaussian tails and Dirac fixtures") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    measures::OccupationOptions opts;
    opts.master_seed = 55;
    opts.n_paths = 4;
    std::vector<EmpiricalMeasure> family;
    for (double eps : {0.2, 0.1})
        family.push_back(
            measures::occupation_estimate(ou, vec1(0.5), make_params(1e-3, 300.0, eps, 20.0), opts));
    std::vector<std::pair<double, const EmpiricalMeasure*>> refs = {{0.2, &family[0]},
                                                                    {0.1, &family[1]}};
    measures::TightnessTable table = measures::tightness_scan(refs, {1.0, 2.0}, 0.01);
    CHECK(table.sup_outside[0] < 1e-10);
    CHECK(table.pass);

    EmpiricalMeasure dirac = EmpiricalMeasure::from_samples({vec1(0.0)});
    std::vector<std::pair<double, const EmpiricalMeasure*>> single = {{0.1, &dirac}};
    measures::TightnessTable dt = measures::tightness_scan(single, {0.5, 1.0}, 0.01);
    CHECK(dt.sup_outside[0] == doctest::Approx(0.0));
    CHECK(dt.pass);
}

TEST_CASE("convergence_sweep: constant-in-eps model has identical measures") {
    ModelSpec frozen = zoo::build(zoo::OuParams{1});
    frozen.diffusion = [](const Vec&) { return Mat(Mat::Zero(1, 1)); };
    auto candidates = point_candidates({{"origin", vec1(0.0)}});
    measures::SweepOptions opts;
    opts.occupation.master_seed = 14;
    opts.occupation.n_paths = 2;
    opts.delta = 0.1;
    measures::SweepReport report = measures::convergence_sweep(
        frozen, vec1(1.0), {0.4, 0.2, 0.1}, make_params(1e-3, 30.0, 0.0, 3.0), candidates, opts);
    CHECK(report.entries.size() == 3);
    CHECK(report.entries[1].w1_to_previous == doctest::Approx(0.0));
    CHECK(report.entries[2].w1_to_previous == doctest::Approx(0.0));
    CHECK(report.support_trend_ok);
    CHECK(report.w1_cauchy_ok);
}

TEST_CASE("convergence_sweep: OU support mass grows as eps shrinks") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    auto candidates = point_candidates({{"origin", vec1(0.0)}});
    measures::SweepOptions opts;
    opts.occupation.master_seed = 2026;
    opts.occupation.n_paths = 4;
    opts.delta = 0.1;
    opts.radii = {1.0, 2.0};
    measures::SweepReport report = measures::convergence_sweep(
        ou, vec1(1.0), {0.4, 0.2, 0.1}, make_params(1e-3, 500.0, 0.0, 50.0), candidates, opts);

    // Normal-CDF oracle at variance eps^2/2: mass of [-0.1, 0.1].
    auto oracle = [](double eps) {
        const double sd = eps / std::sqrt(2.0);
        return norm_cdf(0.1 / sd) - norm_cdf(-0.1 / sd);
    };
    CHECK(report.entries[0].support == doctest::Approx(oracle(0.4)).epsilon(0.15));
    CHECK(report.entries[1].support == doctest::Approx(oracle(0.2)).epsilon(0.15));
    CHECK(report.entries[2].support == doctest::Approx(oracle(0.1)).epsilon(0.15));
    CHECK(report.entries[0].support < report.entries[1].support);
    CHECK(report.entries[1].support < report.entries[2].support);
    CHECK(report.support_trend_ok);
}
