#include <doctest.h>

#include <cmath>

#include "znl/calculus.hpp"
#include "znl/ensemble.hpp"
#include "znl/integrate.hpp"
#include "znl/zoo.hpp"
#include "test_support.hpp"

using namespace znl;
using namespace znl::testing;

namespace {

SimParams make_params(double dt, double t_final, double eps = 0.0) {
    SimParams p;
    p.dt = dt;
    p.t_final = t_final;
    p.epsilon = eps;
    return p;
}

}  // namespace

TEST_CASE("flow matches the analytic OU decay") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    PathSample path = flow(ou, vec1(1.0), make_params(1e-3, 1.0));
    CHECK(std::abs(path.last()[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("flow is constant from an equilibrium") {
    const ModelSpec lem = zoo::build(zoo::LemniscateParams{});
    PathSample path = flow(lem, vec2(std::sqrt(2.0), 0.0), make_params(1e-3, 5.0));
    CHECK((path.last() - vec2(std::sqrt(2.0), 0.0)).norm() < 1e-10);
}

TEST_CASE("flow lands on the unit cycle; radial ODE oracle") {
    // r' = r (1 - r^2) from r0 = 2 has r(t)^2 = r0^2 / (r0^2 - (r0^2 - 1) e^{-2t}),
    // within 1e-6 of 1 long before t = 50.
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    PathSample path = flow(cycle, vec2(2.0, 0.0), make_params(1e-3, 50.0));
    CHECK(std::abs(path.last().norm() - 1.0) < 1e-4);
}

TEST_CASE("flow semigroup property") {
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    const Vec x0 = vec2(1.5, -0.4);
    PathSample whole = flow(cycle, x0, make_params(1e-3, 3.0));
    PathSample first = flow(cycle, x0, make_params(1e-3, 1.0));
    PathSample second = flow(cycle, first.last(), make_params(1e-3, 2.0));
    CHECK((whole.last() - second.last()).norm() < 1e-6);
}

TEST_CASE("flow raises BlowUp on explosive drift") {
    ModelSpec cubic;
    cubic.dim = 1;
    cubic.brownian_dim = 1;
    cubic.label = "cubic_explosion";
    cubic.drift = [](const Vec& x) { return Vec(x.array().pow(3).matrix()); };
    cubic.diffusion = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
    try {
        flow(cubic, vec1(5.0), make_params(1e-3, 10.0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BlowUp);
    }
}

TEST_CASE("em_path with eps = 0 is the Euler recursion") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    RngStream stream = derive_stream(3, 0);
    PathSample path = em_path(ou, vec1(1.0), make_params(1e-2, 1.0), stream);
    double x = 1.0;
    for (int i = 0; i < 100; ++i) x += -x * 1e-2;
    CHECK(path.last()[0] == x);  // bit-exact
}

TEST_CASE("em_path rejects unconverted Stratonovich models") {
    ModelSpec strat = zoo::build(zoo::MayLeonardParams{1.2, 0.9});
    RngStream stream = derive_stream(3, 1);
    try {
        em_path(strat, vec3(0.3, 0.3, 0.3), make_params(1e-3, 0.1, 0.1), stream);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::StratonovichNotConverted);
    }
}

TEST_CASE("OU long-run variance matches the Fokker-Planck value") {
    // Stationary variance of dX = -X dt + eps dW is eps^2 / 2 = 0.02.
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    SimParams p = make_params(1e-3, 1100.0, 0.2);
    p.burn_in = 100.0;
    RngStream stream = derive_stream(17, 0);
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    em_run(ou, vec1(1.0), p, stream, [&](std::size_t, double t, const Vec& x) {
        if (t < p.burn_in) return;
        sum += x[0];
        sum_sq += x[0] * x[0];
        ++n;
    });
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(var - 0.02) < 0.003);
}

TEST_CASE("compensated pure-jump martingale keeps the ensemble mean at zero") {
    ModelSpec jump;
    jump.dim = 1;
    jump.brownian_dim = 1;
    jump.label = "pure_jump";
    jump.drift = [](const Vec&) { return Vec(Vec::Zero(1)); };
    jump.diffusion = [](const Vec&) { return Mat(Mat::Zero(1, 1)); };
    JumpCatalogue catalogue;
    catalogue.mark_dim = 1;
    catalogue.truncation_radius = 2.0;
    catalogue.jump_map = [](const Vec&, const Vec& y) { return y; };
    catalogue.atoms.push_back({vec1(1.0), 1.0});
    jump.jumps = catalogue;

    SimParams p = make_params(1e-2, 10.0, 1.0);
    EnsembleOptions opts{101, 4000, 0, 0, 64};
    struct Acc {
        double sum = 0.0, sum_sq = 0.0;
        std::uint64_t n = 0;
    };
    Acc acc = run_ensemble<Acc>(
        opts,
        [&](std::size_t, RngStream& stream) { return em_path(jump, vec1(0.0), p, stream).last()[0]; },
        Acc{},
        [](Acc& a, std::size_t, double v) {
            a.sum += v;
            a.sum_sq += v * v;
            ++a.n;
        },
        [](Acc& a, Acc&& b) {
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            a.n += b.n;
        });
    const double mean = acc.sum / acc.n;
    const double se = std::sqrt((acc.sum_sq / acc.n - mean * mean) / acc.n);
    CHECK(std::abs(mean) < 4.0 * se + 1e-12);
}

TEST_CASE("coupled_pair is degenerate at eps = 0 and scales like the mean-square bound") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    {
        RngStream stream = derive_stream(19, 0);
        auto [xe, xd] = coupled_pair(ou, vec1(1.0), make_params(1e-3, 1.0, 0.0), stream);
        bool identical = true;
        for (std::size_t i = 0; i < xe.states.size(); ++i)
            identical = identical && (xe.states[i] == xd.states[i]);
        CHECK(identical);
    }

    // E sup_t |X^eps - X^0|^2 / eps^2 is eps-independent for the linear model;
    // shared master seed keeps the Monte-Carlo ratios tight.
    auto sup_sq = [&](double eps) {
        SimParams p = make_params(1e-3, 1.0, eps);
        EnsembleOptions opts{23, 2000, 0, 0, 64};
        struct Acc {
            double sum = 0.0;
            std::uint64_t n = 0;
        };
        Acc acc = run_ensemble<Acc>(
            opts,
            [&](std::size_t, RngStream& stream) {
                double worst = 0.0;
                coupled_run(ou, vec1(1.0), p, stream,
                            [&](std::size_t, double, const Vec& a, const Vec& b) {
                                worst = std::max(worst, (a - b).squaredNorm());
                            });
                return worst;
            },
            Acc{},
            [](Acc& a, std::size_t, double v) {
                a.sum += v;
                ++a.n;
            },
            [](Acc& a, Acc&& b) {
                a.sum += b.sum;
                a.n += b.n;
            });
        return acc.sum / acc.n;
    };
    const double r1 = sup_sq(0.1) / (0.1 * 0.1);
    const double r2 = sup_sq(0.05) / (0.05 * 0.05);
    const double r3 = sup_sq(0.025) / (0.025 * 0.025);
    const double lo = std::min({r1, r2, r3});
    const double hi = std::max({r1, r2, r3});
    CHECK(hi / lo < 1.5);
}

TEST_CASE("coupled_pair deviation probabilities decay on the lemniscate") {
    const ModelSpec lem = zoo::build(zoo::LemniscateParams{});
    auto deviation_prob = [&](double eps) {
        SimParams p = make_params(1e-3, 1.0, eps);
        EnsembleOptions opts{29, 10000, 0, 0, 64};
        struct Acc {
            std::uint64_t hits = 0, n = 0;
        };
        Acc acc = run_ensemble<Acc>(
            opts,
            [&](std::size_t, RngStream& stream) {
                Vec xe, xd;
                coupled_run(lem, vec2(3.0, 0.0), p, stream,
                            [&](std::size_t, double, const Vec& a, const Vec& b) {
                                xe = a;
                                xd = b;
                            });
                return (xe - xd).norm() >= 0.5 ? 1.0 : 0.0;
            },
            Acc{},
            [](Acc& a, std::size_t, double v) {
                a.hits += v > 0.5 ? 1 : 0;
                ++a.n;
            },
            [](Acc& a, Acc&& b) {
                a.hits += b.hits;
                a.n += b.n;
            });
        return static_cast<double>(acc.hits) / static_cast<double>(acc.n);
    };
    const double p4 = deviation_prob(0.4);
    const double p2 = deviation_prob(0.2);
    const double p1 = deviation_prob(0.1);
    const double p05 = deviation_prob(0.05);
    CHECK(p4 >= p2 - 0.01);
    CHECK(p2 >= p1 - 0.01);
    CHECK(p1 >= p05 - 0.01);
    CHECK(p05 < p4);
}

TEST_CASE("Euler strong order on the OU model: error halves with dt") {
    // Additive noise makes Euler-Maruyama effectively strong order 1 here:
    // E sup |X^dt - X^{dt/2}| should drop by about half when dt halves.
    const double eps = 0.3;
    auto coupled_error = [&](double dt, RngStream& stream) {
        const std::size_t n = static_cast<std::size_t>(std::llround(1.0 / dt));
        const std::vector<Vec> fine = brownian_increments(stream, 1, 2 * n, dt / 2.0);
        double coarse = 1.0, finer = 1.0, worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = fine[2 * i][0] + fine[2 * i + 1][0];
            coarse += -coarse * dt + eps * w;
            finer += -finer * (dt / 2.0) + eps * fine[2 * i][0];
            finer += -finer * (dt / 2.0) + eps * fine[2 * i + 1][0];
            worst = std::max(worst, std::abs(coarse - finer));
        }
        return worst;
    };
    double err_a = 0.0, err_b = 0.0;
    const int n_paths = 400;
    for (int i = 0; i < n_paths; ++i) {
        RngStream sa = derive_stream(31, static_cast<std::uint64_t>(i));
        err_a += coupled_error(1e-2, sa);
        RngStream sb = derive_stream(31, static_cast<std::uint64_t>(i));
        err_b += coupled_error(5e-3, sb);
    }
    CHECK(err_a / err_b >= 1.7);
    CHECK(err_a / err_b <= 2.6);
}

TEST_CASE("run_ensemble: single path equals a direct call") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    SimParams p = make_params(1e-3, 2.0, 0.3);
    EnsembleOptions opts{57, 1, 0, 0, 64};
    const double via_ensemble = run_ensemble<double>(
        opts, [&](std::size_t, RngStream& s) { return em_path(ou, vec1(1.0), p, s).last()[0]; }, 0.0,
        [](double& acc, std::size_t, double v) { acc += v; }, [](double& acc, double&& v) { acc += v; });
    RngStream direct = derive_stream(57, 0);
    CHECK(via_ensemble == em_path(ou, vec1(1.0), p, direct).last()[0]);
}

TEST_CASE("run_ensemble: OU ensemble mean matches the analytic decay") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    SimParams p = make_params(1e-3, 5.0, 0.2);
    EnsembleOptions opts{42, 10000, 0, 0, 64};
    struct Acc {
        double sum = 0.0;
        std::uint64_t n = 0;
    };
    Acc acc = run_ensemble<Acc>(
        opts, [&](std::size_t, RngStream& s) { return em_path(ou, vec1(1.0), p, s).last()[0]; }, Acc{},
        [](Acc& a, std::size_t, double v) {
            a.sum += v;
            ++a.n;
        },
        [](Acc& a, Acc&& b) {
            a.sum += b.sum;
            a.n += b.n;
        });
    CHECK(std::abs(acc.sum / acc.n - std::exp(-5.0)) < 0.01);
}

TEST_CASE("run_ensemble is bit-identical across worker counts") {
    const ModelSpec ou = zoo::build(zoo::OuParams{2});
    SimParams p = make_params(1e-3, 1.0, 0.5);
    auto reduce = [&](int threads) {
        EnsembleOptions opts{7, 503, threads, 0, 64};
        struct Acc {
            double sum = 0.0;
        };
        return run_ensemble<Acc>(
                   opts,
                   [&](std::size_t, RngStream& s) {
                       return em_path(ou, vec2(1.0, -1.0), p, s).last().sum();
                   },
                   Acc{}, [](Acc& a, std::size_t, double v) { a.sum += v; },
                   [](Acc& a, Acc&& b) { a.sum += b.sum; })
            .sum;
    };
    const double one = reduce(1);
    const double eight = reduce(8);
    CHECK(one == eight);  // bit-exact
}

TEST_CASE("run_ensemble reports the smallest failing path index") {
    EnsembleOptions opts{0, 100, 4, 0, 8};
    try {
        run_ensemble<int>(
            opts,
            [&](std::size_t i, RngStream&) {
                if (i >= 40) fail(Errc::BlowUp, "synthetic failure");
                return 0;
            },
            0, [](int&, std::size_t, int) {}, [](int&, int&&) {});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BlowUp);
        CHECK(std::string(e.what()).find("path 40") != std::string::npos);
    }
}

TEST_CASE("noise record aligns with the path") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    SimParams p = make_params(1e-2, 0.5, 0.3);
    p.record_noise = true;
    RngStream stream = derive_stream(3, 9);
    PathSample path = em_path(ou, vec1(1.0), p, stream);
    REQUIRE(path.noise.has_value());
    CHECK(path.noise->brownian.size() + 1 == path.states.size());
    CHECK(path.noise->epsilon == 0.3);

    // Replaying the recorded increments (mirroring the scheme's two-stage
    // update) reproduces the path bit-exactly.
    double x = 1.0;
    for (std::size_t i = 0; i < path.noise->brownian.size(); ++i) {
        x = x + p.dt * -x;
        x = x + p.epsilon * path.noise->brownian[i][0];
    }
    CHECK(x == path.last()[0]);
}
