#include <doctest.h>

#include <cmath>

#include "znl/calculus.hpp"
#include "znl/generator.hpp"
#include "znl/zoo.hpp"
#include "test_support.hpp"

using namespace znl;
using namespace znl::testing;

namespace {

LyapunovSpec squared_norm_spec(int dim) {
    LyapunovSpec V;
    V.value = [](const Vec& x) { return x.squaredNorm(); };
    V.gradient = [](const Vec& x) { return Vec(2.0 * x); };
    V.hessian = [dim](const Vec&) { return Mat(2.0 * Mat::Identity(dim, dim)); };
    return V;
}

}  // namespace

TEST_CASE("generator of a constant function vanishes") {
    LyapunovSpec V;
    V.value = [](const Vec&) { return 3.0; };
    V.gradient = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    V.hessian = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    CHECK(generator_apply(V, cycle, 0.7, vec2(1.3, -0.2)) == doctest::Approx(0.0));
}

TEST_CASE("generator matches the displayed limit-cycle formula exactly") {
    // L^eps V = 2 r^2 (1 - r^2) + 2 eps^2 r^4 for V = x^2 + y^2.
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    const LyapunovSpec V = squared_norm_spec(2);
    RngStream stream(2024, 0);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = vec2(4.0 * stream.uniform() - 2.0, 4.0 * stream.uniform() - 2.0);
        const double eps = stream.uniform();
        const double r2 = x.squaredNorm();
        const double expected = 2.0 * r2 * (1.0 - r2) + 2.0 * eps * eps * r2 * r2;
        CHECK(std::abs(generator_apply(V, cycle, eps, x) - expected) < 1e-10);
    }
}

TEST_CASE("generator on the OU fixture: symbolic expansion") {
    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    LyapunovSpec V = squared_norm_spec(1);
    CHECK(generator_apply(V, ou, 0.1, vec1(1.0)) == doctest::Approx(-1.99).epsilon(1e-12));
    // eps = 0 and no jumps reduces to <grad V, b>.
    CHECK(generator_apply(V, ou, 0.0, vec1(2.0)) == doctest::Approx(-8.0));
}

TEST_CASE("finite-difference Lyapunov derivatives agree with analytic ones") {
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    const LyapunovSpec analytic = squared_norm_spec(2);
    const LyapunovSpec fd = LyapunovSpec::from_value(analytic.value);
    RngStream stream(5, 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec x = sphere_sample(stream, 2, 5.0 * stream.uniform() + 1e-3);
        const double eps = 0.3;
        const double a = generator_apply(analytic, cycle, eps, x);
        const double b = generator_apply(fd, cycle, eps, x);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    CHECK(worst < 1e-5);

    std::vector<Vec> points;
    RngStream ps(6, 0);
    for (int i = 0; i < 20; ++i) points.push_back(sphere_sample(ps, 2, 1.0 + ps.uniform()));
    CHECK(fd.cross_check(points) < 1e-4);
}

TEST_CASE("jump term scales as O(eps^2)") {
    ModelSpec jump = zoo::build(zoo::OuParams{1});
    JumpCatalogue catalogue;
    catalogue.mark_dim = 1;
    catalogue.truncation_radius = 2.0;
    catalogue.jump_map = [](const Vec&, const Vec& y) { return y; };
    catalogue.atoms.push_back({vec1(1.0), 1.5});
    catalogue.atoms.push_back({vec1(-0.5), 1.0});
    jump.jumps = catalogue;

    // Smooth non-quadratic V so the Taylor remainder is the whole jump term.
    LyapunovSpec V;
    V.value = [](const Vec& x) { return std::cosh(x[0]); };
    V.gradient = [](const Vec& x) { return Vec(vec1(std::sinh(x[0]))); };
    V.hessian = [](const Vec& x) {
        Mat h(1, 1);
        h(0, 0) = std::cosh(x[0]);
        return h;
    };
    ModelSpec no_jump = jump;
    no_jump.jumps.reset();

    const Vec x = vec1(0.4);
    for (double eps : {0.2, 0.1, 0.05}) {
        const double with = generator_apply(V, jump, eps, x) - generator_apply(V, no_jump, eps, x);
        const double half = generator_apply(V, jump, eps / 2.0, x) -
                            generator_apply(V, no_jump, eps / 2.0, x);
        const double ratio = with / half;
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
}

TEST_CASE("lyapunov_scan on the limit cycle reproduces the exact shell values") {
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    const LyapunovSpec V = squared_norm_spec(2);
    RngStream stream(77, 0);
    LyapunovScan scan = lyapunov_scan(V, cycle, 0.1, {2.0, 4.0, 8.0}, 64, stream);

    // V and L^eps V depend only on the radius, so shell sampling is exact:
    // A_R = -L^eps V at |x| = R (the sup over {R, 1.5R, 2R} sits at R).
    auto exact = [](double r, double eps) {
        const double r2 = r * r;
        return -(2.0 * r2 * (1.0 - r2) + 2.0 * eps * eps * r2 * r2);
    };
    CHECK(scan.rows[0].a_r == doctest::Approx(exact(2.0, 0.1)).epsilon(1e-9));
    CHECK(scan.rows[0].a_r == doctest::Approx(23.68).epsilon(0.05));
    CHECK(scan.rows[1].a_r == doctest::Approx(exact(4.0, 0.1)).epsilon(1e-9));
    CHECK(scan.rows[2].a_r == doctest::Approx(exact(8.0, 0.1)).epsilon(1e-9));
    CHECK(scan.inf_v_increasing);
    CHECK(scan.a_r_increasing);
    CHECK(!scan.violation);
}

TEST_CASE("lyapunov_scan on OU with eps = 0 gives A_R = 2 R^2 exactly") {
    const ModelSpec ou = zoo::build(zoo::OuParams{2});
    const LyapunovSpec V = squared_norm_spec(2);
    RngStream stream(78, 0);
    LyapunovScan scan = lyapunov_scan(V, ou, 0.0, {1.0, 2.0, 4.0}, 32, stream);
    CHECK(scan.rows[0].a_r == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(scan.rows[1].a_r == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(scan.rows[2].a_r == doctest::Approx(32.0).epsilon(1e-9));
}

TEST_CASE("lyapunov_scan flags V = 0") {
    LyapunovSpec V;
    V.value = [](const Vec&) { return 0.0; };
    V.gradient = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    V.hessian = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
    const ModelSpec ou = zoo::build(zoo::OuParams{2});
    RngStream stream(79, 0);
    LyapunovScan scan = lyapunov_scan(V, ou, 0.1, {1.0, 2.0}, 16, stream);
    CHECK(scan.rows[0].inf_v == doctest::Approx(0.0));
    CHECK(scan.violation);
}

TEST_CASE("polynomial growth check: limit cycle and linear fixtures") {
    // <b, x> = r^2 - r^4 for the limit cycle, so -<b,x>/r^4 = 1 - 1/r^2:
    // the exact leading constant is 1 and the sampled minimum over shells
    // {4, 8} is 1 - 1/16 = 0.9375.
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    RngStream stream(80, 0);
    GrowthReport cycle_report = polynomial_growth_check(cycle, 4.0, {4.0, 8.0}, 128, stream);
    CHECK(cycle_report.pass);
    CHECK(cycle_report.c1 == doctest::Approx(0.9375).epsilon(1e-9));
    CHECK(cycle_report.c1 > 0.9);

    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    RngStream s2(80, 1);
    GrowthReport ou_report = polynomial_growth_check(ou, 2.0, {1.0, 3.0}, 64, s2);
    CHECK(ou_report.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ou_report.pass);

    ModelSpec repulsive = ou;
    repulsive.drift = [](const Vec& x) { return x; };
    RngStream s3(80, 2);
    GrowthReport bad = polynomial_growth_check(repulsive, 2.0, {1.0, 3.0}, 64, s3);
    CHECK(!bad.pass);
}

TEST_CASE("hopfield_condition arithmetic") {
    // gamma(4) = 9 [ (2*2 - 1) / (2 - 1)^2 + 1 ] = 36 (valid: e^3 > 4).
    HopfieldCondition cond = hopfield_condition(1.0, 1.0, 4.0, 0.2, 0.2);
    CHECK(cond.gamma == doctest::Approx(36.0).epsilon(1e-14));

    // Threshold grows without bound as kappa approaches e^{3 tau}.
    const double tau = 1.0;
    HopfieldCondition near = hopfield_condition(1e12, tau, std::exp(3.0 * tau) - 1e-9, 0.2, 0.2);
    CHECK(near.threshold > 1e12);
    CHECK(!near.satisfied);

    // Constant nonlinearity: zero threshold, any positive b passes.
    HopfieldCondition constant = hopfield_condition(0.5, 1.0, 4.0, 0.0, 0.7);
    CHECK(constant.threshold == doctest::Approx(0.0));
    CHECK(constant.satisfied);

    CHECK_THROWS_AS(hopfield_condition(1.0, 1.0, 0.5, 0.2, 0.2), Error);
    CHECK_THROWS_AS(hopfield_condition(1.0, 1.0, 30.0, 0.2, 0.2), Error);
}

TEST_CASE("hopfield zoo defaults satisfy the dissipativity condition") {
    const zoo::HopfieldParams p = zoo::HopfieldParams::defaults();
    HopfieldCondition cond =
        hopfield_condition(p.b_min(), p.tau, 4.0, p.lipschitz_g(), p.coupling_norm());
    CHECK(cond.satisfied);
}
