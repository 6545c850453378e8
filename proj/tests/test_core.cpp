#include <doctest.h>

#include <cmath>

#include "znl/calculus.hpp"
#include "znl/model.hpp"
#include "znl/rng.hpp"
#include "znl/zoo.hpp"
#include "test_support.hpp"

using namespace znl;
using namespace znl::testing;

TEST_CASE("eval_drift on the zoo fixtures") {
    const ModelSpec cycle = zoo::build(zoo::LimitCycleParams{});
    // x - y - x(x^2+y^2) = 1 - 0 - 1 = 0, x + y - y(...) = 1 at (1, 0).
    Vec b = eval_drift(cycle, vec2(1.0, 0.0));
    CHECK(b[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-14));

    const ModelSpec ou = zoo::build(zoo::OuParams{1});
    CHECK(eval_drift(ou, vec1(2.0))[0] == doctest::Approx(-2.0));

    const ModelSpec lem = zoo::build(zoo::LemniscateParams{});
    CHECK(eval_drift(lem, vec2(0.0, 0.0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("eval_drift rejects bad input") {
    const ModelSpec ou = zoo::build(zoo::OuParams{2});
    CHECK_THROWS_AS(eval_drift(ou, vec1(1.0)), Error);

    ModelSpec nan_model = ou;
    nan_model.drift = [](const Vec& x) { return Vec(x * std::nan("")); };
    try {
        eval_drift(nan_model, vec2(1.0, 1.0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonFiniteOutput);
    }
}

TEST_CASE("jacobian_fd identity and linear maps") {
    auto identity = [](const Vec& x) { return x; };
    Mat jac = jacobian_fd(identity, vec2(0.3, -0.7));
    CHECK((jac - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0).epsilon(1e-10));

    Mat a(2, 2);
    a << 2.0, -1.0, 0.5, 3.0;
    auto linear = [&a](const Vec& x) { return Vec(a * x); };
    // Binary-fraction steps keep the arithmetic exact at the small-h end,
    // where decimal steps would drown the 1e-10 bound in cancellation noise.
    for (double h : {0x1p-19, 0x1p-13, 1e-5, 1e-4, 1e-3}) {
        Mat jl = jacobian_fd(linear, vec2(1.0, 2.0), h);
        CHECK((jl - a).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("jacobian_fd reproduces the published lemniscate linearizations") {
    const ModelSpec lem = zoo::build(zoo::LemniscateParams{});

    Mat at_origin = jacobian_fd(lem.drift, vec2(0.0, 0.0));
    Mat expected_origin(2, 2);
    expected_origin << 0.0, -8.0, -8.0, 0.0;
    CHECK((at_origin - expected_origin).lpNorm<Eigen::Infinity>() < 1e-6);

    const double p74 = std::pow(17.0, 1.75);
    const double p118 = std::pow(17.0, 1.375);
    Mat expected_focus(2, 2);
    expected_focus << 16.0 * 20.0 / p74, -16.0 * 5.0 / p118, 16.0 * 5.0 / p118, 16.0 * 20.0 / p74;
    Mat at_focus = jacobian_fd(lem.drift, vec2(std::sqrt(2.0), 0.0));
    CHECK((at_focus - expected_focus).lpNorm<Eigen::Infinity>() < 1e-5);

    // The zoo's analytic Jacobian agrees with finite differences everywhere.
    RngStream stream(7, 0);
    for (int i = 0; i < 50; ++i) {
        Vec x = vec2(4.0 * stream.uniform() - 2.0, 4.0 * stream.uniform() - 2.0);
        CHECK((lem.drift_jacobian(x) - jacobian_fd(lem.drift, x)).lpNorm<Eigen::Infinity>() < 1e-5);
    }
}

TEST_CASE("stratonovich_to_ito corrections") {
    // Constant diffusion: the correction vanishes.
    ModelSpec constant;
    constant.dim = 1;
    constant.brownian_dim = 1;
    constant.noise_kind = NoiseKind::Stratonovich;
    constant.drift = [](const Vec& x) { return Vec(-x); };
    constant.diffusion = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
    constant.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>{Mat::Zero(1, 1)}; };
    ModelSpec converted = stratonovich_to_ito(constant);
    CHECK(converted.noise_kind == NoiseKind::Ito);
    CHECK(converted.ito_correction(vec1(3.0)).norm() == doctest::Approx(0.0));
    CHECK(converted.effective_drift(vec1(2.0), 0.5)[0] == doctest::Approx(-2.0));

    // sigma(x) = x gains +x/2 per unit eps^2.
    ModelSpec scalar = constant;
    scalar.diffusion = [](const Vec& x) {
        Mat s(1, 1);
        s(0, 0) = x[0];
        return s;
    };
    scalar.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>{Mat::Identity(1, 1)}; };
    ModelSpec sc = stratonovich_to_ito(scalar);
    CHECK(sc.ito_correction(vec1(2.0))[0] == doctest::Approx(1.0));

    // May-Leonard carries the precomputed +y/2 correction.
    const ModelSpec ml = stratonovich_to_ito(zoo::build(zoo::MayLeonardParams{0.8, 0.7}));
    Vec y = vec3(0.2, 0.4, 0.6);
    CHECK((ml.ito_correction(y) - 0.5 * y).norm() == doctest::Approx(0.0));

    try {
        ModelSpec missing = constant;
        missing.diffusion_jacobian = nullptr;
        stratonovich_to_ito(missing);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingJacobian);
    }
}

TEST_CASE("paired-path oracle validates the scalar Stratonovich conversion") {
    // Heun (Stratonovich) stepping of dX = -X dt + eps X o dW versus
    // Euler-Maruyama on the converted Ito drift, same Brownian path.
    ModelSpec strat;
    strat.dim = 1;
    strat.brownian_dim = 1;
    strat.noise_kind = NoiseKind::Stratonovich;
    strat.drift = [](const Vec& x) { return Vec(-x); };
    strat.diffusion = [](const Vec& x) {
        Mat s(1, 1);
        s(0, 0) = x[0];
        return s;
    };
    strat.diffusion_jacobian = [](const Vec&) { return std::vector<Mat>{Mat::Identity(1, 1)}; };
    const ModelSpec ito = stratonovich_to_ito(strat);

    const double eps = 0.5, dt = 1e-4, t_final = 1.0;
    const std::size_t n = static_cast<std::size_t>(t_final / dt);
    RngStream stream(11, 0);
    const std::vector<Vec> dw = brownian_increments(stream, 1, n, dt);

    double x_heun = 1.0, x_em = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = dw[i][0];
        // Heun: predictor-corrector in the noise term (Stratonovich midpoint).
        const double pred = x_heun + (-x_heun) * dt + eps * x_heun * w;
        x_heun += (-x_heun) * dt + 0.5 * eps * (x_heun + pred) * w;
        x_em += (-x_em + eps * eps * 0.5 * x_em) * dt + eps * x_em * w;
    }
    CHECK(std::abs(x_heun - x_em) < 50.0 * dt);
}

TEST_CASE("zoo equilibria are drift roots") {
    const ModelSpec lem = zoo::build(zoo::LemniscateParams{});
    for (const Vec& eq : zoo::lemniscate_equilibria()) CHECK(lem.drift(eq).norm() < 1e-10);

    zoo::MayLeonardParams mlp{0.8, 0.7};
    const ModelSpec ml = zoo::build(mlp);
    for (const auto& [label, eq] : zoo::may_leonard_equilibria(mlp)) {
        INFO(label);
        CHECK(ml.drift(eq).norm() < 1e-10);
    }

    const ModelSpec ci = zoo::build(zoo::ChafeeInfanteParams{4.0, 16});
    CHECK(ci.drift(Vec::Zero(16)).norm() == doctest::Approx(0.0));
}

TEST_CASE("jump catalogue validation") {
    JumpCatalogue catalogue;
    catalogue.mark_dim = 1;
    catalogue.truncation_radius = 2.0;
    catalogue.jump_map = [](const Vec&, const Vec& y) { return y; };
    catalogue.atoms.push_back({vec1(1.0), 2.0});
    catalogue.validate(1);
    CHECK(catalogue.total_rate() == doctest::Approx(2.0));
    CHECK(catalogue.compensator(vec1(0.0), 1)[0] == doctest::Approx(2.0));

    catalogue.atoms.push_back({vec1(5.0), 1.0});  // outside truncation radius
    CHECK_THROWS_AS(catalogue.validate(1), Error);
}
