#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "dstc/errors.hpp"
#include "dstc/timing.hpp"
#include "oracles.hpp"

using namespace dstc;

TEST_CASE("t_max branches") {
    CHECK(t_max(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t_max(2.0, 1.0) == doctest::Approx(std::numbers::pi / (3.0 * std::sqrt(3.0))).epsilon(1e-13));
    CHECK(t_max(2.0, 1.0) == doctest::Approx(0.60460).epsilon(1e-5));
    CHECK(t_max(0.5, 1.0) == doctest::Approx(2.0 * std::log(2.0 + std::sqrt(3.0)) / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(t_max(0.5, 1.0) == doctest::Approx(1.52069).epsilon(1e-5));
    CHECK(t_max(3.0, 3.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("t_max against the Riccati integral") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lg(-3.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double gamma = std::pow(10.0, lg(rng));
        const double cap = std::pow(10.0, lg(rng));
        const double ref = oracle::t_max(gamma, cap);
        CHECK(t_max(gamma, cap) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("t_max rejects non-positive arguments") {
    CHECK_THROWS_AS((void)t_max(0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)t_max(1.0, -1.0), DomainError);
    CHECK_THROWS_AS((void)t_max(std::nan(""), 1.0), DomainError);
}

TEST_CASE("t_max near the singular arctanh end stays finite") {
    const double v = t_max(1e-9, 1.0);
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(oracle::t_max(1e-9, 1.0)).epsilon(1e-8));
}

TEST_CASE("t_tilde_max values") {
    CHECK(t_tilde_max(0.5, 1.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(t_tilde_max(1.0 - 1e-9, 1.0, 1.0) < 1e-9);
    const double near = t_tilde_max(0.01, 1.0, 1.0);
    CHECK(near < 1.0);
    CHECK(near > 0.95);
    CHECK_THROWS_AS((void)t_tilde_max(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)t_tilde_max(1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("t_tilde_max against quadrature") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    std::uniform_real_distribution<double> lam(0.001, 0.999);
    for (int k = 0; k < 300; ++k) {
        const double g = std::pow(10.0, lg(rng));
        const double cap = std::pow(10.0, lg(rng));
        const double l = lam(rng);
        CHECK(t_tilde_max(l, g, cap) == doctest::Approx(oracle::t_tilde_max(l, g, cap)).epsilon(1e-9));
    }
}

TEST_CASE("solve_lambda_for_horizon") {
    CHECK(solve_lambda_for_horizon(t_tilde_max(0.5, 1.0, 1.0), 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    const double l_small_h = solve_lambda_for_horizon(1e-8, 1.0, 1.0);
    CHECK(l_small_h > 0.999);
    CHECK(l_small_h < 1.0);
    const double h = 0.99 * t_max(2.0, 1.0);
    const double l = solve_lambda_for_horizon(h, 2.0, 1.0);
    CHECK(l > 0.0);
    CHECK(l < 0.05);
    CHECK(std::abs(t_tilde_max(l, 2.0, 1.0) - h) <= 1e-10);
    CHECK_THROWS_AS((void)solve_lambda_for_horizon(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)solve_lambda_for_horizon(1.0, 1.0, 1.0), NoSolutionError);
    CHECK_THROWS_AS((void)solve_lambda_for_horizon(2.0, 1.0, 1.0), NoSolutionError);
}

TEST_CASE("phi_solve endpoints and bounds") {
    const PhiSolution phi = phi_solve(0.5, 1.0, 1.0);
    CHECK(phi(0.0) == 2.0);
    CHECK(phi.horizon() == doctest::Approx(1.0 / 3.0));
    CHECK(phi(phi.horizon()) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(phi(1.0 / 6.0) == doctest::Approx(oracle::phi_reference(0.5, 1.0, 1.0, 1.0 / 6.0)).epsilon(1e-9));

    const PhiSolution p2 = phi_solve(0.2, 2.0, 1.0);
    double lo = 1e9;
    double prev = 1e9;
    for (int k = 0; k <= 4000; ++k) {
        const double v = p2(p2.horizon() * k / 4000.0);
        lo = std::min(lo, v);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(lo >= 0.2 - 1e-6);
    CHECK_THROWS_AS((void)phi(-1.0), DomainError);
    CHECK_THROWS_AS((void)phi(phi.horizon() * 1.01), DomainError);
}

TEST_CASE("u_value") {
    CHECK(u_value(3.0, 0.0, 1.0, 5.0) == 3.0);
    CHECK(u_value(1.0, 2.0, 0.5, 1.0) == 3.0);
    CHECK(u_value(0.0, 0.0, 0.7, 2.0) == 0.0);
    CHECK(phi_rate(1.0, 1.0, 1.0) == -4.0);
}

TEST_CASE("TimingParams validation") {
    const TimingParams good{2.0, 1.0, 0.5};
    const TimingParams zero_gamma{0.0, 1.0, {}};
    const TimingParams lam_one{1.0, 1.0, 1.0};
    CHECK_NOTHROW(good.validate());
    CHECK_THROWS_AS(zero_gamma.validate(), DomainError);
    CHECK_THROWS_AS(lam_one.validate(), DomainError);
}
