#include <cmath>
#include <random>

#include "doctest.h"

#include "dstc/errors.hpp"
#include "dstc/system.hpp"
#include "oracles.hpp"

using namespace dstc;

namespace {
Vector v2(double a, double b) {
    Vector x(2);
    x << a, b;
    return x;
}
}  // namespace

TEST_CASE("van der pol field") {
    const SystemSpec s = van_der_pol();
    CHECK(eval_f(s, v2(0, 0), v2(0, 0)).norm() == 0.0);
    CHECK((eval_f(s, v2(1, 0), v2(0, 0)) - v2(0, -1)).norm() == 0.0);
    CHECK(eval_f(s, v2(0, 0), v2(1, 1)).norm() == doctest::Approx(0.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 500; ++k) {
        const Eigen::Vector2d x(u(rng), u(rng));
        const Eigen::Vector2d e(u(rng), u(rng));
        const Vector f = eval_f(s, x, e);
        const Eigen::Vector2d ref = oracle::vdp_field(x, e);
        CHECK((f - ref).norm() <= 1e-12 * (1.0 + ref.norm()));
    }
}

TEST_CASE("van der pol sets and Lyapunov data") {
    const SystemSpec s = van_der_pol();
    CHECK(s.state_dim == 2);
    CHECK(s.x_radius == doctest::Approx(1.8617).epsilon(1e-4));
    CHECK(s.e_radius == doctest::Approx(2.0 * s.x_radius));
    CHECK(s.v(v2(-0.3, 1.7)) == doctest::Approx(9.5872).epsilon(1e-4));
    CHECK(s.v(v2(2, 2)) == doctest::Approx(41.76));
    CHECK(in_region(s, v2(0, 0)));
    CHECK_FALSE(in_region(s, v2(2, 2)));

    // boundary point of R
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s.p_matrix);
    const Vector vmin = es.eigenvectors().col(0) * s.x_radius;
    CHECK(s.v(vmin) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(in_region(s, vmin * (1.0 - 1e-12)));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const Vector x = v2(u(rng), u(rng));
        CHECK(s.v(x) == doctest::Approx(s.v(-x)));
        const double h = 1e-6;
        Vector g(2);
        for (int i = 0; i < 2; ++i) {
            Vector dx = Vector::Zero(2);
            dx(i) = h;
            g(i) = (s.v(x + dx) - s.v(x - dx)) / (2 * h);
        }
        CHECK((g - s.grad_v(x)).norm() <= 1e-6 * (1.0 + g.norm()));
        const double r = x.norm();
        CHECK(s.bounds.v_lower(r) <= s.v(x) + 1e-12);
        CHECK(s.v(x) <= s.bounds.v_upper(r) + 1e-12);
    }
}

TEST_CASE("region differences fit inside E") {
    const SystemSpec s = van_der_pol();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vector> pts;
    while (pts.size() < 300) {
        const Vector x = v2(u(rng), u(rng));
        if (in_region(s, x)) {
            pts.push_back(x);
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            CHECK((pts[i] - pts[j]).norm() <= s.e_radius);
        }
    }
}

TEST_CASE("default W and H") {
    const SystemSpec s = van_der_pol();
    CHECK(s.w(v2(0, 0)) == 0.0);
    CHECK(s.h_fn(v2(0, 0), v2(0, 0)) == 0.0);
    CHECK(s.h_fn(v2(1, 0), v2(0, 0)) == doctest::Approx(1.0));
    CHECK(s.w(v2(3, 4)) == doctest::Approx(5.0));
}

TEST_CASE("linear test system") {
    const SystemSpec s = linear_test(1, 1.0);
    Vector x(1), e(1);
    x << 0.5;
    e << 0.25;
    CHECK(eval_f(s, x, e)(0) == doctest::Approx(-0.75));
    CHECK(s.v(x) == doctest::Approx(0.25));
    CHECK(s.h_fn(x, e) == doctest::Approx(0.75));
    const SystemSpec s3 = linear_test(3, 2.0);
    CHECK(s3.state_dim == 3);
    CHECK(s3.x_radius == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS((void)linear_test(0), DomainError);
}

TEST_CASE("eval_f input checks") {
    const SystemSpec s = van_der_pol();
    Vector bad(3);
    bad.setZero();
    CHECK_THROWS_AS((void)eval_f(s, bad, v2(0, 0)), DomainError);
    CHECK_THROWS_AS((void)eval_f(s, v2(std::nan(""), 0), v2(0, 0)), DomainError);
    CHECK_NOTHROW(s.validate());
}
