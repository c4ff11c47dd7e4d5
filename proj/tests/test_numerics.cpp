#include <doctest.h>

#include <cmath>

#include "icbf/errors.hpp"
#include "icbf/numerics.hpp"
#include "icbf/rng.hpp"

using namespace icbf;

namespace {

const VectorField decay = [](double, const Vec& x, const Vec&) -> Vec { return {-x[0]}; };

double integrate_decay_max_error(double dt) {
    OdeState s{0.0, {1.0}};
    double max_err = 0.0;
    const int steps = static_cast<int>(std::llround(1.0 / dt));
    for (int i = 0; i < steps; ++i) {
        s = rk4_step(decay, s, {}, dt);
        max_err = std::max(max_err, std::abs(s.x[0] - std::exp(-s.t)));
    }
    return max_err;
}

Mat scalar(double v) { return Mat{{v}}; }

}  // namespace

TEST_CASE("rk4 zero field holds state") {
    const VectorField zero = [](double, const Vec& x, const Vec&) { return Vec(x.size(), 0.0); };
    OdeState s{0.0, {1.0}};
    s = rk4_step(zero, s, {}, 0.01);
    CHECK(s.x[0] == 1.0);
    CHECK(s.t == doctest::Approx(0.01));
}

TEST_CASE("rk4 exponential decay matches closed form") {
    OdeState s{0.0, {1.0}};
    for (int i = 0; i < 1000; ++i) s = rk4_step(decay, s, {}, 0.001);
    CHECK(std::abs(s.x[0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("rk4 harmonic oscillator closes one period") {
    const VectorField osc = [](double, const Vec& x, const Vec&) -> Vec {
        return {x[1], -x[0]};
    };
    OdeState s{0.0, {1.0, 0.0}};
    const double dt = 1e-3;
    const int steps = static_cast<int>(std::llround(2.0 * M_PI / dt));
    for (int i = 0; i < steps; ++i) s = rk4_step(osc, s, {}, dt);
    // land exactly on 2*pi for the comparison
    const double remainder = 2.0 * M_PI - steps * dt;
    if (remainder > 0) s = rk4_step(osc, s, {}, remainder);
    CHECK(std::abs(s.x[0] - 1.0) < 1e-6);
    CHECK(std::abs(s.x[1]) < 1e-6);
}

TEST_CASE("rk4 is fourth order on the decay problem") {
    const double e1 = integrate_decay_max_error(1e-2);
    const double e2 = integrate_decay_max_error(5e-3);
    const double e3 = integrate_decay_max_error(2.5e-3);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e2 / e3 >= 14.0);
    const double slope1 = std::log2(e1 / e2);
    const double slope2 = std::log2(e2 / e3);
    CHECK(slope1 >= 3.8);
    CHECK(slope2 >= 3.8);
}

TEST_CASE("rk4 reports non-finite field with time and state") {
    const VectorField bad = [](double, const Vec&, const Vec&) -> Vec {
        return {std::numeric_limits<double>::infinity()};
    };
    OdeState s{2.5, {1.0}};
    try {
        rk4_step(bad, s, {}, 0.01);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.t == doctest::Approx(2.5));
        CHECK(e.x.size() == 1);
    }
}

TEST_CASE("care scalar closed form") {
    Mat p = care_solve(scalar(-1.0), scalar(1.0), scalar(3.0), scalar(0.2));
    CHECK(p(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("care zero forcing gives zero") {
    Mat p = care_solve(scalar(-1.0), scalar(0.0), scalar(0.0), scalar(1.0));
    CHECK(p(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("care integrator with unit weights") {
    Mat p = care_solve(scalar(0.0), scalar(1.0), scalar(1.0), scalar(1.0));
    CHECK(p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("care double integrator matches known solution") {
    Mat a{{0.0, 1.0}, {0.0, 0.0}};
    Mat b{{0.0}, {1.0}};
    Mat p = care_solve(a, b, Mat::identity(2), scalar(1.0));
    CHECK(p(0, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
    CHECK(p(0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p(1, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
}

TEST_CASE("care residual bound holds on random stabilizable problems") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        Mat b(n, 1);
        for (int i = 0; i < n; ++i) b(i, 0) = rng.uniform(-1.0, 1.0) + (i == n - 1 ? 1.5 : 0.0);
        Mat q = Mat::identity(n);
        Mat r = scalar(1.0 + rng.uniform());
        Mat p = care_solve(a, b, q, r);
        Mat res = a.transpose() * p + p * a - p * b * inverse(r) * b.transpose() * p + q;
        CHECK(max_abs(res) <= 1e-9);
    }
}

TEST_CASE("care rejects non-stabilizable scalar problem") {
    CHECK_THROWS_AS(care_solve(scalar(1.0), scalar(0.0), scalar(1.0), scalar(1.0)),
                    NumericalError);
}

TEST_CASE("lqr gain examples") {
    CHECK(lqr_gain(scalar(-1.0), scalar(1.0), scalar(3.0), scalar(0.2))(0, 0) ==
          doctest::Approx(3.0).epsilon(1e-10));
    CHECK(lqr_gain(scalar(-1.0), scalar(0.0), scalar(0.0), scalar(1.0))(0, 0) ==
          doctest::Approx(0.0));
    CHECK(lqr_gain(scalar(0.0), scalar(1.0), scalar(1.0), scalar(1.0))(0, 0) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lqr closed loop is Hurwitz") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        Mat b(n, 1);
        for (int i = 0; i < n; ++i) b(i, 0) = rng.uniform(0.5, 1.5);
        Mat k = lqr_gain(a, b, Mat::identity(n), scalar(0.7));
        for (double re : eig_real_parts(a - b * k)) CHECK(re < 0.0);
    }
}

TEST_CASE("lyapunov scalar and diagonal cases") {
    CHECK(lyapunov_solve(scalar(-4.0), scalar(1.0))(0, 0) == doctest::Approx(0.125));
    Mat p = lyapunov_solve(-1.0 * Mat::identity(2), Mat::identity(2));
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(p(1, 1) == doctest::Approx(0.5));
    CHECK(p(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("lyapunov general case satisfies equation") {
    Mat acl{{0.0, 1.0}, {-2.0, -3.0}};
    Mat q = Mat::identity(2);
    Mat p = lyapunov_solve(acl, q);
    CHECK(max_abs(acl.transpose() * p + p * acl + q) <= 1e-10);
    CHECK(std::abs(p(0, 1) - p(1, 0)) <= 1e-12);
    for (double re : eig_real_parts(p)) CHECK(re > 0.0);
}

TEST_CASE("lyapunov rejects non-Hurwitz closed loop") {
    CHECK_THROWS_AS(lyapunov_solve(scalar(0.5), scalar(1.0)), InfeasibleError);
}

TEST_CASE("ultimate bound values") {
    CHECK(ultimate_bound(scalar(0.125), scalar(1.0), 0.0) == doctest::Approx(0.0));
    CHECK(ultimate_bound(scalar(0.5), scalar(1.0), 1.0) == doctest::Approx(1.0));
    CHECK(ultimate_bound(scalar(0.125), scalar(1.0), 0.4) == doctest::Approx(0.2));
}

TEST_CASE("ultimate bound rejects indefinite inputs") {
    CHECK_THROWS_AS(ultimate_bound(scalar(-1.0), scalar(1.0), 1.0), std::domain_error);
    CHECK_THROWS_AS(ultimate_bound(scalar(1.0), scalar(0.0), 1.0), std::domain_error);
}

TEST_CASE("hyperbolicity check") {
    CHECK(check_hyperbolic(-1.0 * Mat::identity(2)));
    CHECK_FALSE(check_hyperbolic(Mat{{0.0, 1.0}, {-1.0, 0.0}}));
    CHECK(check_hyperbolic(Mat{{0.0, 1.0}, {-2.0, -3.0}}));
}

TEST_CASE("eigenvalue real parts") {
    Vec re = eig_real_parts(Mat::diag({-1.0, -2.0}));
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0));
    CHECK(re[1] == doctest::Approx(-1.0));

    re = eig_real_parts(Mat{{0.0, 1.0}, {-1.0, 0.0}});
    CHECK(std::abs(re[0]) < 1e-12);
    CHECK(std::abs(re[1]) < 1e-12);

    re = eig_real_parts(Mat{{0.0, 1.0}, {-2.0, -3.0}});
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-9));
}
