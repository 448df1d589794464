#include <cmath>
#include <vector>

#include "doctest.h"
#include "spectral/numerics.hpp"

using namespace spectral::numerics;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("integrate_ivp: exponential growth") {
    Field f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0]; };
    std::vector<double> y0 = {1.0};
    IntegrateOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    auto traj = integrate_ivp(f, 0.0, 1.0, y0, opt);
    CHECK(traj.evaluate(1.0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
    // dense output mid-range
    CHECK(traj.evaluate(0.37, 0) == doctest::Approx(std::exp(0.37)).epsilon(1e-8));
}

TEST_CASE("integrate_ivp: harmonic oscillator at E = pi^2") {
    double E = kPi * kPi;
    Field f = [E](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -E * y[0];
    };
    std::vector<double> y0 = {1.0, 0.0};
    auto traj = integrate_ivp(f, 0.0, 1.0, y0);
    CHECK(std::abs(traj.evaluate(1.0, 0) - (-1.0)) < 1e-8);
    CHECK(std::abs(traj.evaluate(0.5, 0)) < 1e-8);
}

TEST_CASE("integrate_ivp: zero field keeps the state constant") {
    Field f = [](double, std::span<const double>, std::span<double> dy) { dy[0] = 0.0; };
    std::vector<double> y0 = {0.7};
    auto traj = integrate_ivp(f, 0.0, 5.0, y0);
    for (double x : {0.0, 1.3, 4.9, 5.0}) CHECK(traj.evaluate(x, 0) == doctest::Approx(0.7));
}

TEST_CASE("integrate_ivp: knots interpolate exactly and increase") {
    Field f = [](double x, std::span<const double>, std::span<double> dy) { dy[0] = std::cos(x); };
    std::vector<double> y0 = {0.0};
    auto traj = integrate_ivp(f, 0.0, 10.0, y0);
    const auto& ks = traj.knots();
    REQUIRE(ks.size() >= 2);
    CHECK(ks.front() == 0.0);
    CHECK(ks.back() >= 10.0 - 1e-12);
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) CHECK(ks[i] < ks[i + 1]);
    for (std::size_t i = 0; i < ks.size(); i += 7)
        CHECK(traj.evaluate(ks[i], 0) == doctest::Approx(traj.state(i)[0]).epsilon(1e-14));
}

TEST_CASE("integrate_ivp: breakpoint restart handles a jump field exactly") {
    // y' = +1 on [0, 0.5), -1 on [0.5, 1]; with a declared breakpoint the
    // integrator lands on 0.5 exactly and y(1) = 0.
    Field f = [](double x, std::span<const double>, std::span<double> dy) {
        dy[0] = x < 0.5 ? 1.0 : -1.0;
    };
    std::vector<double> y0 = {0.0};
    IntegrateOptions opt;
    opt.breakpoints = {0.5};
    auto traj = integrate_ivp(f, 0.0, 1.0, y0, opt);
    CHECK(std::abs(traj.evaluate(1.0, 0)) < 1e-13);
    CHECK(traj.evaluate(0.5, 0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("integrate_ivp: non-finite derivative is reported") {
    Field f = [](double x, std::span<const double>, std::span<double> dy) {
        dy[0] = x > 0.4 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    };
    std::vector<double> y0 = {0.0};
    CHECK_THROWS_AS(integrate_ivp(f, 0.0, 1.0, y0), NumericalError);
}

TEST_CASE("integrate_ivp: linear test system reproduces cos/sin across energies") {
    for (double E : {1.0, 100.0, 1e4, 1e6}) {
        double rel = 1e-8;
        Field f = [E](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = -E * y[0];
        };
        std::vector<double> y0 = {1.0, 0.0};
        IntegrateOptions opt;
        opt.rel_tol = rel;
        opt.abs_tol = rel * 1e-2;
        double x_end = 100.0;
        double rho = std::sqrt(E);
        std::vector<double> xs;
        for (int i = 1; i <= 20; ++i) xs.push_back(x_end * i / 20.0);
        double worst = 0.0;
        integrate_ivp_sampled(
            f, 0.0, x_end, y0, xs,
            [&](std::size_t, double x, std::span<const double> y) {
                worst = std::max(worst, std::abs(y[0] - std::cos(rho * x)));
            },
            opt);
        CHECK(worst <= 10.0 * rel * rho * x_end);
    }
}

TEST_CASE("integrate_ivp_sampled matches stored trajectory") {
    Field f = [](double x, std::span<const double> y, std::span<double> dy) {
        dy[0] = -0.3 * y[0] + std::sin(3.0 * x);
    };
    std::vector<double> y0 = {1.0};
    auto traj = integrate_ivp(f, 0.0, 8.0, y0);
    std::vector<double> xs = {0.0, 1.0, 2.5, 7.99, 8.0};
    integrate_ivp_sampled(f, 0.0, 8.0, y0, xs,
                          [&](std::size_t, double x, std::span<const double> y) {
                              CHECK(y[0] == doctest::Approx(traj.evaluate(x, 0)).epsilon(1e-9));
                          });
}

TEST_CASE("find_root_bracketed: sqrt(2)") {
    auto f = [](double x) { return x * x - 2.0; };
    double r = find_root_bracketed(f, 1.0, 2.0, 1e-12);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
}

TEST_CASE("find_root_bracketed: identity and exact-zero endpoint") {
    CHECK(std::abs(find_root_bracketed([](double x) { return x; }, -1.0, 1.0, 1e-12)) < 1e-11);
    CHECK(find_root_bracketed([](double x) { return x - 1.0; }, 1.0, 3.0, 1e-12) == 1.0);
}

TEST_CASE("find_root_bracketed: missing sign change throws") {
    CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                    NumericalError);
}

TEST_CASE("find_root_bracketed: result stays inside the bracket") {
    SplitMix64 rng(12345);
    for (int i = 0; i < 50; ++i) {
        double root = rng.uniform(-3.0, 3.0);
        double a = root - rng.uniform(0.01, 2.0);
        double b = root + rng.uniform(0.01, 2.0);
        double c = rng.uniform(0.2, 4.0);
        auto f = [root, c](double x) { return c * (x - root) * (1.0 + 0.3 * std::sin(x)); };
        double r = find_root_bracketed(f, a, b, 1e-12);
        CHECK(r >= a);
        CHECK(r <= b);
        CHECK(r == doctest::Approx(root).epsilon(1e-9));
    }
}

TEST_CASE("integrate_function: basics") {
    CHECK(integrate_function([](double x) { return x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(integrate_function([](double) { return 0.0; }, 0.0, 1.0, 1e-12) == 0.0);
    // |2 cos(2 pi x)| over one period = 4/pi
    double v = integrate_function([](double x) { return std::abs(2.0 * std::cos(2.0 * kPi * x)); },
                                  0.0, 1.0, 1e-12);
    CHECK(v == doctest::Approx(4.0 / kPi).epsilon(1e-10));
}

TEST_CASE("integrate_function: exact on polynomials up to the rule degree") {
    // 15-point Gauss is exact through degree 29 on a single panel.
    for (int deg : {5, 12, 20, 29}) {
        auto f = [deg](double x) { return std::pow(x, deg); };
        double exact = 1.0 / (deg + 1.0);
        CHECK(integrate_function(f, 0.0, 1.0, 1e-13) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("integrate_function: declared breakpoints") {
    auto f = [](double x) { return x < 0.3 ? 1.0 : -2.0; };
    std::vector<double> bp = {0.3};
    CHECK(integrate_function(f, 0.0, 1.0, 1e-12, bp) ==
          doctest::Approx(0.3 - 1.4).epsilon(1e-12));
}

TEST_CASE("integrate_oscillatory matches closed forms") {
    double a = 50.0;
    double v = integrate_oscillatory([a](double x) { return std::sin(a * x); }, 0.0, 3.0, a);
    CHECK(v == doctest::Approx((1.0 - std::cos(3.0 * a)) / a).epsilon(1e-10));
}

TEST_CASE("fit_line: exact and degenerate cases") {
    std::vector<double> u = {1, 2, 3}, v = {2, 4, 6};
    auto fit = fit_line(u, v);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(0.0));
    CHECK(fit.rms_residual == doctest::Approx(0.0));

    std::vector<double> u2 = {0, 1}, v2 = {1, 1};
    auto fit2 = fit_line(u2, v2);
    CHECK(fit2.slope == doctest::Approx(0.0));
    CHECK(fit2.intercept == doctest::Approx(1.0));

    std::vector<double> u3 = {2, 2}, v3 = {1, 3};
    CHECK_THROWS_AS(fit_line(u3, v3), NumericalError);
}

TEST_CASE("fit_line: recovers slope from noisy synthetic data") {
    SplitMix64 rng(99);
    std::vector<double> u, v;
    for (int i = 0; i < 200; ++i) {
        double x = i * 0.05;
        u.push_back(x);
        v.push_back(-3.0 * x + 0.7 + 0.01 * (2.0 * rng.uniform() - 1.0));
    }
    auto fit = fit_line(u, v);
    CHECK(std::abs(fit.slope - (-3.0)) < 0.05);
}

TEST_CASE("PeriodicCubic: interpolation, derivative, integral") {
    std::size_t n = 64;
    std::vector<double> v(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        v[i] = 2.0 + std::sin(2.0 * kPi * x);
        d[i] = 2.0 * kPi * std::cos(2.0 * kPi * x);
    }
    PeriodicCubic pc(v, d);
    for (double x : {0.13, 0.5, 0.77, 1.13, -0.87}) {
        CHECK(pc(x) == doctest::Approx(2.0 + std::sin(2.0 * kPi * x)).epsilon(1e-7));
        CHECK(pc.derivative(x) ==
              doctest::Approx(2.0 * kPi * std::cos(2.0 * kPi * x)).epsilon(1e-4));
    }
    CHECK(pc.mean() == doctest::Approx(2.0).epsilon(1e-10));
    // integral from zero: 2x + (1 - cos(2 pi x))/(2 pi)
    for (double x : {0.31, 1.0, 2.6}) {
        double exact = 2.0 * x + (1.0 - std::cos(2.0 * kPi * x)) / (2.0 * kPi);
        CHECK(pc.integral_from_zero(x) == doctest::Approx(exact).epsilon(1e-7));
    }
}

TEST_CASE("gauss_legendre nodes integrate exactly") {
    std::vector<double> x, w;
    gauss_legendre(15, x, w);
    double s = 0;
    for (int i = 0; i < 15; ++i) s += w[i];
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    double p = 0;
    for (int i = 0; i < 15; ++i) p += w[i] * std::pow(x[i], 28);
    CHECK(p == doctest::Approx(2.0 / 29.0).epsilon(1e-12));
}

TEST_CASE("integrate_function: subdivision limit is reported") {
    // far more oscillation than the interval budget can resolve
    auto f = [](double x) { return std::sin(3.0e6 * x); };
    CHECK_THROWS_AS(integrate_function(f, 0.0, 1.0, 1e-13), NumericalError);
}
