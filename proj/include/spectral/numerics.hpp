#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral::numerics {

/// Thrown when an integrator or quadrature routine cannot meet its contract.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Interior positions where the field is discontinuous; the stepper is
    // restarted at each so no step straddles a jump.
    std::vector<double> breakpoints;
    double max_step = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 0;  // 0 = unlimited
};

namespace detail {

// Dormand-Prince 5(4) coefficients, FSAL form, with the quartic dense output.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) stepper with dense output over the last
/// accepted step. F must be callable as f(double x, const double* y, double* dy).
template <class F>
class RkStepper {
public:
    RkStepper(F field, double x0, std::span<const double> y0, double rel_tol, double abs_tol,
              double max_step = std::numeric_limits<double>::infinity())
        : f_(std::move(field)),
          n_(y0.size()),
          rtol_(rel_tol),
          atol_(abs_tol),
          hmax_(max_step),
          x_(x0),
          xold_(x0) {
        y_.assign(y0.begin(), y0.end());
        yold_ = y_;
        for (auto& k : k_) k.assign(n_, 0.0);
        ytmp_.assign(n_, 0.0);
        for (auto& r : rcont_) r.assign(n_, 0.0);
        eval(x_, y_.data(), k_[0].data());
        h_ = initial_step();
    }

    double x() const { return x_; }
    double x_old() const { return xold_; }
    std::span<const double> y() const { return y_; }
    std::span<const double> y_old() const { return yold_; }
    double suggested_step() const { return h_; }
    std::uint64_t steps_taken() const { return nsteps_; }

    /// Advance by one accepted step, never stepping past x_limit.
    /// Returns false once x() == x_limit.
    bool advance(double x_limit) {
        using D = detail::Dopri5;
        if (x_ >= x_limit) return false;
        bool rejected = false;
        for (int attempt = 0; attempt < 200; ++attempt) {
            double h = std::min({h_, hmax_, x_limit - x_});
            if (!(h > min_step())) {
                throw NumericalError("integrate_ivp: step size underflow at x = " +
                                     std::to_string(x_));
            }
            const double* y = y_.data();
            double* yt = ytmp_.data();
            // stages 2..6
            for (std::size_t i = 0; i < n_; ++i) yt[i] = y[i] + h * D::a21 * k_[0][i];
            eval(x_ + D::c2 * h, yt, k_[1].data());
            for (std::size_t i = 0; i < n_; ++i)
                yt[i] = y[i] + h * (D::a31 * k_[0][i] + D::a32 * k_[1][i]);
            eval(x_ + D::c3 * h, yt, k_[2].data());
            for (std::size_t i = 0; i < n_; ++i)
                yt[i] = y[i] + h * (D::a41 * k_[0][i] + D::a42 * k_[1][i] + D::a43 * k_[2][i]);
            eval(x_ + D::c4 * h, yt, k_[3].data());
            for (std::size_t i = 0; i < n_; ++i)
                yt[i] = y[i] + h * (D::a51 * k_[0][i] + D::a52 * k_[1][i] + D::a53 * k_[2][i] +
                                    D::a54 * k_[3][i]);
            eval(x_ + D::c5 * h, yt, k_[4].data());
            for (std::size_t i = 0; i < n_; ++i)
                yt[i] = y[i] + h * (D::a61 * k_[0][i] + D::a62 * k_[1][i] + D::a63 * k_[2][i] +
                                    D::a64 * k_[3][i] + D::a65 * k_[4][i]);
            eval(x_ + h, yt, k_[5].data());
            // 5th order solution (stage 7 shares it, FSAL)
            for (std::size_t i = 0; i < n_; ++i)
                yt[i] = y[i] + h * (D::b1 * k_[0][i] + D::b3 * k_[2][i] + D::b4 * k_[3][i] +
                                    D::b5 * k_[4][i] + D::b6 * k_[5][i]);
            eval(x_ + h, yt, k_[6].data());
            // error estimate
            double err = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                double e = h * (D::e1 * k_[0][i] + D::e3 * k_[2][i] + D::e4 * k_[3][i] +
                                D::e5 * k_[4][i] + D::e6 * k_[5][i] + D::e7 * k_[6][i]);
                double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(yt[i]));
                double q = e / sc;
                err += q * q;
            }
            err = std::sqrt(err / static_cast<double>(n_));
            if (!std::isfinite(err)) err = 1e10;
            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
            fac = std::min(rejected ? 1.0 : 5.0, std::max(0.2, fac));
            if (err <= 1.0) {
                prepare_dense(h);
                xold_ = x_;
                yold_.swap(y_);
                y_ = ytmp_;
                x_ += h;
                k_[0].swap(k_[6]);  // FSAL
                h_ = h * fac;
                ++nsteps_;
                return true;
            }
            rejected = true;
            h_ = h * fac;
        }
        throw NumericalError("integrate_ivp: repeated step rejection at x = " +
                             std::to_string(x_));
    }

    /// Dense-output evaluation inside the last accepted step [x_old, x].
    void dense(double x, std::span<double> out) const {
        double h = x_ - xold_;
        double s = h != 0.0 ? (x - xold_) / h : 0.0;
        double s1 = 1.0 - s;
        for (std::size_t i = 0; i < n_; ++i)
            out[i] = rcont_[0][i] +
                     s * (rcont_[1][i] + s1 * (rcont_[2][i] + s * (rcont_[3][i] + s1 * rcont_[4][i])));
    }

    /// Re-prime the cached derivative after the field changed discontinuously.
    void restart() { eval(x_, y_.data(), k_[0].data()); }

    std::span<const double> dense_coeff(int j) const { return rcont_[j]; }

private:
    void eval(double x, const double* y, double* dy) {
        f_(x, y, dy);
        for (std::size_t i = 0; i < n_; ++i)
            if (!std::isfinite(dy[i]))
                throw NumericalError("integrate_ivp: non-finite derivative at x = " +
                                     std::to_string(x));
    }

    double min_step() const { return 16.0 * eps_ * std::max(1.0, std::abs(x_)); }

    double initial_step() const {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double sc = atol_ + rtol_ * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
        }
        d0 = std::sqrt(d0 / static_cast<double>(n_));
        d1 = std::sqrt(d1 / static_cast<double>(n_));
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::max(h, 256.0 * eps_ * std::max(1.0, std::abs(x_)));
        return std::min(h, hmax_);
    }

    void prepare_dense(double h) {
        using D = detail::Dopri5;
        for (std::size_t i = 0; i < n_; ++i) {
            double ydiff = ytmp_[i] - y_[i];
            double bspl = h * k_[0][i] - ydiff;
            rcont_[0][i] = y_[i];
            rcont_[1][i] = ydiff;
            rcont_[2][i] = bspl;
            rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
            rcont_[4][i] = h * (D::d1 * k_[0][i] + D::d3 * k_[2][i] + D::d4 * k_[3][i] +
                                D::d5 * k_[4][i] + D::d6 * k_[5][i] + D::d7 * k_[6][i]);
        }
    }

    F f_;
    std::size_t n_;
    double rtol_, atol_, hmax_;
    double x_, xold_, h_ = 0.0;
    std::uint64_t nsteps_ = 0;
    static constexpr double eps_ = std::numeric_limits<double>::epsilon();
    std::vector<double> y_, yold_, ytmp_;
    std::vector<double> k_[7];
    std::vector<double> rcont_[5];
};

using Field = std::function<void(double x, std::span<const double> y, std::span<double> dy)>;

/// Piecewise-quartic record of an adaptive integration: stores every accepted
/// step together with its dense-output coefficients, so states can be
/// evaluated anywhere in the covered range at integration accuracy.
class DenseTrajectory {
public:
    DenseTrajectory() = default;

    std::size_t dimension() const { return dim_; }
    double x_begin() const { return knots_.front(); }
    double x_end() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    std::size_t size() const { return knots_.size(); }

    std::span<const double> state(std::size_t i) const { return {states_.data() + i * dim_, dim_}; }

    void evaluate(double x, std::span<double> out) const;
    double evaluate(double x, std::size_t component) const;

private:
    friend DenseTrajectory integrate_ivp(const Field&, double, double, std::span<const double>,
                                         const IntegrateOptions&);
    std::size_t dim_ = 0;
    std::vector<double> knots_;
    std::vector<double> states_;  // size * dim
    std::vector<double> rcont_;   // (size-1) * 5 * dim
};

DenseTrajectory integrate_ivp(const Field& field, double x0, double x1,
                              std::span<const double> y0, const IntegrateOptions& opt = {});

/// Streaming variant: reports the state at each requested abscissa (ascending,
/// within [x0, x1]) without storing the trajectory.
void integrate_ivp_sampled(const Field& field, double x0, double x1, std::span<const double> y0,
                           std::span<const double> xs,
                           const std::function<void(std::size_t, double, std::span<const double>)>& sink,
                           const IntegrateOptions& opt = {});

/// Hybrid bisection / inverse-quadratic root refinement on a sign-change
/// bracket. Throws if f(lo) and f(hi) have the same (nonzero) sign.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol);

/// Globally adaptive quadrature (Gauss 15 with embedded Gauss 7 estimate);
/// declared breakpoints seed the initial subdivision.
double integrate_function(const std::function<double(double)>& f, double a, double b, double tol,
                          std::span<const double> breakpoints = {});

/// Composite fixed-panel Gauss quadrature for integrands whose oscillation
/// rate (radians per unit x) is known; phase per panel is kept small enough
/// for the 15-point rule to resolve.
double integrate_oscillatory(const std::function<double(double)>& f, double a, double b,
                             double rate);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

LineFit fit_line(std::span<const double> u, std::span<const double> v);

/// C1 cubic Hermite interpolant of a 1-periodic function sampled with exact
/// derivatives on a uniform grid over [0,1).
class PeriodicCubic {
public:
    PeriodicCubic() = default;
    PeriodicCubic(std::vector<double> values, std::vector<double> derivatives);

    bool empty() const { return values_.empty(); }
    std::size_t grid_size() const { return values_.size(); }

    double operator()(double x) const;
    double derivative(double x) const;
    /// Exact integral of the interpolant over one period.
    double mean() const { return mean_; }
    /// Exact integral of the interpolant from 0 to x (any real x).
    double integral_from_zero(double x) const;

private:
    std::vector<double> values_, derivs_, prefix_;
    double mean_ = 0.0;
    double inv_h_ = 0.0;
};

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tiny deterministic PRNG for seeded test/audit instances.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

}  // namespace spectral::numerics
