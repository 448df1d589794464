#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectral/numerics.hpp"

namespace spectral::floquet {

/// 1-periodic background potential together with its L1 norm A over one
/// period and the positions of its discontinuities within [0,1).
class PeriodicPotential {
public:
    static PeriodicPotential zero();
    static PeriodicPotential constant(double c);
    /// amplitude * cos(2*pi*x)
    static PeriodicPotential cosine(double amplitude);
    /// mean + sum_m cos_coeff[m-1]*cos(2*pi*m*x) + sin_coeff[m-1]*sin(2*pi*m*x)
    static PeriodicPotential fourier(double mean, std::vector<double> cos_coeff,
                                     std::vector<double> sin_coeff = {});
    /// Piecewise constant: value[i] on [breaks[i], breaks[i+1]), breaks[0] = 0.
    static PeriodicPotential piecewise_constant(std::vector<double> breaks,
                                                std::vector<double> values);

    double operator()(double x) const {
        double u = x - std::floor(x);
        return eval_(u);
    }
    /// A = integral of |V0| over one period.
    double l1_norm() const { return a_; }
    bool is_zero() const { return zero_; }
    const std::vector<double>& breakpoints() const { return breaks_; }
    /// All discontinuity positions in (x0, x1), periodically extended.
    std::vector<double> breakpoints_in(double x0, double x1) const;

private:
    PeriodicPotential(std::function<double(double)> eval, std::vector<double> breaks, bool zero);
    std::function<double(double)> eval_;
    std::vector<double> breaks_;
    double a_ = 0.0;
    bool zero_ = true;
};

/// Values of the fundamental solutions at the end of one period.
struct Monodromy {
    double c1 = 0, c1p = 0, s1 = 0, s1p = 0;
    double discriminant() const { return c1 + s1p; }
    double wronskian() const { return c1 * s1p - c1p * s1; }
};

/// Fundamental pair C, S of -u'' + V0 u = E u with C(0)=1, C'(0)=0,
/// S(0)=0, S'(0)=1, dense over [0, x_max]. Components: [C, C', S, S'].
struct FundamentalPair {
    double E = 0;
    numerics::DenseTrajectory traj;
    double c(double x) const { return traj.evaluate(x, 0); }
    double cp(double x) const { return traj.evaluate(x, 1); }
    double s(double x) const { return traj.evaluate(x, 2); }
    double sp(double x) const { return traj.evaluate(x, 3); }
    double wronskian(double x) const;
};

Monodromy monodromy(const PeriodicPotential& v0, double E, double rel_tol = 1e-11);
FundamentalPair fundamental_pair(const PeriodicPotential& v0, double E, double x_max,
                                 double rel_tol = 1e-10);
/// D(E) = C(1,E) + S'(1,E).
double discriminant(const PeriodicPotential& v0, double E, double rel_tol = 1e-11);

struct Band {
    int n = 0;  // 1-based index
    double lower = 0, upper = 0;
    bool d_decreasing = false;  // true for odd n
};

/// First n_max spectral bands, located by scanning the discriminant.
std::vector<Band> band_structure(const PeriodicPotential& v0, int n_max);

struct QuasiEigenvalue {
    double k = 0;  // quasimomentum in (0, pi)
    int n = 0;     // band index
    double E = 0;
};

/// Default exclusion zone around the band edges in quasimomentum.
inline constexpr double default_k_min = 1e-3;

/// The root of D(E) = 2 cos k inside band n. Small n is resolved through the
/// scanned band table; large n (above the eigenvalue-asymptotics
/// threshold) through the anchor bracket sqrt(E) in [a_n^k - delta_n(k),
/// a_n^k + delta_n(k)].
QuasiEigenvalue eigenvalue(const PeriodicPotential& v0, double k, int n,
                           double k_min = default_k_min);
QuasiEigenvalue eigenvalue(const PeriodicPotential& v0, double k, int n,
                           std::span<const Band> bands, double k_min = default_k_min);

/// a_n^k: n*pi - k for even n, (n-1)*pi + k for odd n.
double anchor_a(double k, int n);
/// delta_n(k) = A e^3 / (n sin k sin(99k/100) sin((pi+99k)/100)).
double anchor_delta(double A, double k, int n);

struct Anchor {
    double a = 0;
    double delta = 0;
};
Anchor asymptotic_anchor(double A, double k, int n);

/// Threshold above which the free-anchor eigenvalue bracket is justified:
/// n > 1 + A / ((k(pi-k)/1e4) sin k sin(99k/100) sin((pi+99k)/100)).
double eigenvalue_threshold(double A, double k);

struct LkThresholds {
    double L = 0;          // band-index threshold L(k)
    double big_delta = 0;  // smallness scale delta(k)
};
/// L(k) and delta(k); both symmetric under k -> pi - k.
LkThresholds lk_thresholds(double A, double k);

// Constants from the oscillatory-integral estimates.
double s_const(double a, double beta, double C);                  // admissible-x0 threshold
double r_const(double a, double beta, double C);                  // bound constant
double r_alpha(double alpha);                                     // periodic-coupling threshold

/// Floquet solution data for one quasi-eigenvalue: |phi|^2, eta', eta'' as
/// fast periodic evaluators plus the constants entering the synthesis.
class FloquetFrame {
public:
    const QuasiEigenvalue& qe() const { return qe_; }
    double s1() const { return s1_; }
    double omega() const { return omega_; }

    double phi_sq(double x) const { return phi2_(x); }
    double phi_sq_prime(double x) const { return phi2p_(x); }
    double eta_prime(double x) const { return omega_ / (2.0 * phi2_(x)); }
    double eta_second(double x) const {
        double p = phi2_(x);
        return -omega_ * phi2p_(x) / (2.0 * p * p);
    }
    /// Accumulated phase eta(x) = integral of eta' from 0, eta(0) = 0.
    double eta(double x) const;
    /// eta(1), i.e. the mean drift per period (signed).
    double eta_mean() const { return eta_mean_; }

    double eta_max() const { return eta_max_; }  // max |eta'| over a period
    double eta_min() const { return eta_min_; }  // min |eta'| over a period
    double eta_abs_mean() const { return std::abs(eta_mean_); }
    /// ||1/eta'||_2 over one period.
    double inv_eta_l2() const { return inv_eta_l2_; }

    std::complex<double> phi_prime0() const { return phi_prime0_; }

private:
    friend FloquetFrame floquet_frame(const PeriodicPotential&, const QuasiEigenvalue&, double);
    QuasiEigenvalue qe_;
    double s1_ = 0, omega_ = 0;
    numerics::PeriodicCubic phi2_, phi2p_, eta_int_;
    double eta_mean_ = 0, eta_max_ = 0, eta_min_ = 0, inv_eta_l2_ = 0;
    std::complex<double> phi_prime0_;
};

FloquetFrame floquet_frame(const PeriodicPotential& v0, const QuasiEigenvalue& qe,
                           double rel_tol = 1e-11);

/// Lazily built, memoized eigenvalue + frame lookups against one potential.
class FrameCache {
public:
    explicit FrameCache(const PeriodicPotential& v0) : v0_(&v0) {}
    const PeriodicPotential& potential() const { return *v0_; }
    const FloquetFrame& get(double k, int n);
    const QuasiEigenvalue& eigenvalue_of(double k, int n);

private:
    const PeriodicPotential* v0_;
    std::map<std::pair<long long, int>, std::shared_ptr<FloquetFrame>> frames_;
    std::vector<Band> bands_;
    int bands_built_ = 0;
};

struct BoundCheck {
    std::string name;
    double lhs = 0, rhs = 0;
    bool applicable = true;
    bool pass = true;
    double margin() const { return rhs - lhs; }
};

struct AuditReport {
    std::vector<BoundCheck> items;
    bool all_pass() const {
        for (const auto& it : items)
            if (it.applicable && !it.pass) return false;
        return true;
    }
    bool any_applicable() const {
        for (const auto& it : items)
            if (it.applicable) return true;
        return false;
    }
};

/// Checks the classical fundamental-solution asymptotics (high-energy bounds
/// on C, C', S, S') and the in-band endpoint bounds against direct
/// integration, on the given grid of positions in [0,1].
AuditReport audit_asymptotic_bounds(const PeriodicPotential& v0, const QuasiEigenvalue& qe,
                                    std::span<const double> grid);

/// Checks the two-sided eta' band bounds and the eta'' bound on the grid.
AuditReport audit_eta_bounds(const FloquetFrame& frame, double A, std::span<const double> grid);

}  // namespace spectral::floquet
