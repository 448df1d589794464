#include "spectral/floquet.hpp"

#include <algorithm>
#include <cmath>

namespace spectral::floquet {

using numerics::NumericalError;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE3 = 20.085536923187668;  // e^3

double trig_product(double k) {
    return std::sin(k) * std::sin(0.99 * k) * std::sin((kPi + 99.0 * k) / 100.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// PeriodicPotential

PeriodicPotential::PeriodicPotential(std::function<double(double)> eval,
                                     std::vector<double> breaks, bool zero)
    : eval_(std::move(eval)), breaks_(std::move(breaks)), zero_(zero) {
    if (zero_) {
        a_ = 0.0;
        return;
    }
    auto f = [this](double x) { return std::abs(eval_(x)); };
    a_ = numerics::integrate_function(f, 0.0, 1.0, 1e-12, breaks_);
}

PeriodicPotential PeriodicPotential::zero() {
    return PeriodicPotential([](double) { return 0.0; }, {}, true);
}

PeriodicPotential PeriodicPotential::constant(double c) {
    if (c == 0.0) return zero();
    return PeriodicPotential([c](double) { return c; }, {}, false);
}

PeriodicPotential PeriodicPotential::cosine(double amplitude) {
    if (amplitude == 0.0) return zero();
    return PeriodicPotential(
        [amplitude](double x) { return amplitude * std::cos(2.0 * kPi * x); }, {}, false);
}

PeriodicPotential PeriodicPotential::fourier(double mean, std::vector<double> cos_coeff,
                                             std::vector<double> sin_coeff) {
    bool zero = mean == 0.0;
    for (double c : cos_coeff) zero = zero && c == 0.0;
    for (double c : sin_coeff) zero = zero && c == 0.0;
    if (zero) return PeriodicPotential::zero();
    auto eval = [mean, cc = std::move(cos_coeff), ss = std::move(sin_coeff)](double x) {
        double v = mean;
        for (std::size_t m = 0; m < cc.size(); ++m)
            v += cc[m] * std::cos(2.0 * kPi * static_cast<double>(m + 1) * x);
        for (std::size_t m = 0; m < ss.size(); ++m)
            v += ss[m] * std::sin(2.0 * kPi * static_cast<double>(m + 1) * x);
        return v;
    };
    return PeriodicPotential(eval, {}, false);
}

PeriodicPotential PeriodicPotential::piecewise_constant(std::vector<double> breaks,
                                                        std::vector<double> values) {
    if (breaks.size() != values.size() || breaks.empty() || breaks.front() != 0.0)
        throw NumericalError("piecewise_constant: breaks must start at 0 and match values");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (breaks[i] <= breaks[i - 1] || breaks[i] >= 1.0)
            throw NumericalError("piecewise_constant: breaks must be increasing within [0,1)");
    auto eval = [br = breaks, va = values](double x) {
        std::size_t i = br.size() - 1;
        while (i > 0 && x < br[i]) --i;
        return va[i];
    };
    std::vector<double> marks(breaks.begin() + 1, breaks.end());
    bool zero = true;
    for (double v : values) zero = zero && v == 0.0;
    if (zero) return PeriodicPotential::zero();
    return PeriodicPotential(eval, std::move(marks), false);
}

std::vector<double> PeriodicPotential::breakpoints_in(double x0, double x1) const {
    std::vector<double> out;
    if (breaks_.empty()) return out;
    double base = std::floor(x0);
    for (double p = base; p < x1 + 1.0; p += 1.0)
        for (double b : breaks_) {
            double x = p + b;
            if (x > x0 && x < x1) out.push_back(x);
        }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Fundamental solutions

namespace {

struct SchrodingerField {
    const PeriodicPotential* v0;
    double E;
    void operator()(double x, const double* y, double* dy) const {
        double q = (*v0)(x)-E;
        dy[0] = y[1];
        dy[1] = q * y[0];
        dy[2] = y[3];
        dy[3] = q * y[2];
    }
};

}  // namespace

Monodromy monodromy(const PeriodicPotential& v0, double E, double rel_tol) {
    SchrodingerField f{&v0, E};
    std::vector<double> y = {1.0, 0.0, 0.0, 1.0};
    auto cuts = v0.breakpoints_in(0.0, 1.0);
    cuts.push_back(1.0);
    double x = 0.0;
    for (double c : cuts) {
        numerics::RkStepper<SchrodingerField> st(f, x, y, rel_tol, rel_tol * 1e-2);
        while (st.advance(c)) {
        }
        y.assign(st.y().begin(), st.y().end());
        x = c;
    }
    return Monodromy{y[0], y[1], y[2], y[3]};
}

FundamentalPair fundamental_pair(const PeriodicPotential& v0, double E, double x_max,
                                 double rel_tol) {
    if (x_max < 1.0) throw NumericalError("fundamental_pair: x_max must be >= 1");
    numerics::Field field = [&v0, E](double x, std::span<const double> y, std::span<double> dy) {
        double q = v0(x) - E;
        dy[0] = y[1];
        dy[1] = q * y[0];
        dy[2] = y[3];
        dy[3] = q * y[2];
    };
    numerics::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = rel_tol * 1e-2;
    opt.breakpoints = v0.breakpoints_in(0.0, x_max);
    std::vector<double> y0 = {1.0, 0.0, 0.0, 1.0};
    FundamentalPair fp;
    fp.E = E;
    try {
        fp.traj = numerics::integrate_ivp(field, 0.0, x_max, y0, opt);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (E = " + std::to_string(E) + ")");
    }
    return fp;
}

double FundamentalPair::wronskian(double x) const {
    double v[4];
    traj.evaluate(x, v);
    return v[0] * v[3] - v[1] * v[2];
}

double discriminant(const PeriodicPotential& v0, double E, double rel_tol) {
    return monodromy(v0, E, rel_tol).discriminant();
}

// ---------------------------------------------------------------------------
// Band structure

namespace {

// March parameter t with E = t|t| keeps the discriminant well conditioned at
// high energy (it oscillates in sqrt(E)) while still covering E < 0.
double t_to_e(double t) { return t * std::abs(t); }

struct DiscriminantScanner {
    const PeriodicPotential* v0;
    double rel_tol;
    double operator()(double t) const { return floquet::discriminant(*v0, t_to_e(t), rel_tol); }
    // 5-point finite difference of D along t
    double derivative(double t, double h) const {
        const auto& d = *this;
        return (d(t - 2 * h) - 8.0 * d(t - h) + 8.0 * d(t + h) - d(t + 2 * h)) / (12.0 * h);
    }
};

}  // namespace

std::vector<Band> band_structure(const PeriodicPotential& v0, int n_max) {
    if (n_max < 1) throw NumericalError("band_structure: n_max must be >= 1");
    const double A = v0.l1_norm();
    const double rel_tol = 2e-12;
    DiscriminantScanner disc{&v0, rel_tol};
    auto d_of_e = [&](double E) { return discriminant(v0, E, rel_tol); };

    // Bottom of the spectrum: D decreases through +2.
    double e_lo = -(4.0 * A + 2.0);
    int guard = 0;
    while (d_of_e(e_lo) <= 2.0) {
        e_lo -= 2.0 * (1.0 + A);
        if (++guard > 64) throw NumericalError("band_structure: cannot find spectrum bottom");
    }
    double step = 0.25 * (1.0 + A);
    double e_hi = e_lo;
    guard = 0;
    do {
        e_lo = e_hi;
        e_hi += step;
        if (++guard > 4096) throw NumericalError("band_structure: bottom edge not bracketed");
    } while (d_of_e(e_hi) >= 2.0);
    double lower = numerics::find_root_bracketed([&](double E) { return d_of_e(E) - 2.0; }, e_lo,
                                                 e_hi, 1e-12 * (1.0 + std::abs(e_hi)));

    std::vector<Band> bands;
    double t_inside = (lower >= 0.0 ? std::sqrt(lower) : -std::sqrt(-lower));
    const double ceiling = (static_cast<double>(n_max) + 2.0) * kPi + 4.0 * A + 4.0;
    for (int n = 1; n <= n_max; ++n) {
        double sgn = (n % 2 == 0) ? 1.0 : -1.0;  // g = sgn*D - 2 is negative inside bands n, n+1
        auto g = [&](double t) { return sgn * disc(t) - 2.0; };
        // move safely inside band n
        double t = t_inside;
        guard = 0;
        while (std::abs(disc(t)) > 1.9) {
            t += 0.05;
            if (t > ceiling || ++guard > 4096)
                throw NumericalError("band_structure: no interior point for band " +
                                     std::to_string(n));
        }
        // bracket the extremum of sgn*D between the interiors of bands n and n+1
        const double fd_h = 5e-3;
        double ta = t, tb = t;
        double da = sgn * disc.derivative(ta, fd_h);
        guard = 0;
        while (da <= 0.0) {  // not yet climbing: keep moving right inside the band
            ta += 0.1;
            da = sgn * disc.derivative(ta, fd_h);
            if (ta > ceiling || ++guard > 4096)
                throw NumericalError("band_structure: lost climb in band " + std::to_string(n));
        }
        tb = ta;
        double db = da;
        guard = 0;
        while (db > 0.0) {
            tb += 0.1;
            db = sgn * disc.derivative(tb, fd_h);
            if (tb > ceiling || ++guard > 4096)
                throw NumericalError("band_structure: failed to bracket edge of band " +
                                     std::to_string(n) + " below the energy ceiling");
        }
        double t_ext = numerics::find_root_bracketed(
            [&](double tt) { return sgn * disc.derivative(tt, fd_h); }, ta, tb, 1e-10);
        double g_ext = g(t_ext);
        double upper_n, lower_next, t_next_inside;
        if (g_ext > 2e-11) {
            // open gap: refine both crossings
            double tu = numerics::find_root_bracketed(g, ta, t_ext, 1e-12 * (1.0 + t_ext));
            upper_n = t_to_e(tu);
            double tc = t_ext;
            guard = 0;
            while (g(tc) >= -0.1) {
                tc += 0.05;
                if (tc > ceiling || ++guard > 4096)
                    throw NumericalError("band_structure: failed to enter band " +
                                         std::to_string(n + 1));
            }
            double tl = numerics::find_root_bracketed(g, t_ext, tc, 1e-12 * (1.0 + tc));
            lower_next = t_to_e(tl);
            t_next_inside = tc;
        } else {
            // touching (or numerically closed) gap
            upper_n = t_to_e(t_ext);
            lower_next = upper_n;
            t_next_inside = t_ext + 0.05;
        }
        bands.push_back(Band{n, lower, upper_n, n % 2 == 1});
        lower = lower_next;
        t_inside = t_next_inside;
    }
    return bands;
}

// ---------------------------------------------------------------------------
// Quasimomentum eigenvalues

double anchor_a(double k, int n) {
    return (n % 2 == 0) ? static_cast<double>(n) * kPi - k
                        : static_cast<double>(n - 1) * kPi + k;
}

double anchor_delta(double A, double k, int n) {
    return A * kE3 / (static_cast<double>(n) * trig_product(k));
}

Anchor asymptotic_anchor(double A, double k, int n) {
    return Anchor{anchor_a(k, n), anchor_delta(A, k, n)};
}

double eigenvalue_threshold(double A, double k) {
    return 1.0 + A / ((k * (kPi - k) / 1e4) * trig_product(k));
}

LkThresholds lk_thresholds(double A, double k) {
    double s = std::sin(k);
    double prod3 = s * s * s * std::sin(0.99 * k) * std::sin((kPi + 99.0 * k) / 100.0);
    LkThresholds t;
    t.L = 1.0 + A / ((k * (kPi - k) / 1e4) * prod3);
    t.big_delta = 40.0 * kPi * A * kE3 / prod3;
    return t;
}

double s_const(double a, double beta, double C) {
    a = std::abs(a);
    return std::pow(100.0 * C * std::pow(a, beta - 1.0) + 1e4, 1.0 / beta) / a;
}

double r_const(double a, double beta, double C) {
    a = std::abs(a);
    return 30.0 * C / beta * std::pow(a, beta - 1.0) + 10.0 * kPi;
}

double r_alpha(double alpha) {
    return s_const(alpha, 2.0 / 3.0, 1.0) +
           4.0 * r_const(alpha, 2.0 / 3.0, 1.0) * std::sqrt(std::pow(alpha, -4.0 / 3.0) + 3.0);
}

namespace {

constexpr int kScanLimit = 64;  // largest band index resolved by scanning

QuasiEigenvalue eigenvalue_in_band(const PeriodicPotential& v0, double k, const Band& band) {
    const double target = 2.0 * std::cos(k);
    const double rel_tol = 1e-11;
    double root;
    if (band.lower > 0.0) {
        double ta = std::sqrt(band.lower), tb = std::sqrt(band.upper);
        double t = numerics::find_root_bracketed(
            [&](double tt) { return discriminant(v0, tt * tt, rel_tol) - target; }, ta, tb,
            1e-12 * (1.0 + tb));
        root = t * t;
    } else {
        root = numerics::find_root_bracketed(
            [&](double E) { return discriminant(v0, E, rel_tol) - target; }, band.lower,
            band.upper, 1e-13 * (1.0 + std::abs(band.upper)));
    }
    return QuasiEigenvalue{k, band.n, root};
}

}  // namespace

QuasiEigenvalue eigenvalue(const PeriodicPotential& v0, double k, int n,
                           std::span<const Band> bands, double k_min) {
    if (!(k > k_min && k < kPi - k_min))
        throw NumericalError("eigenvalue: quasimomentum outside the admissible interval (" +
                             std::to_string(k_min) + ", pi - " + std::to_string(k_min) + ")");
    if (n < 1) throw NumericalError("eigenvalue: band index must be >= 1");
    for (const auto& b : bands)
        if (b.n == n) return eigenvalue_in_band(v0, k, b);

    if (n <= kScanLimit) {
        auto table = band_structure(v0, n);
        return eigenvalue_in_band(v0, k, table.back());
    }
    // Large band index: bracket sqrt(E) around the free anchor. Valid above
    // the asymptotics threshold.
    const double A = v0.l1_norm();
    if (static_cast<double>(n) <= eigenvalue_threshold(A, k))
        throw NumericalError(
            "eigenvalue: band index " + std::to_string(n) +
            " exceeds the scanned range but is below the asymptotics threshold " +
            std::to_string(eigenvalue_threshold(A, k)));
    const double a = anchor_a(k, n);
    double delta = std::max(anchor_delta(A, k, n), 1e-9 * a);
    const double rel_tol = 1e-11;
    auto f = [&](double rho) { return discriminant(v0, rho * rho, rel_tol) - 2.0 * std::cos(k); };
    double lo = a - delta, hi = a + delta;
    double flo = f(lo), fhi = f(hi);
    int widen = 0;
    while ((flo > 0.0) == (fhi > 0.0)) {
        delta *= 1.5;
        lo = a - delta;
        hi = a + delta;
        flo = f(lo);
        fhi = f(hi);
        if (++widen > 6)
            throw NumericalError("eigenvalue: anchor bracket failed for n = " + std::to_string(n));
    }
    double rho = numerics::find_root_bracketed(f, lo, hi, 1e-12 * (1.0 + a));
    QuasiEigenvalue qe{k, n, rho * rho};
    if (std::abs(discriminant(v0, qe.E, rel_tol)) > 2.0)
        throw NumericalError("eigenvalue: anchor root fell outside the band");
    return qe;
}

QuasiEigenvalue eigenvalue(const PeriodicPotential& v0, double k, int n, double k_min) {
    return eigenvalue(v0, k, n, std::span<const Band>{}, k_min);
}

// ---------------------------------------------------------------------------
// Floquet frame

double FloquetFrame::eta(double x) const { return eta_mean_ * x + eta_int_(x); }

FloquetFrame floquet_frame(const PeriodicPotential& v0, const QuasiEigenvalue& qe,
                           double rel_tol) {
    const double k = qe.k, E = qe.E;
    const int n = qe.n;
    Monodromy m = monodromy(v0, E, rel_tol);
    if (std::abs(m.s1) < 1e-12)
        throw NumericalError("floquet_frame: S(1,E) vanishes; energy too close to a band edge");
    FloquetFrame fr;
    fr.qe_ = qe;
    fr.s1_ = m.s1;
    fr.omega_ = 2.0 * std::sin(k) / m.s1;
    double sign_rule = (n % 2 == 1) ? fr.omega_ : -fr.omega_;
    if (!(sign_rule > 0.0))
        throw NumericalError("floquet_frame: omega sign inconsistent with the band parity");

    const double a = (std::cos(k) - m.c1) / m.s1;
    const double b = std::sin(k) / m.s1;
    fr.phi_prime0_ = {a, b};

    // Table resolution: at least ~8 samples per cycle of the fast harmonic.
    double rho = std::sqrt(std::max(E, 1.0));
    std::size_t want = static_cast<std::size_t>(std::max(4096.0, 8.0 * rho / kPi));
    std::size_t ng = 4096;
    while (ng < want && ng < (1u << 19)) ng <<= 1;

    std::vector<double> xs(ng + 1), p2(ng + 1), p2p(ng + 1), p2pp(ng + 1);
    for (std::size_t i = 0; i <= ng; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(ng);
    numerics::Field field = [&v0, E](double x, std::span<const double> y, std::span<double> dy) {
        double q = v0(x) - E;
        dy[0] = y[1];
        dy[1] = q * y[0];
        dy[2] = y[3];
        dy[3] = q * y[2];
    };
    numerics::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = rel_tol * 1e-2;
    opt.breakpoints = v0.breakpoints_in(0.0, 1.0);
    std::vector<double> y0 = {1.0, 0.0, 0.0, 1.0};
    numerics::integrate_ivp_sampled(
        field, 0.0, 1.0, y0, xs,
        [&](std::size_t i, double x, std::span<const double> y) {
            double C = y[0], Cp = y[1], S = y[2], Sp = y[3];
            double P = C + a * S;
            double Pp = Cp + a * Sp;
            double q = v0(x) - E;
            p2[i] = P * P + b * b * S * S;
            p2p[i] = 2.0 * P * Pp + 2.0 * b * b * S * Sp;
            p2pp[i] = 2.0 * Pp * Pp + 2.0 * q * P * P + 2.0 * b * b * (Sp * Sp + q * S * S);
        },
        opt);

    if (std::abs(p2[ng] - p2[0]) > 5e-5 * (1.0 + std::abs(p2[0])))
        throw NumericalError("floquet_frame: |phi|^2 failed the periodicity check; eigenvalue "
                             "not converged (E = " + std::to_string(E) + ")");
    for (std::size_t i = 0; i <= ng; ++i)
        if (!(p2[i] > 0.0))
            throw NumericalError("floquet_frame: |phi|^2 not positive");

    std::vector<double> v(p2.begin(), p2.end() - 1), d(p2p.begin(), p2p.end() - 1);
    fr.phi2_ = numerics::PeriodicCubic(v, d);
    std::vector<double> vp(p2p.begin(), p2p.end() - 1), dp(p2pp.begin(), p2pp.end() - 1);
    fr.phi2p_ = numerics::PeriodicCubic(vp, dp);

    // Accumulated phase: eta(x) = eta_mean*x + periodic deviation. Integrate
    // eta' = omega/(2 phi^2) over each cell of the interpolant.
    std::vector<double> gx, gw;
    numerics::gauss_legendre(7, gx, gw);
    std::vector<double> prefix(ng + 1, 0.0);
    double h = 1.0 / static_cast<double>(ng);
    for (std::size_t i = 0; i < ng; ++i) {
        double mid = (static_cast<double>(i) + 0.5) * h, half = 0.5 * h;
        double cell = 0.0;
        for (int j = 0; j < 7; ++j) {
            double x = mid + half * gx[j];
            cell += gw[j] * (fr.omega_ / (2.0 * fr.phi2_(x)));
        }
        prefix[i + 1] = prefix[i] + cell * half;
    }
    fr.eta_mean_ = prefix[ng];
    std::vector<double> dev(ng), devp(ng);
    for (std::size_t i = 0; i < ng; ++i) {
        double x = static_cast<double>(i) * h;
        dev[i] = prefix[i] - fr.eta_mean_ * x;
        devp[i] = fr.omega_ / (2.0 * p2[i]) - fr.eta_mean_;
    }
    fr.eta_int_ = numerics::PeriodicCubic(dev, devp);

    // Extrema of |eta'| from the extrema of phi^2, Newton-refined.
    auto refine = [&](std::size_t i0, bool maximize) {
        double x = static_cast<double>(i0) * h;
        for (int it = 0; it < 6; ++it) {
            double g1 = fr.phi2p_(x);
            double g2 = fr.phi2p_.derivative(x);
            if (g2 == 0.0) break;
            double step_n = -g1 / g2;
            if (std::abs(step_n) > h) step_n = std::copysign(h, step_n);
            x += step_n;
        }
        double val = fr.phi2_(x);
        double at_knot = p2[i0];
        return maximize ? std::max(val, at_knot) : std::min(val, at_knot);
    };
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 0; i < ng; ++i) {
        if (p2[i] < p2[imin]) imin = i;
        if (p2[i] > p2[imax]) imax = i;
    }
    double p2_min = refine(imin, false);
    double p2_max = refine(imax, true);
    fr.eta_max_ = std::abs(fr.omega_) / (2.0 * p2_min);
    fr.eta_min_ = std::abs(fr.omega_) / (2.0 * p2_max);

    double sum = 0.0;
    for (std::size_t i = 0; i < ng; ++i) {
        double mid = (static_cast<double>(i) + 0.5) * h, half = 0.5 * h;
        for (int j = 0; j < 7; ++j) {
            double x = mid + half * gx[j];
            double inv = 2.0 * fr.phi2_(x) / fr.omega_;
            sum += gw[j] * inv * inv * half;
        }
    }
    fr.inv_eta_l2_ = std::sqrt(sum);
    return fr;
}

const FloquetFrame& FrameCache::get(double k, int n) {
    auto key = std::make_pair(static_cast<long long>(std::llround(k * 1e12)), n);
    auto it = frames_.find(key);
    if (it != frames_.end()) return *it->second;
    QuasiEigenvalue qe;
    if (n <= kScanLimit) {
        if (bands_built_ < n) {
            bands_ = band_structure(*v0_, std::min(std::max(n, 8), kScanLimit));
            bands_built_ = static_cast<int>(bands_.size());
        }
        qe = eigenvalue(*v0_, k, n, bands_);
    } else {
        qe = eigenvalue(*v0_, k, n);
    }
    auto frame = std::make_shared<FloquetFrame>(floquet_frame(*v0_, qe));
    auto [pos, inserted] = frames_.emplace(key, std::move(frame));
    (void)inserted;
    return *pos->second;
}

const QuasiEigenvalue& FrameCache::eigenvalue_of(double k, int n) { return get(k, n).qe(); }

// ---------------------------------------------------------------------------
// Audits

namespace {

// Tolerance floor so that zero-potential audits (rhs exactly 0) are not
// failed on integration noise. Scaled per item where the quantity itself
// carries an energy scale.
constexpr double kAuditFloor = 1e-9;

void push(AuditReport& rep, std::string name, double lhs, double rhs, bool applicable,
          double floor = kAuditFloor) {
    BoundCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.applicable = applicable;
    c.pass = !applicable || lhs <= rhs + floor;
    rep.items.push_back(std::move(c));
}

}  // namespace

AuditReport audit_asymptotic_bounds(const PeriodicPotential& v0, const QuasiEigenvalue& qe,
                                    std::span<const double> grid) {
    AuditReport rep;
    const double A = v0.l1_norm();
    const double E = qe.E;
    if (!(E > 0.0)) {
        push(rep, "E_positive", 1.0, 0.0, false);
        return rep;
    }
    const double rho = std::sqrt(E);
    auto fp = fundamental_pair(v0, E, 1.0, 1e-11);

    bool high_energy = rho > std::max(1.0, 2.0 * A);
    double mc = 0, mcp = 0, ms = 0, msp = 0;
    double mabs_c = 0, mabs_rs = 0, mc2 = 0, ms2 = 0;
    double st[4];
    for (double x : grid) {
        fp.traj.evaluate(x, st);
        double C = st[0], Cp = st[1], S = st[2], Sp = st[3];
        mc = std::max(mc, std::abs(C - std::cos(rho * x)));
        mcp = std::max(mcp, std::abs(Cp + rho * std::sin(rho * x)));
        ms = std::max(ms, std::abs(S - std::sin(rho * x) / rho));
        msp = std::max(msp, std::abs(Sp - std::cos(rho * x)));
        mabs_c = std::max(mabs_c, std::abs(C));
        mabs_rs = std::max(mabs_rs, std::abs(rho * S));
        double cx = std::cos(rho * x);
        mc2 = std::max(mc2, std::abs(C * C - cx * cx));
        double sx = std::sin(rho * x);
        ms2 = std::max(ms2, std::abs(E * S * S - sx * sx));
    }
    push(rep, "C_vs_cos", mc, 2.0 * A / rho, high_energy);
    push(rep, "Cprime_vs_sin", mcp, 2.0 * A, high_energy);
    push(rep, "S_vs_sin", ms, 2.0 * A / (rho * rho), high_energy);
    push(rep, "Sprime_vs_cos", msp, 2.0 * A / rho, high_energy);

    const double k = qe.k;
    const int n = qe.n;
    bool in_asym = static_cast<double>(n) > eigenvalue_threshold(A, k);
    const double dn = anchor_delta(A, k, n);
    push(rep, "sqrtE_vs_anchor", std::abs(rho - anchor_a(k, n)), dn, in_asym);
    push(rep, "absC_band", mabs_c, 1.0 + dn, in_asym);
    push(rep, "absS_band", mabs_rs, 1.0 + dn, in_asym);
    push(rep, "Csq_band", mc2, dn, in_asym);
    push(rep, "Ssq_band", ms2, dn, in_asym);

    fp.traj.evaluate(1.0, st);
    double C1 = st[0], S1 = st[2];
    double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    push(rep, "C1_endpoint", std::abs(C1 - std::cos(k)), 2.0 * dn, in_asym);
    push(rep, "C1sq_endpoint", std::abs(C1 * C1 - std::cos(k) * std::cos(k)), 2.0 * dn, in_asym);
    push(rep, "S1_endpoint", std::abs(rho * S1 - sgn * std::sin(k)), 2.0 * dn, in_asym);
    push(rep, "S1sq_endpoint", std::abs(E * S1 * S1 - std::sin(k) * std::sin(k)), 2.0 * dn,
         in_asym);
    return rep;
}

AuditReport audit_eta_bounds(const FloquetFrame& frame, double A, std::span<const double> grid) {
    AuditReport rep;
    const int n = frame.qe().n;
    const double k = frame.qe().k;
    auto th = lk_thresholds(A, k);
    bool applicable = static_cast<double>(n) > th.L;
    double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, m2 = 0.0;
    for (double x : grid) {
        double ep = sgn * frame.eta_prime(x);
        lo = std::min(lo, ep);
        hi = std::max(hi, ep);
        m2 = std::max(m2, std::abs(frame.eta_second(x)));
    }
    double npi = static_cast<double>(n) * kPi;
    push(rep, "eta_prime_lower", (static_cast<double>(n) - 1.0) * kPi - th.big_delta, lo,
         applicable, kAuditFloor * (1.0 + npi));
    push(rep, "eta_prime_upper", hi, npi + th.big_delta, applicable,
         kAuditFloor * (1.0 + npi));
    push(rep, "eta_second", m2, npi * th.big_delta, applicable,
         1e-7 * (1.0 + std::abs(frame.omega())));
    return rep;
}

}  // namespace spectral::floquet
