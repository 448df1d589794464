#include "spectral/numerics.hpp"

#include <algorithm>
#include <cassert>

namespace spectral::numerics {

namespace {

// Field evaluations are clamped to stay strictly left of the segment end so
// that a piecewise field is read as left-closed at its breakpoints.
struct FnField {
    const Field* f;
    std::size_t n;
    double x_max;
    void operator()(double x, const double* y, double* dy) const {
        if (x >= x_max) x = std::nextafter(x_max, -std::numeric_limits<double>::infinity());
        (*f)(x, std::span<const double>(y, n), std::span<double>(dy, n));
    }
};

std::vector<double> segment_bounds(double x0, double x1, std::span<const double> breakpoints) {
    std::vector<double> cuts;
    cuts.push_back(x0);
    std::vector<double> bp(breakpoints.begin(), breakpoints.end());
    std::sort(bp.begin(), bp.end());
    for (double b : bp)
        if (b > x0 + 1e-14 * (1.0 + std::abs(x0)) && b < x1 - 1e-14 * (1.0 + std::abs(x1)))
            if (b > cuts.back() + 1e-13 * (1.0 + std::abs(b))) cuts.push_back(b);
    cuts.push_back(x1);
    return cuts;
}

}  // namespace

void DenseTrajectory::evaluate(double x, std::span<double> out) const {
    if (knots_.empty()) throw NumericalError("DenseTrajectory: empty");
    if (x <= knots_.front()) x = knots_.front();
    if (x >= knots_.back()) x = knots_.back();
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t seg = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
    if (seg >= knots_.size() - 1) seg = knots_.size() - 2;
    double xl = knots_[seg], xr = knots_[seg + 1];
    double s = (x - xl) / (xr - xl);
    double s1 = 1.0 - s;
    const double* rc = rcont_.data() + seg * 5 * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double* r = rc + i;
        // layout: component-major within a segment: r[j*dim_]
        double v = r[0 * dim_] +
                   s * (r[1 * dim_] + s1 * (r[2 * dim_] + s * (r[3 * dim_] + s1 * r[4 * dim_])));
        out[i] = v;
    }
}

double DenseTrajectory::evaluate(double x, std::size_t component) const {
    std::vector<double> tmp(dim_);
    evaluate(x, tmp);
    return tmp[component];
}

DenseTrajectory integrate_ivp(const Field& field, double x0, double x1,
                              std::span<const double> y0, const IntegrateOptions& opt) {
    if (!(x1 > x0)) throw NumericalError("integrate_ivp: requires x1 > x0");
    DenseTrajectory out;
    out.dim_ = y0.size();
    out.knots_.push_back(x0);
    out.states_.insert(out.states_.end(), y0.begin(), y0.end());

    auto cuts = segment_bounds(x0, x1, opt.breakpoints);
    std::vector<double> y(y0.begin(), y0.end());
    std::uint64_t total_steps = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        FnField ff{&field, y.size(), cuts[c + 1]};
        RkStepper<FnField> st(ff, cuts[c], y, opt.rel_tol, opt.abs_tol, opt.max_step);
        while (st.advance(cuts[c + 1])) {
            out.knots_.push_back(st.x());
            auto ys = st.y();
            out.states_.insert(out.states_.end(), ys.begin(), ys.end());
            for (int j = 0; j < 5; ++j) {
                auto rc = st.dense_coeff(j);
                out.rcont_.insert(out.rcont_.end(), rc.begin(), rc.end());
            }
            if (opt.max_steps && ++total_steps > opt.max_steps)
                throw NumericalError("integrate_ivp: max step count exceeded");
        }
        y.assign(st.y().begin(), st.y().end());
    }
    return out;
}

void integrate_ivp_sampled(const Field& field, double x0, double x1, std::span<const double> y0,
                           std::span<const double> xs,
                           const std::function<void(std::size_t, double, std::span<const double>)>& sink,
                           const IntegrateOptions& opt) {
    if (!(x1 > x0)) throw NumericalError("integrate_ivp: requires x1 > x0");
    std::size_t idx = 0;
    std::vector<double> tmp(y0.size());
    auto emit_at = [&](double x, std::span<const double> y) {
        sink(idx, x, y);
        ++idx;
    };
    while (idx < xs.size() && xs[idx] <= x0) emit_at(xs[idx], y0);

    auto cuts = segment_bounds(x0, x1, opt.breakpoints);
    std::vector<double> y(y0.begin(), y0.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        FnField ff{&field, y.size(), cuts[c + 1]};
        RkStepper<FnField> st(ff, cuts[c], y, opt.rel_tol, opt.abs_tol, opt.max_step);
        while (st.advance(cuts[c + 1])) {
            while (idx < xs.size() && xs[idx] <= st.x()) {
                st.dense(xs[idx], tmp);
                emit_at(xs[idx], tmp);
            }
        }
        y.assign(st.y().begin(), st.y().end());
    }
    while (idx < xs.size()) emit_at(xs[idx], y);
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericalError("find_root_bracketed: no sign change on bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {  // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

namespace {

struct GaussRule {
    std::vector<double> x, w;
};

const GaussRule& gl7() {
    static GaussRule r = [] {
        GaussRule g;
        gauss_legendre(7, g.x, g.w);
        return g;
    }();
    return r;
}

const GaussRule& gl15() {
    static GaussRule r = [] {
        GaussRule g;
        gauss_legendre(15, g.x, g.w);
        return g;
    }();
    return r;
}

void gauss_panel(const std::function<double(double)>& f, double a, double b, double& i15,
                 double& i7) {
    const auto& g15 = gl15();
    const auto& g7 = gl7();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s15 = 0.0, s7 = 0.0;
    for (int i = 0; i < 15; ++i) s15 += g15.w[i] * f(mid + half * g15.x[i]);
    for (int i = 0; i < 7; ++i) s7 += g7.w[i] * f(mid + half * g7.x[i]);
    i15 = s15 * half;
    i7 = s7 * half;
}

}  // namespace

double integrate_function(const std::function<double(double)>& f, double a, double b, double tol,
                          std::span<const double> breakpoints) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    struct Piece {
        double a, b, val, err;
    };
    std::vector<Piece> pieces;
    auto cuts = segment_bounds(a, b, breakpoints);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double i15, i7;
        gauss_panel(f, cuts[i], cuts[i + 1], i15, i7);
        pieces.push_back({cuts[i], cuts[i + 1], i15, std::abs(i15 - i7)});
    }
    const std::size_t limit = 4096;
    for (;;) {
        double total = 0.0, err = 0.0;
        for (const auto& p : pieces) {
            total += p.val;
            err += p.err;
        }
        if (err <= tol * (1.0 + std::abs(total))) return sign * total;
        if (pieces.size() >= limit)
            throw NumericalError("integrate_function: subdivision limit exhausted");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < pieces.size(); ++i)
            if (pieces[i].err > pieces[worst].err) worst = i;
        Piece p = pieces[worst];
        double mid = 0.5 * (p.a + p.b);
        Piece left{p.a, mid, 0, 0}, right{mid, p.b, 0, 0};
        double i7;
        gauss_panel(f, left.a, left.b, left.val, i7);
        left.err = std::abs(left.val - i7);
        gauss_panel(f, right.a, right.b, right.val, i7);
        right.err = std::abs(right.val - i7);
        pieces[worst] = left;
        pieces.push_back(right);
    }
}

double integrate_oscillatory(const std::function<double(double)>& f, double a, double b,
                             double rate) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    double panel = 8.0 / std::max(rate, 1e-9);
    panel = std::min(panel, b - a);
    auto n = static_cast<std::size_t>(std::ceil((b - a) / panel));
    n = std::max<std::size_t>(n, 1);
    double h = (b - a) / static_cast<double>(n);
    const auto& g = gl15();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = a + h * static_cast<double>(i);
        double mid = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (int j = 0; j < 15; ++j) s += g.w[j] * f(mid + half * g.x[j]);
        total += s * half;
    }
    return sign * total;
}

LineFit fit_line(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size() || u.size() < 2)
        throw NumericalError("fit_line: need at least two points");
    double n = static_cast<double>(u.size());
    double su = 0, sv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
    }
    double mu = su / n, mv = sv / n;
    double suu = 0, suv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - mu) * (u[i] - mu);
        suv += (u[i] - mu) * (v[i] - mv);
    }
    if (suu <= 0.0) throw NumericalError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = suv / suu;
    fit.intercept = mv - fit.slope * mu;
    double ss = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double r = v[i] - (fit.slope * u[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

PeriodicCubic::PeriodicCubic(std::vector<double> values, std::vector<double> derivatives)
    : values_(std::move(values)), derivs_(std::move(derivatives)) {
    if (values_.size() != derivs_.size() || values_.size() < 2)
        throw NumericalError("PeriodicCubic: bad table");
    std::size_t n = values_.size();
    inv_h_ = static_cast<double>(n);
    double h = 1.0 / inv_h_;
    prefix_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v0 = values_[i], v1 = values_[(i + 1) % n];
        double d0 = derivs_[i], d1 = derivs_[(i + 1) % n];
        // exact integral of the Hermite cubic over one cell
        double cell = h * (0.5 * (v0 + v1) + h * (d0 - d1) / 12.0);
        prefix_[i + 1] = prefix_[i] + cell;
    }
    mean_ = prefix_[n];
}

double PeriodicCubic::operator()(double x) const {
    double u = x - std::floor(x);
    double t = u * inv_h_;
    auto i = static_cast<std::size_t>(t);
    if (i >= values_.size()) i = values_.size() - 1;
    double th = t - static_cast<double>(i);
    std::size_t j = (i + 1) % values_.size();
    double h = 1.0 / inv_h_;
    double t2 = th * th, t3 = t2 * th;
    double h00 = 1.0 - 3.0 * t2 + 2.0 * t3;
    double h10 = th - 2.0 * t2 + t3;
    double h01 = 3.0 * t2 - 2.0 * t3;
    double h11 = -t2 + t3;
    return h00 * values_[i] + h10 * h * derivs_[i] + h01 * values_[j] + h11 * h * derivs_[j];
}

double PeriodicCubic::derivative(double x) const {
    double u = x - std::floor(x);
    double t = u * inv_h_;
    auto i = static_cast<std::size_t>(t);
    if (i >= values_.size()) i = values_.size() - 1;
    double th = t - static_cast<double>(i);
    std::size_t j = (i + 1) % values_.size();
    double t2 = th * th;
    double dh00 = -6.0 * th + 6.0 * t2;
    double dh10 = 1.0 - 4.0 * th + 3.0 * t2;
    double dh01 = 6.0 * th - 6.0 * t2;
    double dh11 = -2.0 * th + 3.0 * t2;
    return inv_h_ * (dh00 * values_[i] + dh01 * values_[j]) + dh10 * derivs_[i] + dh11 * derivs_[j];
}

double PeriodicCubic::integral_from_zero(double x) const {
    double whole = std::floor(x);
    double u = x - whole;
    double t = u * inv_h_;
    auto i = static_cast<std::size_t>(t);
    if (i >= values_.size()) i = values_.size() - 1;
    double th = t - static_cast<double>(i);
    std::size_t j = (i + 1) % values_.size();
    double h = 1.0 / inv_h_;
    double t2 = th * th, t3 = t2 * th, t4 = t3 * th;
    double ih00 = th - t3 + 0.5 * t4;
    double ih10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
    double ih01 = t3 - 0.5 * t4;
    double ih11 = -t3 / 3.0 + 0.25 * t4;
    double part = h * (ih00 * values_[i] + ih01 * values_[j]) +
                  h * h * (ih10 * derivs_[i] + ih11 * derivs_[j]);
    return whole * mean_ + prefix_[i] + part;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace spectral::numerics
