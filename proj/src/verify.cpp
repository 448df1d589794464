#include "spectral/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spectral::verify {

using floquet::FloquetFrame;
using numerics::NumericalError;

namespace {
constexpr double kPi = 3.14159265358979323846;

double dist_to_2pi_lattice(double a) {
    double m = std::round(a / (2.0 * kPi));
    double best = std::numeric_limits<double>::infinity();
    for (double mm : {m - 1.0, m, m + 1.0})
        best = std::min(best, std::abs(a - 2.0 * kPi * mm));
    return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// SampledPotential

SampledPotential::SampledPotential(std::vector<double> xs, std::vector<double> vs,
                                   std::span<const double> breakpoints)
    : xs_(std::move(xs)), vs_(std::move(vs)) {
    if (xs_.size() != vs_.size() || xs_.size() < 2)
        throw NumericalError("SampledPotential: need at least two samples");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (xs_[i] <= xs_[i - 1])
            throw NumericalError("SampledPotential: abscissae must increase (row " +
                                 std::to_string(i) + ")");
    step_ = (xs_.back() - xs_.front()) / static_cast<double>(xs_.size() - 1);
    uniform_ = true;
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (std::abs(xs_[i] - xs_.front() - step_ * static_cast<double>(i)) > 1e-9 * (1.0 + xs_[i]))
            uniform_ = false;
    breaks_.assign(breakpoints.begin(), breakpoints.end());
    std::sort(breaks_.begin(), breaks_.end());
    seg_begin_.push_back(0);
    for (double b : breaks_) {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), b - 1e-12);
        std::size_t idx = static_cast<std::size_t>(it - xs_.begin());
        if (idx > seg_begin_.back() && idx < xs_.size()) seg_begin_.push_back(idx);
    }
}

SampledPotential SampledPotential::from_csv(const std::filesystem::path& path,
                                            std::span<const double> breakpoints) {
    std::ifstream in(path);
    if (!in) throw NumericalError("SampledPotential: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,V", 0) != 0)
        throw NumericalError("SampledPotential: missing 'x,V' header in " + path.string());
    std::vector<double> xs, vs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw NumericalError("SampledPotential: malformed row " + std::to_string(row));
        try {
            xs.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw NumericalError("SampledPotential: unparsable number at row " +
                                 std::to_string(row));
        }
    }
    return SampledPotential(std::move(xs), std::move(vs), breakpoints);
}

double SampledPotential::operator()(double t) const {
    if (t <= xs_.front()) return vs_.front();
    if (t >= xs_.back()) return vs_.back();
    std::size_t i;
    if (uniform_) {
        i = static_cast<std::size_t>((t - xs_.front()) / step_);
        if (i >= xs_.size() - 1) i = xs_.size() - 2;
        while (i > 0 && t < xs_[i]) --i;
        while (i + 2 < xs_.size() && t >= xs_[i + 1]) ++i;
    } else {
        i = static_cast<std::size_t>(
                std::upper_bound(xs_.begin(), xs_.end(), t) - xs_.begin()) - 1;
    }
    // the sample segment containing t (stencils must not cross a jump)
    std::size_t seg = 0;
    for (std::size_t s = 0; s < seg_begin_.size(); ++s)
        if (seg_begin_[s] <= i) seg = s;
    std::size_t lo = seg_begin_[seg];
    std::size_t hi = (seg + 1 < seg_begin_.size()) ? seg_begin_[seg + 1] - 1 : xs_.size() - 1;
    // 6-point Lagrange around the containing cell, clamped to the segment
    std::size_t width = std::min<std::size_t>(5, hi - lo);
    std::size_t i0 = (i >= lo + 2) ? i - 2 : lo;
    if (i0 + width > hi) i0 = hi - width;
    double r = 0.0;
    for (std::size_t m = 0; m <= width; ++m) {
        double l = 1.0;
        for (std::size_t q = 0; q <= width; ++q)
            if (q != m) l *= (t - xs_[i0 + q]) / (xs_[i0 + m] - xs_[i0 + q]);
        r += l * vs_[i0 + m];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Probe trace

namespace {

struct ProbeField {
    const Potential* v;
    const FloquetFrame* frame;
    // state: [psi, lnR]
    void operator()(double x, const double* y, double* dy) const {
        double two_theta = 2.0 * (y[0] + frame->eta(x));
        double s2 = std::sin(two_theta);
        double c2 = std::cos(two_theta);
        double inv_eta = 2.0 * frame->phi_sq(x) / frame->omega();
        double vv = (*v)(x);
        dy[0] = -0.5 * vv * inv_eta * (1.0 - c2);
        dy[1] = 0.5 * vv * inv_eta * s2;
    }
};

}  // namespace

Trace prufer_trace(const Potential& v, const FloquetFrame& frame, double theta0, double x_max,
                   double grid_step, double rel_tol, std::span<const double> v_breakpoints) {
    if (!(x_max > 0.0)) throw NumericalError("prufer_trace: x_max must be positive");
    Trace tr;
    tr.frame = &frame;
    auto n_steps = static_cast<std::size_t>(std::floor(x_max / grid_step + 0.5));
    for (std::size_t i = 0; i <= n_steps; ++i)
        tr.x.push_back(std::min(static_cast<double>(i) * grid_step, x_max));
    if (tr.x.back() < x_max) tr.x.push_back(x_max);
    tr.x.erase(std::unique(tr.x.begin(), tr.x.end()), tr.x.end());
    tr.theta.resize(tr.x.size());
    tr.psi.resize(tr.x.size());
    tr.ln_r.resize(tr.x.size());

    ProbeField field{&v, &frame};
    std::vector<double> state = {theta0, 0.0};
    std::vector<double> cuts(v_breakpoints.begin(), v_breakpoints.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                              [&](double c) { return c <= 0.0 || c >= x_max; }),
               cuts.end());
    cuts.push_back(x_max);

    std::size_t gi = 0;
    double x = 0.0;
    double ytmp[2];
    auto emit = [&](std::size_t idx, double xx, const double* y) {
        tr.psi[idx] = y[0];
        tr.theta[idx] = y[0] + frame.eta(xx);
        tr.ln_r[idx] = y[1];
    };
    for (double cut : cuts) {
        if (cut <= x) continue;
        while (gi < tr.x.size() && tr.x[gi] <= x + 1e-15) {
            emit(gi, tr.x[gi], state.data());
            ++gi;
        }
        numerics::RkStepper<ProbeField> st(field, x, state, rel_tol, rel_tol * 1e-2);
        while (st.advance(cut)) {
            while (gi < tr.x.size() && tr.x[gi] <= st.x() + 1e-15) {
                st.dense(tr.x[gi], std::span<double>(ytmp, 2));
                emit(gi, tr.x[gi], ytmp);
                ++gi;
            }
        }
        state.assign(st.y().begin(), st.y().end());
        x = cut;
    }
    while (gi < tr.x.size()) {
        emit(gi, tr.x[gi], state.data());
        ++gi;
    }
    return tr;
}

Trace trace_from_synthesis(const synth::PruferTrajectory& traj, std::size_t target_index,
                           const FloquetFrame& frame) {
    if (target_index >= traj.theta.size())
        throw NumericalError("trace_from_synthesis: target index out of range");
    Trace tr;
    tr.frame = &frame;
    tr.x = traj.grid;
    tr.theta = traj.theta[target_index];
    tr.psi = traj.psi[target_index];
    tr.ln_r = traj.ln_r[target_index];
    return tr;
}

double Trace::theta_at(double t) const {
    if (x.empty() || frame == nullptr) throw NumericalError("Trace: empty");
    if (t <= x.front()) return psi.front() + frame->eta(t);
    if (t >= x.back()) return psi.back() + frame->eta(t);
    std::size_t i = static_cast<std::size_t>(
                        std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    std::size_t i0 = (i == 0) ? 0 : i - 1;
    if (i0 + 3 >= x.size()) i0 = x.size() - 4;
    double p = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
        double l = 1.0;
        for (std::size_t q = 0; q < 4; ++q)
            if (q != m) l *= (t - x[i0 + q]) / (x[i0 + m] - x[i0 + q]);
        p += l * psi[i0 + m];
    }
    return p + frame->eta(t);
}

// ---------------------------------------------------------------------------
// Decay report

DecayReport decay_report(std::span<const double> xs, std::span<const double> ln_r,
                         double tail_fraction, double E, double xi, double last_activation,
                         double margin) {
    if (xs.size() != ln_r.size() || xs.size() < 8)
        throw NumericalError("decay_report: trace too short");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw NumericalError("decay_report: tail_fraction outside (0,1)");
    double first_pos = 0.0;
    for (double v : xs)
        if (v > 0.0) {
            first_pos = v;
            break;
        }
    double base = std::max(last_activation, first_pos);
    if (!(base > 0.0)) throw NumericalError("decay_report: no positive abscissae");
    if (xs.back() < 10.0 * base)
        throw NumericalError("decay_report: trace does not cover a decade beyond the last "
                             "activation");
    double ln_hi = std::log(xs.back());
    double ln_lo = std::log(base);
    double x_fit_lo = std::exp(ln_hi - tail_fraction * (ln_hi - ln_lo));
    std::vector<double> u, w;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] >= x_fit_lo) {
            u.push_back(std::log(xs[i]));
            w.push_back(ln_r[i]);
        }
    auto fit = numerics::fit_line(u, w);
    DecayReport rep;
    rep.E = E;
    rep.xi = xi;
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.rms_residual = fit.rms_residual;
    rep.x_lo = x_fit_lo;
    rep.x_hi = xs.back();
    rep.l2_verdict = fit.slope < -0.5 - margin;
    return rep;
}

DecayReport decay_report(const Trace& trace, double tail_fraction, double E, double xi,
                         double last_activation, double margin) {
    return decay_report(trace.x, trace.ln_r, tail_fraction, E, xi, last_activation, margin);
}

// ---------------------------------------------------------------------------
// Oscillatory integral audits

namespace {

// max over the checkpoints xs of |int_{x0}^{x} f|, panels sized by `rate`.
double running_integral_max(const std::function<double(double)>& f, double x0,
                            std::span<const double> xs, double rate) {
    double acc = 0.0, worst = 0.0, prev = x0;
    for (double x : xs) {
        if (x <= prev) continue;
        acc += numerics::integrate_oscillatory(f, prev, x, rate);
        prev = x;
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

bool certify(const std::function<double(double)>& bound_gap, double lo, double hi, int samples) {
    for (int i = 0; i <= samples; ++i) {
        double t = lo + (hi - lo) * static_cast<double>(i) / samples;
        if (bound_gap(t) > 1e-9) return false;
    }
    return true;
}

}  // namespace

BoundAudit check_osc_bound(const std::function<double(double)>& theta,
                           const std::function<double(double)>& theta_prime, double a, double C,
                           double beta, double x0, std::span<const double> xs) {
    BoundAudit audit;
    audit.lemma = a == 1.0 ? "osc_base" : "osc_scaled";
    double aa = std::abs(a);
    double x_hi = xs.empty() ? x0 : *std::max_element(xs.begin(), xs.end());
    bool threshold_ok = x0 > floquet::s_const(aa, beta, C);
    bool derivative_ok = certify(
        [&](double t) { return std::abs(theta_prime(t) - a) - C / std::pow(t, beta); }, x0, x_hi,
        512);
    audit.hypothesis_ok = threshold_ok && derivative_ok;
    double rate = aa + C / std::pow(x0, beta);
    double lhs_sin = running_integral_max(
        [&](double t) { return std::sin(theta(t)) / t; }, x0, xs, rate);
    double lhs_cos = running_integral_max(
        [&](double t) { return std::cos(theta(t)) / t; }, x0, xs, rate);
    audit.lhs = std::max(lhs_sin, lhs_cos);
    audit.rhs = floquet::r_const(aa, beta, C) / std::pow(aa * x0, beta);
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    if (!threshold_ok) audit.note = "x0 below s(|a|,beta,C)";
    else if (!derivative_ok) audit.note = "phase derivative outside the stated envelope";
    return audit;
}

BoundAudit check_periodic_osc_bound(const std::function<double(double)>& gamma_weight,
                                    const std::function<double(double)>& theta,
                                    const std::function<double(double)>& theta_prime,
                                    const std::function<double(double)>& gamma_prime, double a,
                                    double x0, std::span<const double> xs) {
    BoundAudit audit;
    audit.lemma = "osc_periodic";
    double alpha = dist_to_2pi_lattice(a);
    double x_hi = xs.empty() ? x0 : *std::max_element(xs.begin(), xs.end());
    bool threshold_ok = alpha > 0.0 && x0 > floquet::r_alpha(alpha);
    bool derivative_ok = certify(
        [&](double t) {
            return std::abs(theta_prime(t) - a - gamma_prime(t)) - std::pow(t, -2.0 / 3.0);
        },
        x0, x_hi, 512);
    audit.hypothesis_ok = threshold_ok && derivative_ok;
    double gamma_l2 = std::sqrt(numerics::integrate_function(
        [&](double t) { return gamma_weight(t) * gamma_weight(t); }, 0.0, 1.0, 1e-10));
    double rate = std::abs(a) + 8.0;  // weight and phase modulation both 1-periodic
    audit.lhs = running_integral_max(
        [&](double t) { return gamma_weight(t) * std::sin(theta(t)) / t; }, x0, xs, rate);
    audit.rhs = gamma_l2 * floquet::r_alpha(alpha) / std::pow(x0, 2.0 / 3.0);
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    if (!threshold_ok) audit.note = "x0 below r(alpha)";
    else if (!derivative_ok) audit.note = "phase derivative outside the stated envelope";
    return audit;
}

namespace {

bool ratio_hypothesis(const Potential& v, const FloquetFrame& frame,
                      const std::function<double(double)>& cap, double x0, double x1) {
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
        double t = x0 + (x1 - x0) * static_cast<double>(i) / samples;
        double ratio = std::abs(v(t)) / std::abs(frame.eta_prime(t));
        if (ratio > cap(t) + 1e-12) return false;
    }
    return true;
}

}  // namespace

BoundAudit check_nonresonant(const FloquetFrame& frame_i, const FloquetFrame& frame_j,
                             const std::function<double(double)>& theta_i,
                             const std::function<double(double)>& theta_j, const Potential& v,
                             double x0, std::span<const double> xs) {
    const auto& qi = frame_i.qe();
    const auto& qj = frame_j.qe();
    double alpha1 = std::min(2.0 * std::abs(qi.k - qj.k), 2.0 * std::abs(qi.k + qj.k - kPi));
    if (alpha1 < 1e-9)
        throw NumericalError("check_nonresonant: quasimomenta are resonant (k_j in {k_i, pi-k_i})");
    BoundAudit audit;
    audit.lemma = "nonresonant";
    double x_hi = xs.empty() ? x0 : *std::max_element(xs.begin(), xs.end());
    bool threshold_ok = x0 >= floquet::r_alpha(alpha1);
    auto cap = [](double t) { return 1.0 / (8.0 * std::pow(t, 2.0 / 3.0)); };
    bool ratio_ok = ratio_hypothesis(v, frame_i, cap, x0, x_hi) &&
                    ratio_hypothesis(v, frame_j, cap, x0, x_hi);
    audit.hypothesis_ok = threshold_ok && ratio_ok;
    double rate = 2.0 * (frame_i.eta_max() + frame_j.eta_max());
    audit.lhs = running_integral_max(
        [&](double t) {
            return std::sin(2.0 * theta_i(t)) * std::sin(2.0 * theta_j(t)) /
                   (frame_i.eta_prime(t) * t);
        },
        x0, xs, rate);
    audit.rhs = frame_i.inv_eta_l2() * floquet::r_alpha(alpha1) / std::pow(x0, 2.0 / 3.0);
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    if (!threshold_ok) audit.note = "x0 below r(alpha_1)";
    else if (!ratio_ok) audit.note = "|V/eta'| exceeds the smallness hypothesis";
    return audit;
}

BoundAudit check_nonresonant_4theta(const FloquetFrame& frame_i,
                                    const std::function<double(double)>& theta_i,
                                    const Potential& v, double x0, std::span<const double> xs) {
    double k = frame_i.qe().k;
    if (std::abs(k - kPi / 2) < 1e-9)
        throw NumericalError("check_nonresonant_4theta: k = pi/2 is self-resonant");
    double alpha2 = std::min({4.0 * k, std::abs(4.0 * k - 2.0 * kPi), 4.0 * kPi - 4.0 * k});
    BoundAudit audit;
    audit.lemma = "nonresonant_4theta";
    double x_hi = xs.empty() ? x0 : *std::max_element(xs.begin(), xs.end());
    bool threshold_ok = x0 >= floquet::r_alpha(alpha2);
    auto cap = [](double t) { return 1.0 / (8.0 * std::pow(t, 2.0 / 3.0)); };
    bool ratio_ok = ratio_hypothesis(v, frame_i, cap, x0, x_hi);
    audit.hypothesis_ok = threshold_ok && ratio_ok;
    double rate = 4.0 * frame_i.eta_max();
    audit.lhs = running_integral_max(
        [&](double t) { return std::cos(4.0 * theta_i(t)) / (frame_i.eta_prime(t) * t); }, x0, xs,
        rate);
    audit.rhs = frame_i.inv_eta_l2() * floquet::r_alpha(alpha2) / std::pow(x0, 2.0 / 3.0);
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    if (!threshold_ok) audit.note = "x0 below r(alpha_2)";
    return audit;
}

BoundAudit check_same_band_lower(const FloquetFrame& frame_i, const FloquetFrame& frame_j,
                                 const std::function<double(double)>& theta_i,
                                 const std::function<double(double)>& theta_j, const Potential& v,
                                 double epsilon, double x0, double x1) {
    const auto& qi = frame_i.qe();
    const auto& qj = frame_j.qe();
    bool same_pair = qi.n == qj.n && std::abs(qi.k + qj.k - kPi) < 1e-9;
    if (!same_pair)
        throw NumericalError("check_same_band_lower: frames are not a same-band resonant pair");
    BoundAudit audit;
    audit.lemma = "same_band_lower";
    auto cap = [epsilon](double) { return epsilon / 2.0; };
    bool ratio_ok = ratio_hypothesis(v, frame_i, cap, x0, x1) &&
                    ratio_hypothesis(v, frame_j, cap, x0, x1);
    audit.hypothesis_ok = ratio_ok && epsilon > 0.0 && epsilon < 1.0;
    double rate = 2.0 * (frame_i.eta_max() + frame_j.eta_max());
    auto window = [&](const FloquetFrame& fr) {
        return numerics::integrate_oscillatory(
            [&](double t) {
                return (1.0 - std::cos(2.0 * theta_i(t) + 2.0 * theta_j(t))) /
                       (std::abs(fr.eta_prime(t)) * t);
            },
            x0, x1, rate);
    };
    double lhs_i = window(frame_i);
    double lhs_j = window(frame_j);
    audit.lhs = std::min(lhs_i, lhs_j);
    double a_i = std::max(frame_i.eta_max(), frame_j.eta_max());
    audit.rhs = (epsilon / a_i) * std::log(x1 / (x0 + 1.0));
    audit.pass = !audit.hypothesis_ok || audit.lhs > audit.rhs;
    if (!ratio_ok) audit.note = "|V/eta'| exceeds epsilon/2";
    return audit;
}

BoundAudit check_cross_band(const FloquetFrame& frame_i, const FloquetFrame& frame_j,
                            const std::function<double(double)>& theta_i,
                            const std::function<double(double)>& theta_j, const Potential& v,
                            double a_big_delta, double x0, double x1, double slack) {
    const auto& qi = frame_i.qe();
    const auto& qj = frame_j.qe();
    bool same_class =
        std::abs(qi.k - qj.k) < 1e-9 || std::abs(qi.k + qj.k - kPi) < 1e-9;
    if (!same_class || qi.n == qj.n)
        throw NumericalError("check_cross_band: need a resonant pair from different bands");
    BoundAudit audit;
    audit.lemma = "cross_band";
    double delta_k = floquet::lk_thresholds(a_big_delta, qi.k).big_delta;
    double L = floquet::lk_thresholds(a_big_delta, qi.k).L;
    bool band_ok = static_cast<double>(qi.n) > L && static_cast<double>(qj.n) > L;
    auto cap = [delta_k](double) { return delta_k / 2.0; };
    bool ratio_ok = ratio_hypothesis(v, frame_i, cap, x0, x1) &&
                    ratio_hypothesis(v, frame_j, cap, x0, x1);
    audit.hypothesis_ok = band_ok && ratio_ok;
    double rate = 2.0 * (frame_i.eta_max() + frame_j.eta_max());
    audit.lhs = std::abs(numerics::integrate_oscillatory(
        [&](double t) {
            return std::sin(2.0 * theta_i(t)) * std::sin(2.0 * theta_j(t)) /
                   (frame_i.eta_prime(t) * t);
        },
        x0, x1, rate));
    double dn = std::abs(static_cast<double>(qi.n - qj.n)) * static_cast<double>(qi.n);
    audit.rhs = (10.0 + 10.0 * delta_k) / dn * std::log(x1) + slack / x0;
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    if (!band_ok) audit.note = "band indices do not clear L(k)";
    else if (!ratio_ok) audit.note = "|V/eta'| exceeds delta(k)/2";
    return audit;
}

BoundAudit check_cross_band_4theta(const FloquetFrame& frame_i,
                                   const std::function<double(double)>& theta_i,
                                   const Potential& v, double a_big_delta, double x0, double x1,
                                   double slack) {
    const auto& qi = frame_i.qe();
    BoundAudit audit;
    audit.lemma = "cross_band_4theta";
    double delta_k = floquet::lk_thresholds(a_big_delta, qi.k).big_delta;
    double L = floquet::lk_thresholds(a_big_delta, qi.k).L;
    bool band_ok = static_cast<double>(qi.n) > L;
    auto cap = [delta_k](double) { return delta_k / 2.0; };
    bool ratio_ok = ratio_hypothesis(v, frame_i, cap, x0, x1);
    audit.hypothesis_ok = band_ok && ratio_ok;
    double rate = 4.0 * frame_i.eta_max();
    audit.lhs = std::abs(numerics::integrate_oscillatory(
        [&](double t) { return std::cos(4.0 * theta_i(t)) / (frame_i.eta_prime(t) * t); }, x0, x1,
        rate));
    double nn = static_cast<double>(qi.n) * static_cast<double>(qi.n);
    audit.rhs = (10.0 + 10.0 * delta_k) / nn * std::log(x1) + slack / x0;
    audit.pass = !audit.hypothesis_ok || audit.lhs <= audit.rhs;
    return audit;
}

HalfPeriodCheck check_half_period_structure(const std::function<double(double)>& theta,
                                            const std::function<double(double)>& theta_prime,
                                            double C, double beta, double x0, int segments) {
    HalfPeriodCheck out;
    // Successive phase multiples of pi starting past x0.
    double t = x0;
    double target = (std::floor(theta(x0) / kPi) + 1.0) * kPi;
    std::vector<double> nodes;
    for (int i = 0; i <= segments; ++i) {
        // Newton from an Euler prediction; theta' ~ 1 so steps are tame.
        double guess = t + (target - theta(t)) / std::max(theta_prime(t), 0.5);
        for (int it = 0; it < 60; ++it) {
            double f = theta(guess) - target;
            if (std::abs(f) < 1e-12) break;
            guess -= f / theta_prime(guess);
        }
        nodes.push_back(guess);
        t = guess;
        target += kPi;
    }
    out.alternating = true;
    out.within_envelope = true;
    out.segments = segments;
    double prev_sign = 0.0;
    for (int i = 0; i + 1 <= segments; ++i) {
        double a = nodes[i], b = nodes[i + 1];
        double integral = numerics::integrate_oscillatory(
            [&](double tt) { return std::sin(theta(tt)); }, a, b, 2.0);
        double magnitude = std::abs(integral);
        double envelope = 10.0 * kPi * C / std::pow(a, beta);
        if (std::abs(magnitude - 2.0) > envelope) out.within_envelope = false;
        double s = integral > 0 ? 1.0 : -1.0;
        if (i > 0 && s == prev_sign) out.alternating = false;
        prev_sign = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Randomized audit suites

void LemmaSuiteReport::tally() {
    passed = failed = inapplicable = 0;
    for (const auto& a : audits) {
        if (!a.hypothesis_ok)
            ++inapplicable;
        else if (a.pass)
            ++passed;
        else
            ++failed;
    }
}

LemmaSuiteReport run_randomized_audits(std::uint64_t seed, int n_base, int n_scaled,
                                       int n_periodic, int n_nonresonant) {
    numerics::SplitMix64 rng(seed);
    LemmaSuiteReport rep;

    // phase t -> a t + c C I(t) with I' = t^-beta sin(nu ln t), in closed form
    auto make_perturbed_phase = [](double a, double C, double beta, double nu, double c) {
        auto integral = [=](double t) {
            if (beta == 1.0) return -std::cos(nu * std::log(t)) / nu;
            double p = 1.0 - beta;
            double u = std::log(t);
            return std::pow(t, p) * (p * std::sin(nu * u) - nu * std::cos(nu * u)) /
                   (p * p + nu * nu);
        };
        auto theta = [=](double t) { return a * t + c * C * integral(t); };
        auto theta_prime = [=](double t) {
            return a + c * C * std::pow(t, -beta) * std::sin(nu * std::log(t));
        };
        return std::make_pair(std::function<double(double)>(theta),
                              std::function<double(double)>(theta_prime));
    };

    for (int i = 0; i < n_base; ++i) {
        double beta = rng.uniform(0.75, 1.0);
        double C = rng.uniform(0.05, 2.0);
        double nu = rng.uniform(0.5, 3.0);
        double c = rng.uniform(-1.0, 1.0);
        auto [theta, theta_prime] = make_perturbed_phase(1.0, C, beta, nu, c);
        double x0 = floquet::s_const(1.0, beta, C) * (1.0 + rng.uniform(0.02, 0.3));
        std::vector<double> xs = {1.02 * x0, 1.05 * x0, 1.1 * x0, 1.2 * x0};
        rep.audits.push_back(check_osc_bound(theta, theta_prime, 1.0, C, beta, x0, xs));
    }
    for (int i = 0; i < n_scaled; ++i) {
        double beta = rng.uniform(0.75, 1.0);
        double C = rng.uniform(0.05, 2.0);
        double nu = rng.uniform(0.5, 3.0);
        double c = rng.uniform(-1.0, 1.0);
        double a = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.3, 8.0);
        auto [theta, theta_prime] = make_perturbed_phase(a, C, beta, nu, c);
        double x0 = floquet::s_const(std::abs(a), beta, C) * (1.0 + rng.uniform(0.02, 0.3));
        std::vector<double> xs = {1.02 * x0, 1.05 * x0, 1.1 * x0, 1.2 * x0};
        rep.audits.push_back(check_osc_bound(theta, theta_prime, a, C, beta, x0, xs));
    }
    for (int i = 0; i < n_periodic; ++i) {
        double alpha = rng.uniform(0.9, kPi);
        int m = rng.uniform_int(0, 2);
        double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double a = 2.0 * kPi * m + sgn * alpha;
        double g0 = rng.uniform(-1.0, 1.0);
        double gc1 = rng.uniform(-1.0, 1.0), gs1 = rng.uniform(-1.0, 1.0);
        double gc2 = rng.uniform(-0.5, 0.5);
        auto weight = [=](double t) {
            return g0 + gc1 * std::cos(2.0 * kPi * t) + gs1 * std::sin(2.0 * kPi * t) +
                   gc2 * std::cos(4.0 * kPi * t);
        };
        double gamma_amp = rng.uniform(0.0, 0.5);
        auto gamma = [=](double t) { return gamma_amp * std::sin(2.0 * kPi * t); };
        auto gamma_prime = [=](double t) {
            return gamma_amp * 2.0 * kPi * std::cos(2.0 * kPi * t);
        };
        double c = rng.uniform(-1.0, 1.0);
        auto theta = [=](double t) { return a * t + gamma(t) + c * 3.0 * std::cbrt(t); };
        auto theta_prime = [=](double t) {
            return a + gamma_prime(t) + c * std::pow(t, -2.0 / 3.0);
        };
        double x0 = floquet::r_alpha(alpha) * (1.0 + rng.uniform(0.01, 0.15));
        std::vector<double> xs = {1.01 * x0, 1.03 * x0, 1.08 * x0};
        rep.audits.push_back(
            check_periodic_osc_bound(weight, theta, theta_prime, gamma_prime, a, x0, xs));
    }
    if (n_nonresonant > 0) {
        auto v0 = floquet::PeriodicPotential::zero();
        floquet::FrameCache cache(v0);
        for (int i = 0; i < n_nonresonant; ++i) {
            double ki = rng.uniform(0.35, kPi - 0.35);
            double kj = rng.uniform(0.35, kPi - 0.35);
            // keep the pair non-resonant with a workable separation
            if (std::abs(ki - kj) < 0.15 || std::abs(ki + kj - kPi) < 0.15) {
                kj = kPi / 2 + (kj < kPi / 2 ? -0.45 : 0.45) + 0.3 * (ki / kPi - 0.5);
                if (std::abs(ki - kj) < 0.15 || std::abs(ki + kj - kPi) < 0.15) kj += 0.21;
            }
            int ni = rng.uniform_int(1, 3), nj = rng.uniform_int(1, 3);
            const auto& fi = cache.get(ki, ni);
            const auto& fj = cache.get(kj, nj);
            double ti0 = rng.uniform(0.0, kPi), tj0 = rng.uniform(0.0, kPi);
            auto theta_i = [&fi, ti0](double t) { return ti0 + fi.eta(t); };
            auto theta_j = [&fj, tj0](double t) { return tj0 + fj.eta(t); };
            double alpha1 =
                std::min(2.0 * std::abs(ki - kj), 2.0 * std::abs(ki + kj - kPi));
            double x0 = floquet::r_alpha(alpha1) * (1.0 + rng.uniform(0.01, 0.2));
            std::vector<double> xs = {1.02 * x0, 1.06 * x0};
            Potential zero_v = [](double) { return 0.0; };
            rep.audits.push_back(
                check_nonresonant(fi, fj, theta_i, theta_j, zero_v, x0, xs));
        }
    }
    rep.tally();
    return rep;
}

}  // namespace spectral::verify
