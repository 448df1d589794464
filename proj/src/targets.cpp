#include "spectral/targets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace spectral::targets {

using floquet::FloquetFrame;
using floquet::FrameCache;
using floquet::QuasiEigenvalue;
using numerics::NumericalError;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kQuasiTol = 1e-9;

bool same_k(double a, double b) { return std::abs(a - b) < kQuasiTol; }
bool mirrored_k(double a, double b) { return std::abs(a + b - kPi) < kQuasiTol; }
bool same_class(double a, double b) { return same_k(a, b) || mirrored_k(a, b); }

std::string join_indices(std::span<const std::size_t> idx) {
    std::ostringstream os;
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? ", " : "") << idx[i];
    return os.str();
}

}  // namespace

const char* to_string(ResonanceClass c) {
    switch (c) {
        case ResonanceClass::S1: return "S1";
        case ResonanceClass::S2: return "S2";
        case ResonanceClass::S3: return "S3";
    }
    return "?";
}

ClassificationError::ClassificationError(std::string clause_, std::vector<std::size_t> indices_,
                                         const std::string& detail)
    : std::runtime_error("classification failed [" + clause_ + "] targets {" +
                         join_indices(indices_) + "}: " + detail),
      clause(std::move(clause_)),
      indices(std::move(indices_)) {}

std::vector<S3MemberReport> check_s3_condition(std::span<const std::pair<int, double>> group,
                                               double A) {
    std::vector<S3MemberReport> out;
    if (group.size() < 2) return out;
    for (std::size_t i = 0; i < group.size(); ++i) {
        double ni = group[i].first;
        double lhs = 1.0 / (2.0 * ni);
        bool finite = true;
        for (std::size_t l = 0; l < group.size(); ++l) {
            if (l == i) continue;
            double nl = group[l].first;
            if (group[i].first == group[l].first) {
                finite = false;
                break;
            }
            lhs += nl / (ni * std::abs(ni - nl));
        }
        double delta = floquet::lk_thresholds(A, group[i].second).big_delta;
        double threshold = 1.0 / (50.0 * kPi + 50.0 * kPi * delta);
        S3MemberReport rep;
        rep.n = group[i].first;
        rep.lhs = finite ? lhs : std::numeric_limits<double>::infinity();
        rep.threshold = threshold;
        rep.pass = finite && lhs < threshold;
        out.push_back(rep);
    }
    return out;
}

double estimate_epsilon(const FloquetFrame& frame_i, const FloquetFrame& frame_j, double safety) {
    if (!(safety > 0.0 && safety < 1.0))
        throw NumericalError("estimate_epsilon: safety factor must lie in (0,1)");
    const auto& qi = frame_i.qe();
    const auto& qj = frame_j.qe();
    if (qi.n != qj.n || !same_class(qi.k, qj.k))
        throw NumericalError("estimate_epsilon: frames are not a same-band resonant pair");

    // Unperturbed combined phase Phi = 2 eta_i + 2 eta_j. The unit-window
    // integral of 1 - cos(Phi + c) equals 1 - Re(e^{ic} J); its minimum over
    // the unknown offset c is 1 - |J|.
    double rate = 2.0 * (frame_i.eta_max() + frame_j.eta_max());
    double worst = 0.0;
    const int n_windows = 16;
    for (int w = 0; w < n_windows; ++w) {
        double x0 = static_cast<double>(w) / n_windows;
        double re = numerics::integrate_oscillatory(
            [&](double t) { return std::cos(2.0 * frame_i.eta(t) + 2.0 * frame_j.eta(t)); }, x0,
            x0 + 1.0, rate);
        double im = numerics::integrate_oscillatory(
            [&](double t) { return std::sin(2.0 * frame_i.eta(t) + 2.0 * frame_j.eta(t)); }, x0,
            x0 + 1.0, rate);
        worst = std::max(worst, std::hypot(re, im));
    }
    double raw = 1.0 - worst;
    if (!(raw > 1e-9))
        throw NumericalError("estimate_epsilon: degenerate window integral (phase failed to "
                             "cancel over a period)");
    double eps = safety * raw;
    return std::min(std::max(eps, 1e-12), 1.0 - 1e-12);
}

TargetSpectrum classify(std::span<const QuasiEigenvalue> qes, std::span<const double> xis,
                        FrameCache& frames) {
    if (qes.empty() || qes.size() != xis.size())
        throw NumericalError("classify: need matching non-empty eigenvalue and phase lists");
    const double A = frames.potential().l1_norm();

    for (std::size_t i = 0; i < qes.size(); ++i) {
        if (!(xis[i] >= 0.0 && xis[i] <= kPi))
            throw ClassificationError("boundary_phase", {i}, "xi outside [0, pi]");
        for (std::size_t j = i + 1; j < qes.size(); ++j)
            if (std::abs(qes[i].E - qes[j].E) <= 1e-9 * (1.0 + std::abs(qes[i].E)))
                throw ClassificationError("duplicate_energy", {i, j},
                                          "two targets share one energy");
    }

    // group indices by quasimomentum class
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < qes.size(); ++i) {
        bool placed = false;
        for (auto& g : groups)
            if (same_class(qes[g.front()].k, qes[i].k)) {
                g.push_back(i);
                placed = true;
                break;
            }
        if (!placed) groups.push_back({i});
    }

    TargetSpectrum spec;
    spec.targets.resize(qes.size());
    for (std::size_t i = 0; i < qes.size(); ++i) {
        spec.targets[i].qe = qes[i];
        spec.targets[i].xi = xis[i];
    }
    spec.resonance_groups = groups;

    for (const auto& g : groups) {
        if (g.size() == 1) {
            std::size_t i = g.front();
            spec.targets[i].cls = ResonanceClass::S1;
            if (same_k(qes[i].k, kPi / 2)) {
                // the k = pi/2 self-resonance goes through the epsilon path
                const auto& fr = frames.get(qes[i].k, qes[i].n);
                spec.targets[i].epsilon = estimate_epsilon(fr, fr);
            }
            continue;
        }
        if (g.size() == 2) {
            std::size_t i = g[0], j = g[1];
            bool same_band_pair = qes[i].n == qes[j].n && mirrored_k(qes[i].k, qes[j].k) &&
                                  !same_k(qes[i].k, kPi / 2);
            if (same_band_pair) {
                spec.targets[i].cls = ResonanceClass::S2;
                spec.targets[j].cls = ResonanceClass::S2;
                const auto& fi = frames.get(qes[i].k, qes[i].n);
                const auto& fj = frames.get(qes[j].k, qes[j].n);
                double eps = estimate_epsilon(fi, fj);
                spec.targets[i].epsilon = eps;
                spec.targets[j].epsilon = eps;
                continue;
            }
        }
        // candidate cross-band group: every member must clear L(k) and the
        // group must satisfy the band-index separation inequality
        for (std::size_t i : g) {
            double L = floquet::lk_thresholds(A, qes[i].k).L;
            if (!(static_cast<double>(qes[i].n) > L))
                throw ClassificationError("s3_band_threshold", {i},
                                          "band index " + std::to_string(qes[i].n) +
                                              " does not exceed L(k) = " + std::to_string(L));
        }
        std::vector<std::pair<int, double>> members;
        for (std::size_t i : g) members.emplace_back(qes[i].n, qes[i].k);
        auto reports = check_s3_condition(members, A);
        for (std::size_t m = 0; m < reports.size(); ++m)
            if (!reports[m].pass)
                throw ClassificationError("s3_condition", {g[m]},
                                          "separation sum " + std::to_string(reports[m].lhs) +
                                              " is not below " +
                                              std::to_string(reports[m].threshold));
        for (std::size_t i : g) spec.targets[i].cls = ResonanceClass::S3;
    }
    return spec;
}

}  // namespace spectral::targets
