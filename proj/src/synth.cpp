#include "spectral/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace spectral::synth {

using floquet::FloquetFrame;
using floquet::FrameCache;
using numerics::NumericalError;
using targets::ResonanceClass;
using targets::TargetSpectrum;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* to_string(Mode m) { return m == Mode::paper_faithful ? "paper_faithful" : "practical"; }

// ---------------------------------------------------------------------------
// GrowthFn

GrowthFn GrowthFn::log_preset(double c) {
    if (!(c > 0)) throw NumericalError("GrowthFn: log preset needs c > 0");
    GrowthFn g;
    g.kind_ = Kind::log;
    g.c_ = c;
    return g;
}

GrowthFn GrowthFn::power_preset(double c, double p) {
    if (!(c > 0) || !(p > 0) || !(p < 1))
        throw NumericalError("GrowthFn: power preset needs c > 0 and 0 < p < 1");
    GrowthFn g;
    g.kind_ = Kind::power;
    g.c_ = c;
    g.p_ = p;
    return g;
}

GrowthFn GrowthFn::table(std::vector<double> xs, std::vector<double> hs) {
    if (xs.size() != hs.size() || xs.size() < 2)
        throw NumericalError("GrowthFn: table needs at least two matching samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] <= xs[i - 1]) throw NumericalError("GrowthFn: table abscissae must increase");
    GrowthFn g;
    g.kind_ = Kind::tab;
    g.xs_ = std::move(xs);
    g.hs_ = std::move(hs);
    return g;
}

double GrowthFn::operator()(double x) const {
    switch (kind_) {
        case Kind::log: return c_ * std::log(2.0 + std::max(x, 0.0));
        case Kind::power: return c_ * std::pow(std::max(x, 0.0), p_);
        case Kind::tab: {
            if (x <= xs_.front()) return hs_.front();
            if (x >= xs_.back()) return hs_.back();
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
            double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return hs_[i] + t * (hs_[i + 1] - hs_[i]);
        }
    }
    return 0.0;
}

double GrowthFn::threshold_position(double threshold) const {
    switch (kind_) {
        case Kind::log: {
            double e = threshold / c_;
            if (e > 700.0)
                throw NumericalError("GrowthFn: threshold position overflows the log preset");
            return std::max(0.0, std::exp(e) - 2.0);
        }
        case Kind::power:
            return std::pow(threshold / c_, 1.0 / p_);
        case Kind::tab: {
            if (!(hs_.back() > threshold))
                throw NumericalError("GrowthFn: tabulated envelope never exceeds the threshold");
            // rightmost point where h <= threshold
            double pos = 0.0;
            for (std::size_t i = xs_.size() - 1; i-- > 0;) {
                double h0 = hs_[i], h1 = hs_[i + 1];
                if (h0 > threshold && h1 > threshold) continue;
                if (h1 <= threshold) {
                    pos = xs_[i + 1];
                } else {
                    pos = xs_[i] + (threshold - h0) * (xs_[i + 1] - xs_[i]) / (h1 - h0);
                }
                return pos;
            }
            return 0.0;
        }
    }
    return 0.0;
}

std::string GrowthFn::describe() const {
    switch (kind_) {
        case Kind::log: return "log(c=" + std::to_string(c_) + ")";
        case Kind::power:
            return "power(c=" + std::to_string(c_) + ", p=" + std::to_string(p_) + ")";
        case Kind::tab: return "table(" + std::to_string(xs_.size()) + " points)";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Plan constants

SynthesisPlan plan_constants(const TargetSpectrum& spectrum, FrameCache& frames,
                             std::optional<GrowthFn> h, Mode mode, double scale, double spacing,
                             std::span<const double> amplitude_override) {
    const std::size_t K = spectrum.targets.size();
    if (K == 0) throw NumericalError("plan_constants: empty spectrum");
    if (!amplitude_override.empty() && amplitude_override.size() != K)
        throw NumericalError("plan_constants: amplitude override size mismatch");

    SynthesisPlan plan;
    plan.mode = mode;
    plan.scale = scale;
    plan.spacing = spacing;
    plan.h = h;
    plan.targets.resize(K);

    bool any_s3 = false;
    for (const auto& t : spectrum.targets) any_s3 |= t.cls == ResonanceClass::S3;

    double sum_c = 0.0, sum_inv_b = 0.0, sum_hyp = 0.0, t_prev = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        const auto& tgt = spectrum.targets[j];
        PlanTarget& pt = plan.targets[j];
        const FloquetFrame& own = frames.get(tgt.qe.k, tgt.qe.n);
        const FloquetFrame& mirror = frames.get(kPi - tgt.qe.k, tgt.qe.n);
        pt.A = std::max(own.eta_max(), mirror.eta_max());
        pt.B = std::min(own.eta_min(), mirror.eta_min());
        pt.epsilon = tgt.epsilon;

        bool has_override = !amplitude_override.empty() && std::isfinite(amplitude_override[j]);
        if (has_override) {
            pt.C = amplitude_override[j];
        } else if (mode == Mode::paper_faithful) {
            pt.C = tgt.epsilon ? 400.0 * pt.A / *tgt.epsilon : 400.0 * pt.A;
        } else {
            pt.C = scale * 4.0 * own.eta_abs_mean() * (tgt.epsilon ? 1.0 / *tgt.epsilon : 1.0);
        }
        if (!(pt.C >= 0.0)) throw NumericalError("plan_constants: negative amplitude");

        // same-band pairs share one amplitude; mirror the first member's
        if (tgt.cls == ResonanceClass::S2 && !has_override) {
            for (std::size_t i = 0; i < j; ++i) {
                const auto& other = spectrum.targets[i];
                if (other.cls == ResonanceClass::S2 && other.qe.n == tgt.qe.n &&
                    std::abs(other.qe.k + tgt.qe.k - kPi) < 1e-9) {
                    pt.C = std::max(pt.C, plan.targets[i].C);
                    plan.targets[i].C = pt.C;
                }
            }
        }
    }
    // re-run the running sums after amplitude equalization
    for (std::size_t j = 0; j < K; ++j) {
        const auto& tgt = spectrum.targets[j];
        PlanTarget& pt = plan.targets[j];
        sum_c += pt.C;
        sum_inv_b += 1.0 / pt.B;
        if (pt.epsilon) sum_hyp += 2.0 / (pt.B * *pt.epsilon);
        if (any_s3) {
            double dk = floquet::lk_thresholds(frames.potential().l1_norm(), tgt.qe.k).big_delta;
            if (dk > 0.0) sum_hyp += 2.0 / (pt.B * dk);
        }

        // separations among targets 1..j
        double alpha = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i <= j; ++i) {
            double ki = spectrum.targets[i].qe.k;
            if (std::abs(ki - kPi / 2) > 1e-9)
                alpha = std::min({alpha, 4.0 * ki, 4.0 * kPi - 4.0 * ki});
            for (std::size_t l = i; l <= j; ++l) {
                double kl = spectrum.targets[l].qe.k;
                if (l > i && std::abs(ki - kl) > 1e-9)
                    alpha = std::min(alpha, 2.0 * std::abs(ki - kl));
                if (std::abs(ki + kl - kPi) > 1e-9)
                    alpha = std::min(alpha, 2.0 * std::abs(ki + kl - kPi));
            }
        }
        pt.alpha = alpha;
        pt.alpha_defined = std::isfinite(alpha);

        pt.x_threshold = h ? h->threshold_position(10.0 * sum_c) : 0.0;

        double jj = static_cast<double>(j + 1);
        pt.t_terms[0] = pt.x_threshold + t_prev;
        pt.t_terms[1] = std::pow(8.0 * (1.0 + sum_inv_b) * sum_c, 3.0);
        pt.t_terms[2] = sum_hyp * sum_c;
        if (pt.alpha_defined) {
            double ra = floquet::r_alpha(pt.alpha);
            pt.t_terms[3] = ra + std::pow(std::pow(10.0, jj) * ra * sum_c, 1.5);
        } else {
            pt.t_terms[3] = 0.0;
        }
        pt.t_terms[4] = std::pow(10.0, jj) * (static_cast<double>(tgt.qe.n) + sum_c);

        if (mode == Mode::paper_faithful) {
            double t_max = *std::max_element(pt.t_terms.begin(), pt.t_terms.end());
            if (!std::isfinite(t_max))
                throw NumericalError("plan_constants: activation lower bound overflows");
            pt.T = t_max * (1.0 + 1e-6) + 1e-6;
        } else {
            pt.T = std::max(t_prev + spacing, pt.x_threshold);
        }
        if (pt.T <= t_prev) pt.T = t_prev + std::max(spacing, 1.0);
        t_prev = pt.T;
    }
    return plan;
}

double initial_phase(const FloquetFrame& frame, double xi) {
    if (!(xi >= 0.0 && xi <= kPi)) throw NumericalError("initial_phase: xi outside [0, pi]");
    double a = frame.phi_prime0().real();
    double b = frame.phi_prime0().imag();
    double u0 = std::cos(xi), u0p = std::sin(xi);
    double rho_im = u0;
    double rho_re = (u0p - u0 * a) / b;
    return std::atan2(rho_im, rho_re);
}

// ---------------------------------------------------------------------------
// Coupled synthesis

namespace {

struct SynthField {
    const FloquetFrame* const* frames;
    const double* signed_c;  // (-1)^{n_j} C_j
    const char* active;
    std::size_t k;
    // state: [psi_1..psi_K, lnR_1..lnR_K] with psi_j = Theta_j - eta_j(x)
    void operator()(double x, const double* y, double* dy) const {
        double s2[16], c2[16], inv_eta[16];
        double v = 0.0;
        const double w = 1.0 / (1.0 + x);
        for (std::size_t j = 0; j < k; ++j) {
            const FloquetFrame& f = *frames[j];
            double two_theta = 2.0 * (y[j] + f.eta(x));
            s2[j] = std::sin(two_theta);
            c2[j] = std::cos(two_theta);
            inv_eta[j] = 2.0 * f.phi_sq(x) / f.omega();
            if (active[j]) v += signed_c[j] * s2[j] * w;
        }
        for (std::size_t j = 0; j < k; ++j) {
            dy[j] = -0.5 * v * inv_eta[j] * (1.0 - c2[j]);
            dy[k + j] = 0.5 * v * inv_eta[j] * s2[j];
        }
    }
};

}  // namespace

PruferTrajectory synthesize(const SynthesisPlan& plan, const TargetSpectrum& spectrum,
                            FrameCache& frames, double x_max, double grid_step, double rel_tol) {
    const std::size_t K = spectrum.targets.size();
    if (plan.targets.size() != K) throw NumericalError("synthesize: plan/spectrum mismatch");
    if (K == 0 || K > 16) throw NumericalError("synthesize: target count out of range");
    if (!(grid_step > 0.0)) throw NumericalError("synthesize: grid_step must be positive");
    for (const auto& pt : plan.targets)
        if (pt.T >= x_max)
            throw NumericalError("synthesize: x_max must exceed every activation position");

    std::vector<const FloquetFrame*> fr(K);
    std::vector<double> signed_c(K);
    std::vector<bool> active_storage(K, false);
    for (std::size_t j = 0; j < K; ++j) {
        const auto& tgt = spectrum.targets[j];
        fr[j] = &frames.get(tgt.qe.k, tgt.qe.n);
        signed_c[j] = (tgt.qe.n % 2 == 0 ? 1.0 : -1.0) * plan.targets[j].C;
    }

    // output grid: uniform plus the exact activation marks; uniform points
    // within rounding distance of an activation are snapped onto it so the
    // stored sample carries the right-continuous value of V at the jump
    std::vector<double> grid;
    auto n_steps = static_cast<std::size_t>(std::floor(x_max / grid_step + 0.5));
    for (std::size_t i = 0; i <= n_steps; ++i)
        grid.push_back(std::min(static_cast<double>(i) * grid_step, x_max));
    if (grid.back() < x_max) grid.push_back(x_max);
    for (const auto& pt : plan.targets) {
        bool snapped = false;
        for (double& g : grid)
            if (std::abs(g - pt.T) < 1e-9 * (1.0 + pt.T)) {
                g = pt.T;
                snapped = true;
                break;
            }
        if (!snapped) grid.push_back(pt.T);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    PruferTrajectory traj;
    traj.grid = grid;
    traj.theta.assign(K, std::vector<double>(grid.size()));
    traj.psi.assign(K, std::vector<double>(grid.size()));
    traj.ln_r.assign(K, std::vector<double>(grid.size()));
    traj.v.assign(grid.size(), 0.0);
    for (const auto& pt : plan.targets) traj.activations.push_back(pt.T);
    traj.hypothesis.assign(K, HypothesisRecord{});

    std::vector<double> state(2 * K, 0.0);
    for (std::size_t j = 0; j < K; ++j)
        state[j] = initial_phase(*fr[j], spectrum.targets[j].xi);

    std::vector<bool> active(K, false);
    auto eval_sample = [&](std::size_t gi, double x, const double* y) {
        double w = 1.0 / (1.0 + x);
        double v = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            double eta = fr[j]->eta(x);
            double theta = y[j] + eta;
            traj.psi[j][gi] = y[j];
            traj.theta[j][gi] = theta;
            traj.ln_r[j][gi] = y[K + j];
            if (active[j]) v += signed_c[j] * std::sin(2.0 * theta) * w;
        }
        traj.v[gi] = v;
        for (std::size_t j = 0; j < K; ++j) {
            if (x < plan.targets[j].T) continue;
            double ratio = std::abs(v) / std::abs(fr[j]->eta_prime(x));
            auto& hyp = traj.hypothesis[j];
            hyp.max_ratio = std::max(hyp.max_ratio, ratio);
        }
    };

    // segment boundaries: activations and x_max
    std::vector<double> cuts;
    for (const auto& pt : plan.targets) cuts.push_back(pt.T);
    cuts.push_back(x_max);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    SynthField field{fr.data(), signed_c.data(), nullptr, K};
    std::size_t gi = 0;
    double x = 0.0;
    std::vector<char> active_c(K, 0);
    std::vector<double> ytmp(2 * K);
    for (double cut : cuts) {
        if (cut <= x) continue;
        for (std::size_t j = 0; j < K; ++j) {
            active[j] = plan.targets[j].T <= x + 1e-12;
            active_c[j] = active[j] ? 1 : 0;
        }
        field.active = active_c.data();
        while (gi < grid.size() && grid[gi] <= x + 1e-15) {
            eval_sample(gi, grid[gi], state.data());
            ++gi;
        }
        numerics::RkStepper<SynthField> st(field, x, state, rel_tol, rel_tol * 1e-2);
        while (st.advance(cut)) {
            // the sample at an activation itself is deferred to the next
            // segment so that V is stored right-continuously at the jump
            while (gi < grid.size() && grid[gi] <= st.x() + 1e-15 && grid[gi] < cut) {
                st.dense(grid[gi], ytmp);
                eval_sample(gi, grid[gi], ytmp.data());
                ++gi;
            }
        }
        state.assign(st.y().begin(), st.y().end());
        x = cut;
    }
    while (gi < grid.size()) {
        eval_sample(gi, grid[gi], state.data());
        ++gi;
    }

    const double A_pot = frames.potential().l1_norm();
    for (std::size_t j = 0; j < K; ++j) {
        auto& hyp = traj.hypothesis[j];
        if (plan.targets[j].epsilon)
            hyp.epsilon_ok = hyp.max_ratio <= *plan.targets[j].epsilon / 2.0;
        if (spectrum.targets[j].cls == ResonanceClass::S3) {
            double dk = floquet::lk_thresholds(A_pot, spectrum.targets[j].qe.k).big_delta;
            hyp.delta_ok = hyp.max_ratio <= dk / 2.0;
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Export / import

void export_potential_csv(const PruferTrajectory& traj, const std::filesystem::path& path) {
    if (traj.grid.empty()) throw NumericalError("export_potential_csv: empty trajectory");
    std::ofstream out(path);
    if (!out) throw NumericalError("export_potential_csv: cannot open " + path.string());
    out << "x,V\n";
    out.precision(17);
    for (std::size_t i = 0; i < traj.grid.size(); ++i)
        out << traj.grid[i] << ',' << traj.v[i] << '\n';
    if (!out) throw NumericalError("export_potential_csv: write failure");
}

void export_structured(const PruferTrajectory& traj, const SynthesisPlan& plan,
                       const TargetSpectrum& spectrum, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["mode"] = to_string(plan.mode);
    auto targets = nlohmann::json::array();
    for (std::size_t j = 0; j < spectrum.targets.size(); ++j) {
        const auto& t = spectrum.targets[j];
        nlohmann::json row;
        row["E"] = t.qe.E;
        row["k"] = t.qe.k;
        row["n"] = t.qe.n;
        row["xi"] = t.xi;
        row["class"] = targets::to_string(t.cls);
        row["C"] = plan.targets[j].C;
        row["T"] = plan.targets[j].T;
        if (t.epsilon) row["epsilon"] = *t.epsilon;
        targets.push_back(row);
    }
    doc["targets"] = targets;
    doc["grid"] = {{"x0", traj.grid.front()},
                   {"x1", traj.grid.back()},
                   {"step", traj.grid.size() > 1 ? traj.grid[1] - traj.grid[0] : 0.0}};
    doc["samples"] = {{"x", traj.grid}, {"V", traj.v}, {"theta", traj.theta},
                      {"lnR", traj.ln_r}};
    std::ofstream out(path);
    if (!out) throw NumericalError("export_structured: cannot open " + path.string());
    out << doc.dump();
    if (!out) throw NumericalError("export_structured: write failure");
}

StructuredRun import_structured(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NumericalError("import_structured: cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw NumericalError("import_structured: parse error: " + std::string(e.what()));
    }
    StructuredRun run;
    try {
        run.mode = doc.at("mode").get<std::string>();
        for (const auto& row : doc.at("targets")) {
            StructuredRun::Target t;
            t.E = row.at("E").get<double>();
            t.k = row.at("k").get<double>();
            t.n = row.at("n").get<int>();
            t.xi = row.at("xi").get<double>();
            t.cls = row.at("class").get<std::string>();
            t.C = row.at("C").get<double>();
            t.T = row.at("T").get<double>();
            if (row.contains("epsilon")) t.epsilon = row.at("epsilon").get<double>();
            run.targets.push_back(t);
        }
        run.x0 = doc.at("grid").at("x0").get<double>();
        run.x1 = doc.at("grid").at("x1").get<double>();
        run.step = doc.at("grid").at("step").get<double>();
        run.x = doc.at("samples").at("x").get<std::vector<double>>();
        run.v = doc.at("samples").at("V").get<std::vector<double>>();
        run.theta = doc.at("samples").at("theta").get<std::vector<std::vector<double>>>();
        run.ln_r = doc.at("samples").at("lnR").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw NumericalError("import_structured: missing field: " + std::string(e.what()));
    }
    return run;
}

}  // namespace spectral::synth
