// Acceptance suite: one quantitative criterion per check, one PASS/FAIL line
// each, exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spectral/synth.hpp"
#include "spectral/targets.hpp"
#include "spectral/verify.hpp"

using namespace spectral;
using floquet::FrameCache;
using floquet::PeriodicPotential;
using floquet::QuasiEigenvalue;

namespace {

constexpr double kPi = 3.14159265358979323846;
namespace fs = std::filesystem;

int g_failures = 0;

void report(int id, const char* name, bool pass, double seconds, const std::string& detail) {
    std::printf("%s criterion %2d: %-34s (%6.1f s)%s%s\n", pass ? "PASS" : "FAIL", id, name,
                seconds, detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const char* name, const std::function<bool(std::string&)>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        pass = false;
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, name, pass, dt, detail);
}

struct SynthRun {
    targets::TargetSpectrum spectrum;
    synth::SynthesisPlan plan;
    synth::PruferTrajectory traj;
    fs::path csv;
};

SynthRun make_run(FrameCache& cache, std::vector<std::pair<double, int>> kns,
                  std::vector<double> xis, std::vector<double> overrides, double scale,
                  double spacing, double x_max, double grid_step, const char* csv_name,
                  std::optional<synth::GrowthFn> h = std::nullopt) {
    std::vector<QuasiEigenvalue> qes;
    for (auto [k, n] : kns) qes.push_back(cache.eigenvalue_of(k, n));
    SynthRun run;
    run.spectrum = targets::classify(qes, xis, cache);
    run.plan = synth::plan_constants(run.spectrum, cache, h, synth::Mode::practical, scale,
                                     spacing, overrides);
    run.traj = synth::synthesize(run.plan, run.spectrum, cache, x_max, grid_step);
    run.csv = fs::temp_directory_path() / csv_name;
    synth::export_potential_csv(run.traj, run.csv);
    return run;
}

verify::DecayReport fit_target(const SynthRun& run, FrameCache& cache, std::size_t j,
                               double tail_fraction) {
    const auto& t = run.spectrum.targets[j];
    auto trace = verify::trace_from_synthesis(run.traj, j, cache.get(t.qe.k, t.qe.n));
    double t_last = run.plan.targets.back().T;
    return verify::decay_report(trace, tail_fraction, t.qe.E, t.xi, t_last);
}

bool envelope_ok(const SynthRun& run) {
    for (std::size_t i = 0; i < run.traj.grid.size(); ++i) {
        double x = run.traj.grid[i];
        double cap = 0.0;
        for (const auto& pt : run.plan.targets)
            if (pt.T <= x) cap += pt.C;
        if (std::abs(run.traj.v[i]) * (1.0 + x) > cap + 1e-9) return false;
    }
    return true;
}

// probe quasimomenta staying 0.05 away from every target class
std::vector<std::pair<double, int>> probe_ks(const std::vector<double>& target_ks) {
    std::vector<std::pair<double, int>> out;
    double cands[] = {0.3, 0.5, 0.7, 0.9, 1.3, 1.45, 1.8, 2.3, 2.5, 2.7, 2.9, 0.4, 0.6};
    int n = 1;
    for (double k : cands) {
        bool clash = false;
        for (double tk : target_ks)
            if (std::abs(k - tk) < 0.05 || std::abs(k - (kPi - tk)) < 0.05) clash = true;
        if (clash) continue;
        out.push_back({k, n});
        n = (n == 1) ? 2 : 1;
        if (out.size() == 10) break;
    }
    return out;
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");

    // ---------------------------------------------------------------- 1
    run_criterion(1, "free-band exactness", [](std::string& detail) {
        auto z = PeriodicPotential::zero();
        auto bands = floquet::band_structure(z, 20);
        double worst = 0.0;
        for (double k : {0.3, 1.0, kPi / 2, 2.5})
            for (int n = 1; n <= 20; ++n) {
                auto qe = floquet::eigenvalue(z, k, n, bands);
                double exact = std::pow(floquet::anchor_a(k, n), 2);
                worst = std::max(worst, std::abs(qe.E - exact) / exact);
            }
        detail = "max relative error " + std::to_string(worst);
        return worst <= 1e-9;
    });

    // ---------------------------------------------------------------- 2
    run_criterion(2, "eigenvalue anchor bound", [](std::string& detail) {
        auto v = PeriodicPotential::cosine(2.0);
        const double A = v.l1_norm();
        auto bands = floquet::band_structure(v, 60);
        bool ok = true;
        double worst_ratio = 0.0;
        for (double k : {0.3, kPi / 2, 2.5}) {
            double thr = floquet::eigenvalue_threshold(A, k);
            for (int n = 1; n <= 60; ++n) {
                auto qe = floquet::eigenvalue(v, k, n, bands);
                double dev = std::abs(std::sqrt(qe.E) - floquet::anchor_a(k, n));
                double cap = floquet::anchor_delta(A, k, n);
                // the threshold-controlled claim, plus the stronger
                // empirical sweep over every scanned band
                if (static_cast<double>(n) > thr && dev > cap) ok = false;
                if (dev > cap) ok = false;
                worst_ratio = std::max(worst_ratio, dev / cap);
            }
        }
        detail = "worst |sqrtE - a| / delta_n = " + std::to_string(worst_ratio);
        return ok;
    });

    // ---------------------------------------------------------------- 3
    run_criterion(3, "eta bounds above L(k)", [](std::string& detail) {
        auto v = PeriodicPotential::cosine(0.1);
        const double A = v.l1_norm();
        double k = kPi / 2;
        auto th = floquet::lk_thresholds(A, k);
        int base = static_cast<int>(std::ceil(th.L));  // smallest index above L(k)
        std::vector<double> grid(1024);
        for (int i = 0; i < 1024; ++i) grid[i] = i / 1024.0;
        bool ok = true;
        for (int n : {base, base + 50, base + 99}) {
            auto qe = floquet::eigenvalue(v, k, n);
            auto fr = floquet::floquet_frame(v, qe);
            auto rep = floquet::audit_eta_bounds(fr, A, grid);
            ok &= rep.any_applicable() && rep.all_pass();
        }
        detail = "L(k) = " + std::to_string(th.L);
        return ok;
    });

    // ---------------------------------------------------------------- 4
    run_criterion(4, "Wronskian and omega conservation", [](std::string& detail) {
        auto v = PeriodicPotential::cosine(2.0);
        auto bands = floquet::band_structure(v, 10);
        numerics::SplitMix64 rng(2024);
        double worst_w = 0.0, worst_omega = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            int n = rng.uniform_int(1, 10);
            double k = rng.uniform(0.05, kPi - 0.05);
            auto qe = floquet::eigenvalue(v, k, n, bands);
            auto m = floquet::monodromy(v, qe.E, 1e-12);
            worst_w = std::max(worst_w, std::abs(m.wronskian() - 1.0));
            auto fp = floquet::fundamental_pair(v, qe.E, 2.0, 1e-11);
            double a = (std::cos(k) - m.c1) / m.s1;
            double b = std::sin(k) / m.s1;
            double omega = 2.0 * std::sin(k) / m.s1;
            double st[4];
            for (int i = 0; i < 32; ++i) {
                fp.traj.evaluate(2.0 * i / 32.0, st);
                double w2 = 2.0 * b * ((st[0] + a * st[2]) * st[3] - (st[1] + a * st[3]) * st[2]);
                worst_omega = std::max(worst_omega, std::abs(w2 - omega) / std::abs(omega));
            }
        }
        detail = "max |W-1| = " + std::to_string(worst_w) +
                 ", max omega dev = " + std::to_string(worst_omega);
        return worst_w <= 1e-8 && worst_omega <= 1e-7;
    });

    // shared artifacts for criteria 5, 10, 11
    std::optional<SynthRun> run5;
    auto z_pot = PeriodicPotential::zero();
    FrameCache z_cache(z_pot);

    // ---------------------------------------------------------------- 5
    run_criterion(5, "single embedded eigenvalue", [&](std::string& detail) {
        run5 = make_run(z_cache, {{1.0, 1}}, {0.0}, {4.0}, 1.0, 50.0, 1e4, 0.05,
                        "acc_single.csv");
        auto rep = fit_target(*run5, z_cache, 0, 0.434);
        bool ok = rep.l2_verdict && rep.slope > -1.1 && rep.slope < -0.9;
        detail = "target slope " + std::to_string(rep.slope);
        verify::SampledPotential sam =
            verify::SampledPotential::from_csv(run5->csv, std::vector<double>{50.0});
        verify::Potential v = [&sam](double t) { return sam(t); };
        std::vector<double> brk = {50.0};
        for (auto [k, n] : probe_ks({1.0})) {
            const auto& fr = z_cache.get(k, n);
            auto tr = verify::prufer_trace(v, fr, synth::initial_phase(fr, 0.0), 1e4, 0.05,
                                           1e-8, brk);
            auto prep = verify::decay_report(tr, 0.434, fr.qe().E, 0.0, 50.0);
            if (prep.l2_verdict || prep.slope <= -0.25) {
                ok = false;
                detail += " probe(k=" + std::to_string(k) + ") slope " +
                          std::to_string(prep.slope);
            }
        }
        return ok;
    });

    // ---------------------------------------------------------------- 6
    run_criterion(6, "same-band resonant pair", [&](std::string& detail) {
        bool ok = true;
        // free background
        auto run_a = make_run(z_cache, {{1.0, 1}, {kPi - 1.0, 1}}, {0.0, 0.4}, {}, 1.0, 50.0,
                              1e4, 0.05, "acc_pair_free.csv");
        for (std::size_t j = 0; j < 2; ++j) {
            auto rep = fit_target(run_a, z_cache, j, 0.434);
            ok &= rep.l2_verdict && rep.slope < -0.5;
            detail += (j ? " " : "free: ") + std::to_string(rep.slope);
        }
        // cosine background
        auto v = PeriodicPotential::cosine(2.0);
        FrameCache vc(v);
        auto run_b = make_run(vc, {{1.0, 1}, {kPi - 1.0, 1}}, {0.0, 0.4}, {}, 1.0, 50.0, 1e4,
                              0.05, "acc_pair_cos.csv");
        for (std::size_t j = 0; j < 2; ++j) {
            auto rep = fit_target(run_b, vc, j, 0.434);
            ok &= rep.l2_verdict && rep.slope < -0.5;
            detail += (j ? " " : "  cosine: ") + std::to_string(rep.slope);
        }
        // a third probe at k = pi/2 in the same band stays bounded
        verify::SampledPotential sam = verify::SampledPotential::from_csv(
            run_b.csv, std::vector<double>{run_b.plan.targets[0].T, run_b.plan.targets[1].T});
        verify::Potential vv = [&sam](double t) { return sam(t); };
        const auto& fp = vc.get(kPi / 2, 1);
        std::vector<double> brk = {run_b.plan.targets[0].T, run_b.plan.targets[1].T};
        auto tr = verify::prufer_trace(vv, fp, synth::initial_phase(fp, 0.0), 1e4, 0.05, 1e-8,
                                       brk);
        auto prep = verify::decay_report(tr, 0.434, fp.qe().E, 0.0, run_b.plan.targets[1].T);
        ok &= !prep.l2_verdict;
        detail += "  probe(pi/2): " + std::to_string(prep.slope);
        return ok;
    });

    // ---------------------------------------------------------------- 7
    run_criterion(7, "self-resonance at k = pi/2", [&](std::string& detail) {
        auto run = make_run(z_cache, {{kPi / 2, 1}}, {0.2}, {}, 1.0, 50.0, 5000.0, 0.05,
                            "acc_halfpi.csv");
        if (!run.spectrum.targets[0].epsilon) {
            detail = "epsilon path not taken";
            return false;
        }
        auto rep = fit_target(run, z_cache, 0, 0.5);
        detail = "slope " + std::to_string(rep.slope) +
                 ", epsilon = " + std::to_string(*run.spectrum.targets[0].epsilon);
        return rep.l2_verdict;
    });

    // ---------------------------------------------------------------- 8
    run_criterion(8, "cross-band resonant group", [](std::string& detail) {
        auto v = PeriodicPotential::cosine(0.1);
        FrameCache cache(v);
        const double A = v.l1_norm();
        double k = kPi / 2;
        int ni = 60000, nj = 132000;
        // admissibility: above L(k) and past the band-separation inequality
        auto th = floquet::lk_thresholds(A, k);
        if (!(ni > th.L && nj > th.L)) {
            detail = "band indices below L(k)";
            return false;
        }
        std::vector<std::pair<int, double>> group = {{ni, k}, {nj, k}};
        for (const auto& r : targets::check_s3_condition(group, A))
            if (!r.pass) {
                detail = "separation condition failed";
                return false;
            }
        auto run = make_run(cache, {{k, ni}, {k, nj}}, {0.0, 0.0}, {}, 0.9, 2.0, 100.0, 0.05,
                            "acc_cross.csv");
        bool ok = true;
        for (std::size_t j = 0; j < 2; ++j) {
            auto rep = fit_target(run, cache, j, 0.5);
            ok &= rep.l2_verdict;
            detail += (j ? " " : "slopes: ") + std::to_string(rep.slope);
        }
        // cross-band audit with the configured slack over a unit-log window
        const auto& fi = cache.get(k, ni);
        const auto& fj = cache.get(k, nj);
        auto ti = verify::trace_from_synthesis(run.traj, 0, fi);
        auto tj = verify::trace_from_synthesis(run.traj, 1, fj);
        double ci = run.plan.targets[0].C * (ni % 2 == 0 ? 1.0 : -1.0);
        double cj = run.plan.targets[1].C * (nj % 2 == 0 ? 1.0 : -1.0);
        double t1 = run.plan.targets[0].T, t2 = run.plan.targets[1].T;
        verify::Potential vv = [&, ci, cj, t1, t2](double t) {
            double s = 0.0;
            if (t >= t1) s += ci * std::sin(2.0 * ti.theta_at(t));
            if (t >= t2) s += cj * std::sin(2.0 * tj.theta_at(t));
            return s / (1.0 + t);
        };
        auto audit = verify::check_cross_band(fi, fj, ti.theta_fn(), tj.theta_fn(), vv, A, 20.0,
                                              40.0, 10.0);
        ok &= audit.hypothesis_ok && audit.pass;
        detail += "  audit lhs " + std::to_string(audit.lhs) + " <= rhs " +
                  std::to_string(audit.rhs);
        auto audit4 = verify::check_cross_band_4theta(fi, ti.theta_fn(), vv, A, 20.0, 40.0, 10.0);
        ok &= audit4.hypothesis_ok && audit4.pass;
        return ok;
    });

    // ---------------------------------------------------------------- 9
    run_criterion(9, "randomized oscillatory audits", [](std::string& detail) {
        auto rep = verify::run_randomized_audits(1, 100, 100, 100, 20);
        detail = std::to_string(rep.passed) + " passed, " + std::to_string(rep.failed) +
                 " failed, " + std::to_string(rep.inapplicable) + " inapplicable";
        return rep.all_pass() && rep.inapplicable == 0 && rep.passed == 320;
    });

    // ---------------------------------------------------------------- 10
    run_criterion(10, "round trip through the exported csv", [&](std::string& detail) {
        if (!run5) {
            detail = "criterion 5 artifacts unavailable";
            return false;
        }
        verify::SampledPotential sam =
            verify::SampledPotential::from_csv(run5->csv, std::vector<double>{50.0});
        verify::Potential v = [&sam](double t) { return sam(t); };
        const auto& fr = z_cache.get(1.0, 1);
        std::vector<double> brk = {50.0};
        auto tr = verify::prufer_trace(v, fr, synth::initial_phase(fr, 0.0), 1e4, 0.05, 1e-11,
                                       brk);
        double got = tr.ln_r.back();
        double want = run5->traj.ln_r[0].back();
        double tol = 1e-3 + 1e-3 * std::abs(want);
        detail = "lnR " + std::to_string(got) + " vs " + std::to_string(want);
        return std::abs(got - want) <= tol;
    });

    // ---------------------------------------------------------------- 11
    run_criterion(11, "envelope invariants", [&](std::string& detail) {
        if (!run5) {
            detail = "criterion 5 artifacts unavailable";
            return false;
        }
        bool ok = envelope_ok(*run5);
        // growth-envelope configuration
        auto h = synth::GrowthFn::power_preset(30.0, 0.5);
        auto runh = make_run(z_cache, {{1.0, 1}}, {0.0}, {}, 1.0, 25.0, 1500.0, 0.05,
                             "acc_h.csv", h);
        ok &= envelope_ok(runh);
        double t1 = runh.plan.targets[0].T;
        for (std::size_t i = 0; i < runh.traj.grid.size(); ++i) {
            double x = runh.traj.grid[i];
            if (x > t1 && std::abs(runh.traj.v[i]) * (1.0 + x) > h(x) + 1e-9) ok = false;
        }
        detail = "T_1 = " + std::to_string(t1) + ", x_1 = " +
                 std::to_string(runh.plan.targets[0].x_threshold);
        return ok;
    });

    // ---------------------------------------------------------------- 12
    run_criterion(12, "paper-faithful activation bounds", [&](std::string& detail) {
        std::vector<QuasiEigenvalue> qes = {z_cache.eigenvalue_of(1.0, 1)};
        std::vector<double> xis = {0.0};
        auto spec = targets::classify(qes, xis, z_cache);
        auto h = synth::GrowthFn::power_preset(2.0, 0.5);
        auto plan = synth::plan_constants(spec, z_cache, h, synth::Mode::paper_faithful);
        const auto& pt = plan.targets[0];
        bool ok = true;
        double max_term = 0.0;
        for (double term : pt.t_terms) {
            ok &= std::isfinite(term) && term >= 0.0;
            ok &= pt.T > term;
            max_term = std::max(max_term, term);
        }
        ok &= pt.T <= max_term * (1.0 + 1e-5) + 1.0;
        ok &= pt.C == 400.0 * pt.A;
        detail = "T_1 = " + std::to_string(pt.T);
        return ok;
    });

    std::printf("%d failure(s)\n", g_failures);
    return g_failures;
}
