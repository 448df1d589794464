#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spectral/synth.hpp"

namespace spectral::verify {

/// The perturbation handed to the probe integrator.
using Potential = std::function<double(double)>;

/// Potential read back from exported samples; evaluated by local 6-point
/// Lagrange interpolation, constant beyond the sampled range. Declared
/// breakpoints (activation jumps) split the samples into segments and the
/// interpolation stencil never straddles one.
class SampledPotential {
public:
    SampledPotential() = default;
    SampledPotential(std::vector<double> xs, std::vector<double> vs,
                     std::span<const double> breakpoints = {});
    static SampledPotential from_csv(const std::filesystem::path& path,
                                     std::span<const double> breakpoints = {});
    double operator()(double t) const;
    double x_max() const { return xs_.empty() ? 0.0 : xs_.back(); }
    std::size_t size() const { return xs_.size(); }
    const std::vector<double>& breakpoints() const { return breaks_; }

private:
    std::vector<double> xs_, vs_, breaks_;
    std::vector<std::size_t> seg_begin_;  // first sample index of each segment
    double step_ = 0.0;
    bool uniform_ = false;
};

/// Probe trace of the scalar Prufer system for one energy under a given V.
struct Trace {
    std::vector<double> x;
    std::vector<double> theta;  // unwrapped
    std::vector<double> psi;    // theta - eta(x)
    std::vector<double> ln_r;
    const floquet::FloquetFrame* frame = nullptr;

    /// Phase at arbitrary t: slow component interpolated, fast part exact.
    double theta_at(double t) const;
    std::function<double(double)> theta_fn() const {
        return [this](double t) { return theta_at(t); };
    }
};

Trace prufer_trace(const Potential& v, const floquet::FloquetFrame& frame, double theta0,
                   double x_max, double grid_step = 0.05, double rel_tol = 1e-8,
                   std::span<const double> v_breakpoints = {});

/// View a synthesized multi-target trajectory as a per-target Trace.
Trace trace_from_synthesis(const synth::PruferTrajectory& traj, std::size_t target_index,
                           const floquet::FloquetFrame& frame);

struct DecayReport {
    double E = 0, xi = 0;
    double slope = 0, intercept = 0, rms_residual = 0;
    double x_lo = 0, x_hi = 0;  // tail window of the fit
    bool l2_verdict = false;    // slope < -1/2 - margin
};

DecayReport decay_report(std::span<const double> xs, std::span<const double> ln_r,
                         double tail_fraction, double E, double xi, double last_activation,
                         double margin = 0.05);
DecayReport decay_report(const Trace& trace, double tail_fraction, double E, double xi,
                         double last_activation, double margin = 0.05);

struct BoundAudit {
    std::string lemma;
    double lhs = 0, rhs = 0;
    bool hypothesis_ok = false;
    bool pass = true;  // vacuously true when the hypothesis fails
    std::string note;
};

/// Oscillatory integral bound: |int sin(theta)/t| (and the cosine variant)
/// over [x0, x] for all x in xs, against r(|a|,beta,C)/(|a| x0)^beta, given
/// |theta' - a| <= C/t^beta and x0 > s(|a|,beta,C).
BoundAudit check_osc_bound(const std::function<double(double)>& theta,
                           const std::function<double(double)>& theta_prime, double a, double C,
                           double beta, double x0, std::span<const double> xs);

/// Periodic-weight variant: |int Gamma(t) sin(theta)/t| against
/// ||Gamma||_2 r(alpha)/x0^(2/3) for |theta' - a - gamma'| <= t^(-2/3),
/// alpha = dist(a, 2 pi Z), x0 > r(alpha).
BoundAudit check_periodic_osc_bound(const std::function<double(double)>& gamma_weight,
                                    const std::function<double(double)>& theta,
                                    const std::function<double(double)>& theta_prime,
                                    const std::function<double(double)>& gamma_prime, double a,
                                    double x0, std::span<const double> xs);

/// Non-resonant coupling of two targets under a common V.
BoundAudit check_nonresonant(const floquet::FloquetFrame& frame_i,
                             const floquet::FloquetFrame& frame_j,
                             const std::function<double(double)>& theta_i,
                             const std::function<double(double)>& theta_j, const Potential& v,
                             double x0, std::span<const double> xs);

/// The 4-theta self term away from k = pi/2.
BoundAudit check_nonresonant_4theta(const floquet::FloquetFrame& frame_i,
                                    const std::function<double(double)>& theta_i,
                                    const Potential& v, double x0, std::span<const double> xs);

/// Same-band resonant pair: window-averaged lower bound on the decay
/// integrand (both eta' denominators are required to clear the bound).
BoundAudit check_same_band_lower(const floquet::FloquetFrame& frame_i,
                                 const floquet::FloquetFrame& frame_j,
                                 const std::function<double(double)>& theta_i,
                                 const std::function<double(double)>& theta_j, const Potential& v,
                                 double epsilon, double x0, double x1);

/// Cross-band resonant pair: logarithmic upper bound with a configured
/// slack constant standing in for the unquantified O(1).
BoundAudit check_cross_band(const floquet::FloquetFrame& frame_i,
                            const floquet::FloquetFrame& frame_j,
                            const std::function<double(double)>& theta_i,
                            const std::function<double(double)>& theta_j, const Potential& v,
                            double a_big_delta, double x0, double x1, double slack = 10.0);

BoundAudit check_cross_band_4theta(const floquet::FloquetFrame& frame_i,
                                   const std::function<double(double)>& theta_i,
                                   const Potential& v, double a_big_delta, double x0, double x1,
                                   double slack = 10.0);

/// Half-period cancellation structure: consecutive integrals of sin(theta)
/// between the phase's multiples of pi alternate in sign and stay within
/// 2 +- 10 pi C / t_i^beta, for |theta' - 1| <= C/t^beta.
struct HalfPeriodCheck {
    bool alternating = false;
    bool within_envelope = false;
    int segments = 0;
};
HalfPeriodCheck check_half_period_structure(const std::function<double(double)>& theta,
                                            const std::function<double(double)>& theta_prime,
                                            double C, double beta, double x0, int segments);

struct LemmaSuiteReport {
    std::vector<BoundAudit> audits;
    int passed = 0, failed = 0, inapplicable = 0;
    bool all_pass() const { return failed == 0; }
    void tally();
};

/// Seeded randomized audit instances of the oscillatory-integral lemmas and
/// the non-resonance bound. Deterministic for a fixed seed.
LemmaSuiteReport run_randomized_audits(std::uint64_t seed, int n_base, int n_scaled,
                                       int n_periodic, int n_nonresonant);

}  // namespace spectral::verify
