#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectral/targets.hpp"

namespace spectral::synth {

enum class Mode { paper_faithful, practical };

const char* to_string(Mode m);

/// Growth envelope h(x) for the slowly-decaying configuration; h must tend
/// to infinity for every amplitude budget to be absorbed eventually.
class GrowthFn {
public:
    static GrowthFn log_preset(double c);              // c * ln(2 + x)
    static GrowthFn power_preset(double c, double p);  // c * x^p, 0 < p < 1
    static GrowthFn table(std::vector<double> xs, std::vector<double> hs);

    double operator()(double x) const;
    /// Smallest x with h(t) > threshold for all t > x.
    double threshold_position(double threshold) const;
    std::string describe() const;

private:
    enum class Kind { log, power, tab } kind_ = Kind::log;
    double c_ = 1.0, p_ = 0.5;
    std::vector<double> xs_, hs_;
};

struct PlanTarget {
    double A = 0.0;  // max of max|eta'| over the frame and its mirror
    double B = 0.0;  // min analogue
    double C = 0.0;  // perturbation amplitude
    std::optional<double> epsilon;
    double alpha = std::numeric_limits<double>::infinity();
    bool alpha_defined = false;
    double x_threshold = 0.0;  // x_j (0 without a growth envelope)
    double T = 0.0;            // activation position
    std::array<double, 5> t_terms{};  // the five activation lower bounds
};

struct SynthesisPlan {
    Mode mode = Mode::practical;
    double scale = 1.0;
    double spacing = 50.0;
    std::optional<GrowthFn> h;
    std::vector<PlanTarget> targets;
    double total_amplitude() const {
        double s = 0;
        for (const auto& t : targets) s += t.C;
        return s;
    }
};

/// Amplitudes, separations and activation positions for the given spectrum.
/// In paper_faithful mode every activation dominates the five analytic lower
/// bounds; in practical mode activations are T_{j-1} + spacing (pushed past
/// x_j when a growth envelope is present) and amplitudes are scaled for a
/// tail slope of roughly -scale. amplitude_override pins C_j directly
/// (NaN entries mean "no override").
SynthesisPlan plan_constants(const targets::TargetSpectrum& spectrum,
                             floquet::FrameCache& frames, std::optional<GrowthFn> h, Mode mode,
                             double scale = 1.0, double spacing = 50.0,
                             std::span<const double> amplitude_override = {});

/// Prufer angle at x = 0 matching the boundary condition u'(0)/u(0) = tan(xi)
/// (with (u(0), u'(0)) = (cos xi, sin xi)).
double initial_phase(const floquet::FloquetFrame& frame, double xi);

struct HypothesisRecord {
    double max_ratio = 0.0;  // max over samples past the target's activation of |V/eta'_j|
    bool epsilon_ok = true;  // ratio <= epsilon_j / 2 (when epsilon is defined)
    bool delta_ok = true;    // ratio <= delta(k_j) / 2 (cross-band members)
};

struct PruferTrajectory {
    std::vector<double> grid;
    std::vector<std::vector<double>> theta;  // [target][sample], unwrapped
    std::vector<std::vector<double>> psi;    // theta - eta(x); slow component
    std::vector<std::vector<double>> ln_r;   // [target][sample]
    std::vector<double> v;                   // synthesized V at samples
    std::vector<double> activations;         // T_j
    std::vector<HypothesisRecord> hypothesis;
};

/// Solve the coupled Prufer system and assemble V. The integrator restarts
/// at every activation; output is reported on a uniform grid (plus the exact
/// activation positions).
PruferTrajectory synthesize(const SynthesisPlan& plan, const targets::TargetSpectrum& spectrum,
                            floquet::FrameCache& frames, double x_max, double grid_step,
                            double rel_tol = 1e-8);

void export_potential_csv(const PruferTrajectory& traj, const std::filesystem::path& path);
void export_structured(const PruferTrajectory& traj, const SynthesisPlan& plan,
                       const targets::TargetSpectrum& spectrum,
                       const std::filesystem::path& path);

/// Re-ingested structured run (enough to drive verification).
struct StructuredRun {
    std::string mode;
    struct Target {
        double E = 0, k = 0, xi = 0;
        int n = 0;
        std::string cls;
        double C = 0, T = 0;
        std::optional<double> epsilon;
    };
    std::vector<Target> targets;
    double x0 = 0, x1 = 0, step = 0;
    std::vector<double> x, v;
    std::vector<std::vector<double>> theta, ln_r;
};

StructuredRun import_structured(const std::filesystem::path& path);

}  // namespace spectral::synth
