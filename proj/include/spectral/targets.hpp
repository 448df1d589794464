#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral/floquet.hpp"

namespace spectral::targets {

enum class ResonanceClass { S1, S2, S3 };

const char* to_string(ResonanceClass c);

/// One requested embedded eigenvalue with its boundary phase and the
/// resonance class assigned by classify().
struct TargetEigenvalue {
    floquet::QuasiEigenvalue qe;
    double xi = 0.0;  // boundary phase in [0, pi], u'(0)/u(0) = tan(xi)
    ResonanceClass cls = ResonanceClass::S1;
    std::optional<double> epsilon;  // populated for S2 and for k = pi/2 members of S1
};

struct TargetSpectrum {
    std::vector<TargetEigenvalue> targets;
    /// Partition of target indices by the quasimomentum class k ~ {k, pi-k}.
    std::vector<std::vector<std::size_t>> resonance_groups;
};

/// Raised when the requested set violates the admissibility assumption;
/// carries the indices of the offending targets and the failed clause.
class ClassificationError : public std::runtime_error {
public:
    ClassificationError(std::string clause, std::vector<std::size_t> indices,
                        const std::string& detail);
    const std::string clause;
    const std::vector<std::size_t> indices;
};

struct S3MemberReport {
    int n = 0;
    double lhs = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// The cross-band admissibility inequality for one resonance group:
/// for each member i, 1/(2 n_i) + sum_{l != i} n_l/(n_i |n_i - n_l|) must
/// stay below 1/(50 pi (1 + delta(k))).
std::vector<S3MemberReport> check_s3_condition(std::span<const std::pair<int, double>> group,
                                               double A);

/// Certified lower bound for the unit-window integral of
/// 1 - cos(2 theta_i + 2 theta_j) under the unperturbed flow, minimized over
/// window starts and phase offsets, then scaled by `safety`.
double estimate_epsilon(const floquet::FloquetFrame& frame_i, const floquet::FloquetFrame& frame_j,
                        double safety = 0.5);

/// Partition the requested eigenvalues into non-resonant (S1), same-band
/// resonant pairs (S2) and cross-band resonant groups (S3), populating
/// epsilon where the construction needs it. Throws ClassificationError on
/// any violation of the admissibility rules.
TargetSpectrum classify(std::span<const floquet::QuasiEigenvalue> qes, std::span<const double> xis,
                        floquet::FrameCache& frames);

}  // namespace spectral::targets
