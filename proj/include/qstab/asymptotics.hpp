#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qstab/quadratic.hpp"
#include "qstab/space.hpp"

namespace qstab {

/// Per-shell sup of ||residual_gq|| for pairs with n <= ||x|| + ||y|| < n + 1,
/// n = n_min, ..., n_max (inclusive).
struct ShellProfile {
    int n_min = 0;
    int n_max = 0;
    std::vector<double> delta;
    std::vector<int> counts;
    std::uint64_t seed = 0;

    int shells() const { return static_cast<int>(delta.size()); }
    int shell_index(int k) const { return n_min + k; }
};

/// Draws t uniform in [n, n+1), splits it as ||x|| = u t, ||y|| = (1-u) t
/// with u uniform in [0, 1], and picks independent Gaussian directions.
/// Pairs whose evaluated norms leave the shell through rounding are redrawn.
std::vector<VectorPair> sample_shell_pairs(const SpaceSpec& space, int n, int count, std::uint64_t seed);

ShellProfile shell_delta_profile(const MapHandle& f, const EquationParams& params, const SpaceSpec& space, int n_min,
                                 int n_max, int per_shell_count, std::uint64_t seed);

enum class AsymptoticVerdictKind { AsymptoticallyQuadratic, PersistentDefect, Inconclusive };

std::string to_string(AsymptoticVerdictKind kind);

struct AsymptoticVerdict {
    AsymptoticVerdictKind kind = AsymptoticVerdictKind::Inconclusive;
    double tail_max = 0.0;
    int tail_window = 0;       ///< last ceil(N/4) shells
    int monotone_window = 0;   ///< last ceil(N/2) shells
    bool tail_non_decreasing = false;
    double decay_tol = 0.0;
    double jitter = 0.0;
};

inline constexpr double kMonotoneJitter = 0.2;

/// Tail-window rule over N >= 4 shells:
///  - asymptotically_quadratic if max delta over the last quarter <= decay_tol;
///  - persistent_defect if that max >= 10 decay_tol and the last half is
///    non-decreasing up to relative jitter (delta[k+1] >= (1 - jitter) delta[k]);
///  - inconclusive otherwise.
/// Throws ParameterError for fewer than 4 shells.
AsymptoticVerdict asymptotic_verdict(const ShellProfile& profile, double decay_tol,
                                     double jitter = kMonotoneJitter);

}  // namespace qstab
