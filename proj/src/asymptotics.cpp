#include "qstab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qstab {

std::vector<VectorPair> sample_shell_pairs(const SpaceSpec& space, int n, int count, std::uint64_t seed) {
    if (n < 0) throw ParameterError("shell index must be >= 0");
    if (count < 1) throw ParameterError("per-shell count must be >= 1");
    const double lo = n;
    const double hi = n + 1.0;
    const std::uint64_t shell_seed = derive_seed(seed, static_cast<std::uint64_t>(n));

    std::vector<VectorPair> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(shell_seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (;;) {
            const double t = lo + unit(rng);
            const double a = unit(rng) * t;
            const double b = std::max(t - a, 0.0);
            Vector x = a > 0.0 ? draw_in_annulus(space, rng, a, a) : Vector::Zero(space.dim());
            Vector y = b > 0.0 ? draw_in_annulus(space, rng, b, b) : Vector::Zero(space.dim());
            const double total = norm_eval(space, x) + norm_eval(space, y);
            if (total >= lo && total < hi) {
                out.emplace_back(std::move(x), std::move(y));
                break;
            }
        }
    }
    return out;
}

ShellProfile shell_delta_profile(const MapHandle& f, const EquationParams& params, const SpaceSpec& space, int n_min,
                                 int n_max, int per_shell_count, std::uint64_t seed) {
    if (n_min < 0 || n_max <= n_min) throw ParameterError("shell range needs 0 <= n_min < n_max");
    if (per_shell_count < 1) throw ParameterError("per-shell count must be >= 1");
    if (space.dim() != f.domain_dim()) throw ParameterError("space dimension does not match the map's domain");

    ShellProfile profile;
    profile.n_min = n_min;
    profile.n_max = n_max;
    profile.seed = seed;
    for (int n = n_min; n <= n_max; ++n) {
        double sup = 0.0;
        const auto pairs = sample_shell_pairs(space, n, per_shell_count, seed);
        for (const auto& [x, y] : pairs) sup = std::max(sup, codomain_norm(residual_gq(f, params, x, y)));
        profile.delta.push_back(sup);
        profile.counts.push_back(static_cast<int>(pairs.size()));
    }
    return profile;
}

std::string to_string(AsymptoticVerdictKind kind) {
    switch (kind) {
        case AsymptoticVerdictKind::AsymptoticallyQuadratic: return "asymptotically_quadratic";
        case AsymptoticVerdictKind::PersistentDefect: return "persistent_defect";
        case AsymptoticVerdictKind::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

AsymptoticVerdict asymptotic_verdict(const ShellProfile& profile, double decay_tol, double jitter) {
    const int n = profile.shells();
    if (n < 4) throw ParameterError("asymptotic verdict needs at least 4 shells");
    if (!(decay_tol >= 0.0)) throw ParameterError("decay tolerance must be >= 0");
    if (!(jitter >= 0.0 && jitter < 1.0)) throw ParameterError("jitter must lie in [0, 1)");

    AsymptoticVerdict v;
    v.decay_tol = decay_tol;
    v.jitter = jitter;
    v.tail_window = (n + 3) / 4;
    v.monotone_window = (n + 1) / 2;
    const auto& d = profile.delta;
    v.tail_max = *std::max_element(d.end() - v.tail_window, d.end());

    v.tail_non_decreasing = true;
    for (int k = n - v.monotone_window; k + 1 < n; ++k) {
        if (d[static_cast<std::size_t>(k) + 1] < (1.0 - jitter) * d[static_cast<std::size_t>(k)])
            v.tail_non_decreasing = false;
    }

    if (v.tail_max <= decay_tol)
        v.kind = AsymptoticVerdictKind::AsymptoticallyQuadratic;
    else if (v.tail_max >= 10.0 * decay_tol && v.tail_non_decreasing)
        v.kind = AsymptoticVerdictKind::PersistentDefect;
    else
        v.kind = AsymptoticVerdictKind::Inconclusive;
    return v;
}

}  // namespace qstab
