#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qstab/quadratic.hpp"
#include "qstab/space.hpp"

namespace qstab {

/// Thresholds and stability constants for the restricted-domain theorems.
///
///   M = 4d (1/|r| + |1 - 1/|r||),   K = 4M
///   C_restricted = 4 (2+|r|+|s|) / |rs| * delta   (for ||x||+||y|| >= K)
///   C_global     = 19(2+|r|+|s|) / |rs| * delta   (for all x, y)
///   C_approx     = C_global / 2                   (||f - Q|| everywhere)
///
/// The factor 19 is taken as given; K is an admissible threshold, not a
/// minimal one.
struct StabilityConstants {
    double d = 0.0;
    double delta = 0.0;
    double M = 0.0;
    double K = 0.0;
    double C_restricted = 0.0;
    double C_global = 0.0;
    double C_approx = 0.0;
};

StabilityConstants stability_constants(const EquationParams& params, double d, double delta);

struct ExtractionDiagnostics {
    int iterations = 0;
    /// deviations[n-1] = ||4^-n f(2^n x) - 4^-(n-1) f(2^(n-1) x)||
    std::vector<double> deviations;
    bool converged = false;
    /// Geometric tail bound last_deviation / 3, valid when deviations shrink by 4.
    double tail_estimate = 0.0;
    bool aborted = false;
    std::string message;
};

struct Extraction {
    Vector value;
    ExtractionDiagnostics diagnostics;
};

inline constexpr int kDefaultMaxIters = 26;
inline constexpr double kDefaultTol = 1e-10;

/// Direct-method limit Q(x) = lim 4^-n f(2^n x).
///
/// Stops at the first n whose successive deviation is <= tol (1 + ||iterate||),
/// otherwise returns iterate max_iters with converged = false. A non-finite
/// value of f aborts the iteration and returns the last finite iterate with
/// diagnostics.aborted set. Throws ExtractionError for tabulated maps and
/// ParameterError for max_iters < 1.
Extraction extract_quadratic(const MapHandle& f, const Eigen::Ref<const Vector>& x, int max_iters = kDefaultMaxIters,
                             double tol = kDefaultTol);

struct ResidualSample {
    std::vector<VectorPair> pairs;
    std::vector<double> residual_norms;
    double sup = 0.0;
};

/// ||residual_gq|| on each restricted pair ||x|| + ||y|| >= d.
ResidualSample restricted_residuals(const MapHandle& f, const EquationParams& params, double d,
                                    const SpaceSpec& space, const Sampler& sampler);

/// Empirical sup of ||residual_gq|| over restricted pairs. Sampling only
/// ever sees a lower bound of the true sup.
double estimate_delta_restricted(const MapHandle& f, const EquationParams& params, double d, const SpaceSpec& space,
                                 const Sampler& sampler);

struct CertifyOptions {
    int max_iters = kDefaultMaxIters;
    double tol = kDefaultTol;
    /// Analytic delta used for the bound instead of the sampled delta_hat.
    std::optional<double> delta_override;
    int sphere_probes = 32;
    int restricted_probes = 32;
};

enum class CertificateStatus { Pass, Fail, Inconclusive };

std::string to_string(CertificateStatus status);

struct StabilityCertificate {
    EquationParams params;
    double d = 0.0;
    StabilityConstants constants;
    double delta_hat = 0.0;
    std::optional<double> delta_override;
    std::vector<Vector> probes;
    std::vector<Vector> q_samples;
    std::vector<double> deviations;
    double max_deviation = 0.0;
    double bound_used = 0.0;
    bool pass = false;
    CertificateStatus status = CertificateStatus::Inconclusive;
    double evenness_defect = 0.0;
    int unconverged_probes = 0;
    std::uint64_t seed = 0;
    int pair_count = 0;
    std::vector<std::string> warnings;
    ResidualSample residuals;
};

/// delta_hat from restricted pairs, constants from delta_hat (or the
/// override), Q extracted at unit-sphere probes plus the first restricted
/// points, then max ||f - Q|| compared with C_approx:
///   pass <=> max_deviation <= C_approx + 1e-9 (1 + C_approx).
/// Extraction failure at any probe makes the certificate inconclusive.
StabilityCertificate certify(const MapHandle& f, const EquationParams& params, double d, const SpaceSpec& space,
                             const Sampler& sampler, const CertifyOptions& options = {});

struct CzerwikReport {
    double delta = 0.0;
    double bound = 0.0;  ///< delta / 2
    double max_deviation = 0.0;
    bool bound_holds = false;
    double homogeneity_defect = 0.0;  ///< max ||Q(tx) - t^2 Q(x)|| / ((1+t^2)(1+||Q(x)||)), t in {2, 3, 1/2}
    bool homogeneous = false;
    int unconverged_probes = 0;
    std::vector<Vector> probes;
    std::vector<Vector> q_samples;
};

/// Unrestricted check of ||f - Q|| <= delta/2 with delta = sup ||residual_q||.
CzerwikReport verify_czerwik(const MapHandle& f, const SpaceSpec& space, const Sampler& sampler,
                             int max_iters = kDefaultMaxIters, double tol = kDefaultTol);

}  // namespace qstab
