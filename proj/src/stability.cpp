#include "qstab/stability.hpp"

#include <algorithm>
#include <cmath>

namespace qstab {

namespace {

// Probe streams are offset from the pair stream so they never share draws.
constexpr std::uint64_t kSphereProbeStream = 0x5EED0F5E11EULL;
constexpr std::uint64_t kBallProbeStream = 0x5EED0BA11ULL;

double extraction_scale(const Vector& v) { return 1.0 + codomain_norm(v); }

}  // namespace

StabilityConstants stability_constants(const EquationParams& params, double d, double delta) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ParameterError("d must be finite and >= 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be finite and >= 0");
    const double ar = std::abs(params.r());
    const double as = std::abs(params.s());
    const double ars = std::abs(params.rs());
    if (!(ars > 0.0)) throw ParameterError("rs must be nonzero");

    StabilityConstants c;
    c.d = d;
    c.delta = delta;
    c.M = 4.0 * d * (1.0 / ar + std::abs(1.0 - 1.0 / ar));
    c.K = 4.0 * c.M;
    const double shape = (2.0 + ar + as) / ars;
    c.C_restricted = 4.0 * shape * delta;
    c.C_global = 19.0 * shape * delta;
    c.C_approx = c.C_global / 2.0;
    return c;
}

Extraction extract_quadratic(const MapHandle& f, const Eigen::Ref<const Vector>& x, int max_iters, double tol) {
    if (!f.callable()) throw ExtractionError("extraction needs a callable map; tabulated maps cannot be evaluated at 2^n x");
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(tol >= 0.0)) throw ParameterError("tol must be >= 0");

    Extraction out;
    auto& diag = out.diagnostics;
    Vector prev = f(x);
    if (!prev.allFinite()) {
        diag.aborted = true;
        diag.message = "f(x) is not finite";
        out.value = prev;
        return out;
    }
    for (int n = 1; n <= max_iters; ++n) {
        const Vector scaled = std::ldexp(1.0, n) * x;
        const Vector next = std::ldexp(1.0, -2 * n) * f(scaled);
        if (!next.allFinite()) {
            diag.aborted = true;
            diag.message = "non-finite value of f at 2^" + std::to_string(n) + " x";
            break;
        }
        const double dev = codomain_norm(next - prev);
        diag.deviations.push_back(dev);
        diag.iterations = n;
        prev = next;
        if (dev <= tol * extraction_scale(next)) {
            diag.converged = true;
            break;
        }
    }
    diag.tail_estimate = diag.deviations.empty() ? 0.0 : diag.deviations.back() / 3.0;
    out.value = std::move(prev);
    return out;
}

ResidualSample restricted_residuals(const MapHandle& f, const EquationParams& params, double d,
                                    const SpaceSpec& space, const Sampler& sampler) {
    if (space.dim() != f.domain_dim()) throw ParameterError("space dimension does not match the map's domain");
    ResidualSample out;
    out.pairs = sample_pairs_restricted(space, d, sampler);
    out.residual_norms.reserve(out.pairs.size());
    for (const auto& [x, y] : out.pairs) {
        const double r = codomain_norm(residual_gq(f, params, x, y));
        out.residual_norms.push_back(r);
        out.sup = std::max(out.sup, r);
    }
    return out;
}

double estimate_delta_restricted(const MapHandle& f, const EquationParams& params, double d, const SpaceSpec& space,
                                 const Sampler& sampler) {
    return restricted_residuals(f, params, d, space, sampler).sup;
}

std::string to_string(CertificateStatus status) {
    switch (status) {
        case CertificateStatus::Pass: return "pass";
        case CertificateStatus::Fail: return "fail";
        case CertificateStatus::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

StabilityCertificate certify(const MapHandle& f, const EquationParams& params, double d, const SpaceSpec& space,
                             const Sampler& sampler, const CertifyOptions& options) {
    if (options.delta_override && !(*options.delta_override >= 0.0))
        throw ParameterError("delta override must be >= 0");
    if (options.sphere_probes < 0 || options.restricted_probes < 0) throw ParameterError("probe counts must be >= 0");

    StabilityCertificate cert{.params = params};
    cert.d = d;
    cert.seed = sampler.seed;
    cert.residuals = restricted_residuals(f, params, d, space, sampler);
    cert.pair_count = static_cast<int>(cert.residuals.pairs.size());
    cert.delta_hat = cert.residuals.sup;
    cert.delta_override = options.delta_override;
    const double delta_used = options.delta_override.value_or(cert.delta_hat);
    cert.constants = stability_constants(params, d, delta_used);
    cert.bound_used = cert.constants.C_approx;

    if (params.near_degenerate())
        cert.warnings.push_back("|rs| < 1e-2: stability constants exceed 1900 delta and the bound is vacuous at desk scale");
    if (!params.rational_r()) cert.warnings.push_back("r is not an exact fraction; rational-r identities are not asserted");

    if (options.sphere_probes > 0) {
        Sampler sphere{derive_seed(sampler.seed, kSphereProbeStream), options.sphere_probes, 1.0, AnnulusMode{1.0, 1.0}};
        cert.probes = sample_vectors(space, sphere);
    }
    const int from_pairs = std::min(options.restricted_probes, cert.pair_count);
    for (int i = 0; i < from_pairs; ++i) cert.probes.push_back(cert.residuals.pairs[static_cast<std::size_t>(i)].first);

    bool extraction_failed = false;
    for (const Vector& x : cert.probes) {
        const Vector fx = f(x);
        cert.evenness_defect = std::max(cert.evenness_defect, codomain_norm(fx - f(-x)));
        const Extraction ex = extract_quadratic(f, x, options.max_iters, options.tol);
        if (ex.diagnostics.aborted) extraction_failed = true;
        if (!ex.diagnostics.converged) ++cert.unconverged_probes;
        const double dev = codomain_norm(fx - ex.value);
        cert.deviations.push_back(dev);
        cert.max_deviation = std::max(cert.max_deviation, dev);
        cert.q_samples.push_back(ex.value);
    }
    if (cert.evenness_defect > 1e-9)
        cert.warnings.push_back("f is not even on the probes (evenness defect above 1e-9); the theorem assumes an even map");

    cert.pass = cert.max_deviation <= cert.bound_used + 1e-9 * (1.0 + cert.bound_used);
    if (extraction_failed || cert.unconverged_probes > 0) {
        cert.status = CertificateStatus::Inconclusive;
        cert.warnings.push_back("direct-method extraction did not converge at every probe");
    } else {
        cert.status = cert.pass ? CertificateStatus::Pass : CertificateStatus::Fail;
    }
    return cert;
}

CzerwikReport verify_czerwik(const MapHandle& f, const SpaceSpec& space, const Sampler& sampler, int max_iters,
                             double tol) {
    if (space.dim() != f.domain_dim()) throw ParameterError("space dimension does not match the map's domain");
    CzerwikReport rep;
    for (const auto& [x, y] : sample_pairs_restricted(space, 0.0, sampler))
        rep.delta = std::max(rep.delta, codomain_norm(residual_q(f, x, y)));
    rep.bound = rep.delta / 2.0;

    const int n_probes = std::min(sampler.count, 32);
    rep.probes = sample_vectors(space, Sampler{derive_seed(sampler.seed, kSphereProbeStream), 32, 1.0,
                                               AnnulusMode{1.0, 1.0}});
    for (const Vector& x : sample_vectors(space, Sampler{derive_seed(sampler.seed, kBallProbeStream), n_probes,
                                                         sampler.radius_max, BallMode{}}))
        rep.probes.push_back(x);

    double q_scale = 0.0;
    for (const Vector& x : rep.probes) {
        const Extraction ex = extract_quadratic(f, x, max_iters, tol);
        if (!ex.diagnostics.converged) ++rep.unconverged_probes;
        rep.max_deviation = std::max(rep.max_deviation, codomain_norm(f(x) - ex.value));
        q_scale = std::max(q_scale, codomain_norm(ex.value));
        rep.q_samples.push_back(ex.value);

        for (const double t : {2.0, 3.0, 0.5}) {
            const Extraction ext = extract_quadratic(f, t * x, max_iters, tol);
            if (!ext.diagnostics.converged) ++rep.unconverged_probes;
            const double defect = codomain_norm(ext.value - t * t * ex.value) /
                                  ((1.0 + t * t) * (1.0 + codomain_norm(ex.value)));
            rep.homogeneity_defect = std::max(rep.homogeneity_defect, defect);
        }
    }
    rep.bound_holds = rep.max_deviation <= rep.bound + tol * (1.0 + rep.bound + q_scale);
    rep.homogeneous = rep.homogeneity_defect <= tol;
    return rep;
}

}  // namespace qstab
