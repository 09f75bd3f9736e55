#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qstab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorPair = std::pair<Vector, Vector>;

enum class NormKind { Euclidean, PNorm, WeightedQuadratic, Sup };

/// A finite-dimensional real normed space R^n.
///
/// Construct through the named factories; each validates its parameters and
/// throws ParameterError on failure. p-norms with 0 < p < 1 are accepted as
/// quasi-norms and reported through is_quasi_norm().
class SpaceSpec {
public:
    static SpaceSpec euclidean(int dim);
    static SpaceSpec p_norm(int dim, double p);
    static SpaceSpec sup_norm(int dim);
    /// ||x|| = sqrt(x^T A x); A must be symmetric positive-definite.
    static SpaceSpec weighted_quadratic(const Matrix& gram);

    int dim() const { return dim_; }
    NormKind kind() const { return kind_; }
    double p() const { return p_; }
    const Matrix& gram() const { return gram_; }
    bool is_quasi_norm() const { return kind_ == NormKind::PNorm && p_ < 1.0; }

    /// "euclidean", "p:1.5", "sup", "weighted"
    std::string describe() const;

private:
    SpaceSpec(int dim, NormKind kind) : dim_(dim), kind_(kind) {}

    int dim_;
    NormKind kind_;
    double p_ = 2.0;
    Matrix gram_;
};

double norm_eval(const SpaceSpec& space, const Eigen::Ref<const Vector>& x);

/// Norm used for values in the codomain Y = R^m.
inline double codomain_norm(const Eigen::Ref<const Vector>& y) {
    return y.size() == 0 ? 0.0 : y.lpNorm<Eigen::Infinity>();
}

// ---------------------------------------------------------------------------
// Sampling

struct BallMode {};
struct AnnulusMode {
    double r_min = 0.0;
    double r_max = 1.0;
};
struct RestrictedPairsMode {
    double d = 0.0;
};
using SamplerMode = std::variant<BallMode, AnnulusMode, RestrictedPairsMode>;

struct Sampler {
    std::uint64_t seed = 0;
    int count = 1;
    double radius_max = 1.0;
    SamplerMode mode = BallMode{};
};

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t z);

/// Independent stream seed for sample `index` of a run seeded with `seed`.
/// Sample i depends only on (seed, i), never on generation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Direction drawn from a normalized Gaussian, scaled to the space's unit
/// sphere, times a radius uniform in [r_min, r_max]. Redraws until the
/// evaluated norm lies in [r_min, r_max] exactly (a sphere r_min == r_max
/// is hit up to rounding).
Vector draw_in_annulus(const SpaceSpec& space, std::mt19937_64& rng, double r_min,
                       double r_max);

std::vector<Vector> sample_vectors(const SpaceSpec& space, const Sampler& sampler);

/// Pairs with ||x|| + ||y|| >= d, by rejection from independent ball draws
/// of radius sampler.radius_max.
std::vector<VectorPair> sample_pairs_restricted(const SpaceSpec& space, double d,
                                                const Sampler& sampler);

}  // namespace qstab
