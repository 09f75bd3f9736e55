#include "qstab/space.hpp"

#include <cmath>
#include <sstream>

#include "qstab/errors.hpp"

namespace qstab {

namespace {

void require_dim(int dim) {
    if (dim < 1) throw ParameterError("space dimension must be >= 1");
}

constexpr int kMaxRejections = 100000;

}  // namespace

SpaceSpec SpaceSpec::euclidean(int dim) {
    require_dim(dim);
    return SpaceSpec(dim, NormKind::Euclidean);
}

SpaceSpec SpaceSpec::p_norm(int dim, double p) {
    require_dim(dim);
    if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("p-norm exponent must be finite and > 0");
    SpaceSpec s(dim, NormKind::PNorm);
    s.p_ = p;
    return s;
}

SpaceSpec SpaceSpec::sup_norm(int dim) {
    require_dim(dim);
    return SpaceSpec(dim, NormKind::Sup);
}

SpaceSpec SpaceSpec::weighted_quadratic(const Matrix& gram) {
    if (gram.rows() != gram.cols()) throw ParameterError("weighted norm matrix must be square");
    require_dim(static_cast<int>(gram.rows()));
    if (!gram.allFinite()) throw ParameterError("weighted norm matrix has non-finite entries");
    if (gram != gram.transpose()) throw ParameterError("weighted norm matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw ParameterError("weighted norm matrix must be positive-definite");
    SpaceSpec s(static_cast<int>(gram.rows()), NormKind::WeightedQuadratic);
    s.gram_ = gram;
    return s;
}

std::string SpaceSpec::describe() const {
    switch (kind_) {
        case NormKind::Euclidean: return "euclidean";
        case NormKind::Sup: return "sup";
        case NormKind::WeightedQuadratic: return "weighted";
        case NormKind::PNorm: {
            std::ostringstream os;
            os.precision(17);
            os << "p:" << p_;
            return os.str();
        }
    }
    return "unknown";
}

double norm_eval(const SpaceSpec& space, const Eigen::Ref<const Vector>& x) {
    if (x.size() != space.dim()) throw ParameterError("vector length does not match space dimension");
    switch (space.kind()) {
        case NormKind::Euclidean: return x.stableNorm();
        case NormKind::Sup: return x.lpNorm<Eigen::Infinity>();
        case NormKind::WeightedQuadratic: {
            // same scaling as the p-norm so tiny and huge vectors keep a nonzero finite norm
            const double m = x.lpNorm<Eigen::Infinity>();
            if (m == 0.0) return 0.0;
            const Vector u = x / m;
            return m * std::sqrt(std::max(u.dot(space.gram() * u), 0.0));
        }
        case NormKind::PNorm: {
            // scaled by the largest coordinate to avoid overflow in |x_i|^p
            const double m = x.lpNorm<Eigen::Infinity>();
            if (m == 0.0) return 0.0;
            const double p = space.p();
            double acc = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / m, p);
            return m * std::pow(acc, 1.0 / p);
        }
    }
    return 0.0;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

Vector draw_in_annulus(const SpaceSpec& space, std::mt19937_64& rng, double r_min, double r_max) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> radius(r_min, r_max);
    Vector g(space.dim());
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = gauss(rng);
        const double ng = norm_eval(space, g);
        if (!(ng > 0.0)) continue;
        const double t = (r_min == r_max) ? r_min : radius(rng);
        Vector x = (t / ng) * g;
        if (r_min == r_max) return x;  // sphere: accept the rounded radius
        const double nx = norm_eval(space, x);
        if (nx >= r_min && nx <= r_max) return x;
    }
    throw InfeasibleDomainError("could not draw a vector in the requested annulus");
}

std::vector<Vector> sample_vectors(const SpaceSpec& space, const Sampler& sampler) {
    if (sampler.count < 1) throw ParameterError("sample count must be >= 1");
    double r_min = 0.0;
    double r_max = sampler.radius_max;
    if (const auto* ann = std::get_if<AnnulusMode>(&sampler.mode)) {
        r_min = ann->r_min;
        r_max = ann->r_max;
    } else if (!std::holds_alternative<BallMode>(sampler.mode)) {
        throw ParameterError("sample_vectors requires ball or annulus mode");
    }
    if (!(r_min >= 0.0) || !(r_max > 0.0)) throw ParameterError("radii must satisfy 0 <= r_min, r_max > 0");
    if (r_min > r_max) throw ParameterError("annulus requires r_min <= r_max");

    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(sampler.count));
    for (int i = 0; i < sampler.count; ++i) {
        std::mt19937_64 rng(derive_seed(sampler.seed, static_cast<std::uint64_t>(i)));
        out.push_back(draw_in_annulus(space, rng, r_min, r_max));
    }
    return out;
}

std::vector<VectorPair> sample_pairs_restricted(const SpaceSpec& space, double d, const Sampler& sampler) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ParameterError("restriction radius d must be finite and >= 0");
    if (sampler.count < 1) throw ParameterError("sample count must be >= 1");
    if (!(sampler.radius_max > 0.0)) throw ParameterError("radius_max must be > 0");
    if (2.0 * sampler.radius_max < d)
        throw InfeasibleDomainError("no pair with ||x||+||y|| >= d fits in a ball of radius radius_max");

    std::vector<VectorPair> out;
    out.reserve(static_cast<std::size_t>(sampler.count));
    for (int i = 0; i < sampler.count; ++i) {
        std::mt19937_64 rng(derive_seed(sampler.seed, static_cast<std::uint64_t>(i)));
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxRejections && !accepted; ++attempt) {
            Vector x = draw_in_annulus(space, rng, 0.0, sampler.radius_max);
            Vector y = draw_in_annulus(space, rng, 0.0, sampler.radius_max);
            if (norm_eval(space, x) + norm_eval(space, y) >= d) {
                out.emplace_back(std::move(x), std::move(y));
                accepted = true;
            }
        }
        if (!accepted) throw InfeasibleDomainError("rejection sampling found no admissible pair; increase radius_max");
    }
    return out;
}

}  // namespace qstab
