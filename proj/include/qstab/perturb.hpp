#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qstab/quadratic.hpp"
#include "qstab/space.hpp"

namespace qstab {

namespace noise {

struct None {};
/// eta(x) = c in every output coordinate.
struct Constant {
    double c = 0.0;
};
/// eta(x)_k in [-delta, delta], a fixed hash of the bit pattern of x.
struct UniformBounded {
    double delta = 0.0;
    std::uint64_t seed = 0;
};
/// eta(x)_k = c / (1 + ||x||^alpha), with ||x|| the domain norm.
struct Decay {
    double c = 0.0;
    double alpha = 1.0;
};
/// eta(x)_k = c sin(w . x).
struct Sine {
    double c = 0.0;
    Vector w;
};

}  // namespace noise

using NoiseModel = std::variant<noise::None, noise::Constant, noise::UniformBounded, noise::Decay, noise::Sine>;

/// Parses the command-line noise syntax:
///   none | constant:<c> | uniform:<delta> | decay:<c>,<alpha> | sine:<c>
/// `seed` feeds the uniform model; sine uses w = (1, ..., 1).
NoiseModel parse_noise(const std::string& text, int domain_dim, std::uint64_t seed);
std::string describe(const NoiseModel& noise);

/// Sup-norm bound of eta over the whole domain (c for decay, |c| for sine).
double noise_bound(const NoiseModel& noise);

/// Hash of the IEEE bit patterns of x's coordinates, mixed with seed and the
/// output index k. Constants are those of mix64().
std::uint64_t hash_point(const Eigen::Ref<const Vector>& x, std::uint64_t seed, std::uint64_t k);

/// Symmetrizes non-symmetric input as (B + B^T)/2; `symmetrized` reports
/// whether any matrix needed it.
QuadraticFormd make_quadratic(int domain_dim, int codomain_dim, const std::vector<Matrix>& coeffs,
                              bool* symmetrized = nullptr);

/// Random symmetric coefficients with entries uniform in [-1, 1].
QuadraticFormd random_quadratic(int domain_dim, int codomain_dim, std::uint64_t seed);

/// f = Q + eta.
MapHandle make_perturbed(const QuadraticFormd& q, const NoiseModel& noise, const SpaceSpec& domain);
MapHandle make_perturbed(const QuadraticFormd& q, const NoiseModel& noise);

/// f(x) = L x: odd and additive.
MapHandle make_odd_witness(const Matrix& linear);

/// f(x)_k = sum_i x_i^3, a non-quadratic reference map.
MapHandle make_cubic(int domain_dim, int codomain_dim);

}  // namespace qstab
