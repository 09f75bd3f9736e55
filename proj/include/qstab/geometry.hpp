#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qstab/quadratic.hpp"
#include "qstab/space.hpp"

namespace qstab {

/// Exponents (p, q, u, v) of the norm identity
///   ||rx + sy||^p + rs ||x - y||^q = r ||x||^u + s ||y||^v.
/// All four must be nonzero.
struct Exponents {
    double p = 2.0;
    double q = 2.0;
    double u = 2.0;
    double v = 2.0;

    static Exponents make(double p, double q, double u, double v);
    bool operator==(const Exponents&) const = default;
};

/// {1, 2, 3}^4 in lexicographic order.
std::vector<Exponents> default_exponent_grid();

/// ||x+y||^2 + ||x-y||^2 - 2||x||^2 - 2||y||^2
double parallelogram_defect(const SpaceSpec& space, const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& y);

/// ||rx+sy||^p + rs||x-y||^q - r||x||^u - s||y||^v. Throws UndefinedValueError
/// when a zero norm meets a negative exponent.
double gq_norm_defect(const SpaceSpec& space, const EquationParams& params, const Exponents& exps,
                      const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

struct InnerProductVerdict {
    bool accepted = false;
    /// max |parallelogram_defect| over all tested pairs
    double max_parallelogram_defect = 0.0;
    /// max |defect| / (1 + ||x||^2 + ||y||^2)
    double max_normalized_defect = 0.0;
    VectorPair worst_pair;
    std::optional<Matrix> recovered_gram;
    std::optional<double> bilinearity_defect;
    int pair_count = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
};

/// Sample-based parallelogram test. Pairs are the sampler's ball pairs plus
/// the basis witnesses (e_i, e_j), i <= j. On acceptance the Gram matrix is
/// recovered by polarization of ||.||^2,
///   G_ij = (||e_i + e_j||^2 - ||e_i - e_j||^2) / 4,
/// and checked against ||x||^2 = x^T G x on the sampled points.
InnerProductVerdict detect_inner_product(const SpaceSpec& space, const Sampler& sampler, double tol);

struct ExponentScanRow {
    Exponents exps;
    double sup_defect = 0.0;
    double sup_normalized_defect = 0.0;
    int evaluated = 0;
    int excluded = 0;  ///< pairs skipped for 0^negative
    bool flagged = false;
};

/// For each tuple, sup |gq_norm_defect| over sampled pairs and the witness
/// families (x, 0), (x, x), (0, x) with x = t e_i, t in {1/2, 1, 2}.
/// A tuple is flagged when its normalized sup is <= tol.
std::vector<ExponentScanRow> exponent_scan(const SpaceSpec& space, const EquationParams& params,
                                           const std::vector<Exponents>& grid, const Sampler& sampler, double tol);

}  // namespace qstab
