#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qstab/errors.hpp"
#include "qstab/space.hpp"

namespace qstab {

// ---------------------------------------------------------------------------
// Equation parameters

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

/// The coefficients (r, s) of the generalized equation
///   f(rx + sy) + rs f(x - y) = r f(x) + s f(y),   r + s = 1, rs != 0.
class EquationParams {
public:
    static EquationParams from_real(double r);
    /// r = num/den, reduced; rational_r() is true.
    static EquationParams from_fraction(std::int64_t num, std::int64_t den);
    /// Accepts "p/q" (exact) or a decimal literal.
    static EquationParams parse(std::string_view text);

    double r() const { return r_; }
    double s() const { return s_; }
    double rs() const { return r_ * s_; }
    bool rational_r() const { return fraction_.has_value(); }
    const std::optional<Fraction>& fraction() const { return fraction_; }
    /// True when r = p/2^k, for which r, s and rs are exact in binary64.
    bool dyadic() const;
    /// |rs| < 1e-2: every stability constant scales like 1/|rs|.
    bool near_degenerate() const { return std::abs(rs()) < 1e-2; }

    std::string describe() const;

private:
    explicit EquationParams(double r);

    double r_;
    double s_;
    std::optional<Fraction> fraction_;
};

// ---------------------------------------------------------------------------
// Quadratic forms

/// f(x)_k = x^T B_k x for m symmetric n x n coefficient matrices B_k.
template <typename Scalar>
class QuadraticForm {
public:
    using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    /// Every matrix must be square, of one common size, and exactly symmetric.
    explicit QuadraticForm(std::vector<MatrixType> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw ParameterError("quadratic form needs at least one coefficient matrix");
        const auto n = coeffs_.front().rows();
        if (n < 1) throw ParameterError("quadratic form domain dimension must be >= 1");
        for (const auto& b : coeffs_) {
            if (b.rows() != n || b.cols() != n) throw ParameterError("coefficient matrices must all be n x n");
            if (b != b.transpose()) throw ParameterError("coefficient matrices must be symmetric");
        }
    }

    int domain_dim() const { return static_cast<int>(coeffs_.front().rows()); }
    int codomain_dim() const { return static_cast<int>(coeffs_.size()); }
    const MatrixType& coeff(int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
    const std::vector<MatrixType>& coeffs() const { return coeffs_; }

    VectorType operator()(const Eigen::Ref<const VectorType>& x) const { return bilinear(x, x); }

    /// The symmetric bilinear form behind f: B(x, y)_k = x^T B_k y.
    VectorType bilinear(const Eigen::Ref<const VectorType>& x, const Eigen::Ref<const VectorType>& y) const {
        if (x.size() != domain_dim() || y.size() != domain_dim())
            throw ParameterError("quadratic form argument has wrong dimension");
        VectorType out(codomain_dim());
        for (int k = 0; k < codomain_dim(); ++k) out[k] = x.dot(coeffs_[static_cast<std::size_t>(k)] * y);
        return out;
    }

private:
    std::vector<MatrixType> coeffs_;
};

using QuadraticFormd = QuadraticForm<double>;

template <typename Scalar>
typename QuadraticForm<Scalar>::VectorType quad_eval(
    const QuadraticForm<Scalar>& q, const Eigen::Ref<const typename QuadraticForm<Scalar>::VectorType>& x) {
    return q(x);
}

// ---------------------------------------------------------------------------
// Maps

/// A deterministic map R^n -> R^m.
///
/// Callable maps can be evaluated anywhere. Tabulated maps only know the
/// points they were built from and throw ParameterError elsewhere; the
/// direct-method extractor refuses them.
class MapHandle {
public:
    using Evaluator = std::function<Vector(const Vector&)>;

    MapHandle(Evaluator eval, int domain_dim, int codomain_dim, std::string label);

    static MapHandle tabulated(std::vector<std::pair<Vector, Vector>> table, std::string label);

    Vector operator()(const Eigen::Ref<const Vector>& x) const;

    int domain_dim() const { return domain_dim_; }
    int codomain_dim() const { return codomain_dim_; }
    const std::string& label() const { return label_; }
    bool callable() const { return callable_; }

private:
    Evaluator eval_;
    int domain_dim_;
    int codomain_dim_;
    std::string label_;
    bool callable_ = true;
};

MapHandle as_map(const QuadraticFormd& q, std::string label = "quadratic");

// ---------------------------------------------------------------------------
// Residuals and derived maps

/// f(x+y) + f(x-y) - 2f(x) - 2f(y)
Vector residual_q(const MapHandle& f, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// f(rx+sy) + rs f(x-y) - r f(x) - s f(y)
Vector residual_gq(const MapHandle& f, const EquationParams& params, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

/// 1 + ||x||^2 + ||y||^2, the normalization for quadratic-growth residuals.
double residual_scale(const SpaceSpec& space, const Eigen::Ref<const Vector>& x,
                      const Eigen::Ref<const Vector>& y);

struct ParityParts {
    MapHandle even;
    MapHandle odd;
};

/// f_e(x) = (f(x) + f(-x))/2, f_o(x) = (f(x) - f(-x))/2.
ParityParts parity_decompose(const MapHandle& f);

/// (f(x+y) - f(x-y)) / 4; equals B(x, y) when f(x) = B(x, x).
Vector polarize(const MapHandle& f, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Defects of the intermediate identities used to show that (Gq) forces
/// odd solutions to vanish and even solutions to be quadratic. (a) and (b)
/// are evaluated on the odd part of f, (c) and (d) on the even part.
struct ChainDefects {
    double rx_scaling = 0.0;      ///< (a) ||f_o(rx) - r^2 f_o(x)||
    double sy_scaling = 0.0;      ///< (b) ||f_o(sy) - s(1+r) f_o(y)||
    double doubling = 0.0;        ///< (c) ||f_e(2x) - 4 f_e(x)||
    double even_expansion = 0.0;  ///< (d) ||f_e(2x+y) + 2f_e(x) + f_e(y) - 2f_e(x+y) - f_e(2x)||
};

ChainDefects chain_defects(const ParityParts& parts, const EquationParams& params,
                           const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Maximum of each chain defect over pairs drawn from `sampler` (ball mode,
/// unrestricted). Sample maxima only; this is evidence, not a proof.
ChainDefects derivation_chain_check(const MapHandle& f, const EquationParams& params, const SpaceSpec& space,
                                    const Sampler& sampler);

}  // namespace qstab
