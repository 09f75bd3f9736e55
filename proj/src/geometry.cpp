#include "qstab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qstab {

namespace {

double power(double base, double exponent) {
    if (base == 0.0 && exponent < 0.0) throw UndefinedValueError("zero norm raised to a negative exponent");
    return std::pow(base, exponent);
}

std::vector<VectorPair> witness_pairs(const SpaceSpec& space) {
    const int n = space.dim();
    const Vector zero = Vector::Zero(n);
    std::vector<VectorPair> out;
    for (const double t : {0.5, 1.0, 2.0}) {
        for (int i = 0; i < n; ++i) {
            const Vector x = t * Vector::Unit(n, i);
            out.emplace_back(x, zero);  // y = 0
            out.emplace_back(x, x);     // y = x
            out.emplace_back(zero, x);  // x = 0
        }
    }
    return out;
}

}  // namespace

Exponents Exponents::make(double p, double q, double u, double v) {
    for (const double e : {p, q, u, v}) {
        if (e == 0.0 || !std::isfinite(e)) throw ParameterError("exponents must be finite and nonzero");
    }
    return Exponents{p, q, u, v};
}

std::vector<Exponents> default_exponent_grid() {
    std::vector<Exponents> grid;
    const double values[] = {1.0, 2.0, 3.0};
    for (double p : values)
        for (double q : values)
            for (double u : values)
                for (double v : values) grid.push_back(Exponents{p, q, u, v});
    return grid;
}

double parallelogram_defect(const SpaceSpec& space, const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& y) {
    const double a = norm_eval(space, x + y);
    const double b = norm_eval(space, x - y);
    const double nx = norm_eval(space, x);
    const double ny = norm_eval(space, y);
    return a * a + b * b - 2.0 * nx * nx - 2.0 * ny * ny;
}

double gq_norm_defect(const SpaceSpec& space, const EquationParams& params, const Exponents& exps,
                      const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    const double r = params.r();
    const double s = params.s();
    return power(norm_eval(space, r * x + s * y), exps.p) + params.rs() * power(norm_eval(space, x - y), exps.q) -
           r * power(norm_eval(space, x), exps.u) - s * power(norm_eval(space, y), exps.v);
}

InnerProductVerdict detect_inner_product(const SpaceSpec& space, const Sampler& sampler, double tol) {
    if (!(tol >= 0.0)) throw ParameterError("tolerance must be >= 0");
    const int n = space.dim();
    InnerProductVerdict verdict;
    verdict.seed = sampler.seed;
    verdict.tol = tol;

    std::vector<VectorPair> pairs = sample_pairs_restricted(space, 0.0, sampler);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) pairs.emplace_back(Vector::Unit(n, i), Vector::Unit(n, j));
    verdict.pair_count = static_cast<int>(pairs.size());

    bool within = true;
    for (const auto& [x, y] : pairs) {
        const double defect = std::abs(parallelogram_defect(space, x, y));
        const double normalized = defect / residual_scale(space, x, y);
        if (defect > verdict.max_parallelogram_defect) {
            verdict.max_parallelogram_defect = defect;
            verdict.worst_pair = {x, y};
        }
        verdict.max_normalized_defect = std::max(verdict.max_normalized_defect, normalized);
        if (normalized > tol) within = false;
    }
    if (!within) return verdict;

    Matrix gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Vector ei = Vector::Unit(n, i);
            const Vector ej = Vector::Unit(n, j);
            const double plus = norm_eval(space, ei + ej);
            const double minus = norm_eval(space, ei - ej);
            gram(i, j) = (plus * plus - minus * minus) / 4.0;
            gram(j, i) = gram(i, j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= tol) return verdict;

    double bilinearity = 0.0;
    for (const auto& [x, y] : pairs) {
        for (const Vector* v : {&x, &y}) {
            const double nv = norm_eval(space, *v);
            bilinearity = std::max(bilinearity, std::abs(nv * nv - v->dot(gram * *v)) / (1.0 + nv * nv));
        }
    }
    verdict.recovered_gram = gram;
    verdict.bilinearity_defect = bilinearity;
    verdict.accepted = bilinearity <= std::max(tol, 1e-9);
    return verdict;
}

std::vector<ExponentScanRow> exponent_scan(const SpaceSpec& space, const EquationParams& params,
                                           const std::vector<Exponents>& grid, const Sampler& sampler, double tol) {
    if (grid.empty()) throw ParameterError("exponent grid must be nonempty");
    for (const auto& e : grid) Exponents::make(e.p, e.q, e.u, e.v);

    std::vector<VectorPair> pairs = witness_pairs(space);
    for (auto& pr : sample_pairs_restricted(space, 0.0, sampler)) pairs.push_back(std::move(pr));

    std::vector<ExponentScanRow> table;
    table.reserve(grid.size());
    for (const Exponents& exps : grid) {
        ExponentScanRow row{.exps = exps};
        for (const auto& [x, y] : pairs) {
            double defect = 0.0;
            try {
                defect = std::abs(gq_norm_defect(space, params, exps, x, y));
            } catch (const UndefinedValueError&) {
                ++row.excluded;
                continue;
            }
            ++row.evaluated;
            row.sup_defect = std::max(row.sup_defect, defect);
            row.sup_normalized_defect = std::max(row.sup_normalized_defect, defect / residual_scale(space, x, y));
        }
        row.flagged = row.evaluated > 0 && row.sup_normalized_defect <= tol;
        table.push_back(row);
    }
    return table;
}

}  // namespace qstab
