#include "qstab/quadratic.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qstab {

namespace {

void require_pair_dims(const MapHandle& f, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    if (x.size() != f.domain_dim() || y.size() != f.domain_dim())
        throw ParameterError("argument dimension does not match the map's domain");
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// EquationParams

EquationParams::EquationParams(double r) : r_(r), s_(1.0 - r) {
    if (!std::isfinite(r)) throw ParameterError("r must be finite");
    if (r_ == 0.0) throw ParameterError("r must be nonzero");
    if (s_ == 0.0) throw ParameterError("s = 1 - r must be nonzero (r = 1 is excluded)");
}

EquationParams EquationParams::from_real(double r) { return EquationParams(r); }

EquationParams EquationParams::from_fraction(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParameterError("fraction denominator must be nonzero");
    if (num == 0) throw ParameterError("r must be nonzero");
    if (num == den) throw ParameterError("s = 1 - r must be nonzero (r = 1 is excluded)");
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    EquationParams p(static_cast<double>(num) / static_cast<double>(den));
    p.fraction_ = Fraction{num, den};
    return p;
}

EquationParams EquationParams::parse(std::string_view text) {
    text = trim(text);
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t num = 0;
        std::int64_t den = 0;
        if (!parse_number(trim(text.substr(0, slash)), num) || !parse_number(trim(text.substr(slash + 1)), den))
            throw ParameterError("cannot parse fraction '" + std::string(text) + "'");
        return from_fraction(num, den);
    }
    double r = 0.0;
    if (!parse_number(text, r)) throw ParameterError("cannot parse r = '" + std::string(text) + "'");
    return from_real(r);
}

bool EquationParams::dyadic() const {
    if (!fraction_) return false;
    const std::int64_t den = fraction_->den;
    return den > 0 && (den & (den - 1)) == 0;
}

std::string EquationParams::describe() const {
    std::ostringstream os;
    if (fraction_) {
        os << fraction_->num << "/" << fraction_->den;
    } else {
        os.precision(17);
        os << r_;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// MapHandle

MapHandle::MapHandle(Evaluator eval, int domain_dim, int codomain_dim, std::string label)
    : eval_(std::move(eval)), domain_dim_(domain_dim), codomain_dim_(codomain_dim), label_(std::move(label)) {
    if (!eval_) throw ParameterError("map evaluator must be set");
    if (domain_dim_ < 1 || codomain_dim_ < 1) throw ParameterError("map dimensions must be >= 1");
}

MapHandle MapHandle::tabulated(std::vector<std::pair<Vector, Vector>> table, std::string label) {
    if (table.empty()) throw ParameterError("tabulated map needs at least one entry");
    const auto n = table.front().first.size();
    const auto m = table.front().second.size();
    for (const auto& [x, y] : table) {
        if (x.size() != n || y.size() != m) throw ParameterError("tabulated map entries have inconsistent sizes");
    }
    auto eval = [table = std::move(table)](const Vector& x) -> Vector {
        for (const auto& [key, value] : table) {
            if (key == x) return value;
        }
        throw ParameterError("tabulated map has no entry for the requested point");
    };
    MapHandle h(std::move(eval), static_cast<int>(n), static_cast<int>(m), std::move(label));
    h.callable_ = false;
    return h;
}

Vector MapHandle::operator()(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != domain_dim_) throw ParameterError("argument dimension does not match the map's domain");
    Vector y = eval_(Vector(x));
    if (y.size() != codomain_dim_) throw ParameterError("map returned a value of the wrong dimension");
    return y;
}

MapHandle as_map(const QuadraticFormd& q, std::string label) {
    return MapHandle([q](const Vector& x) -> Vector { return q(x); }, q.domain_dim(), q.codomain_dim(),
                     std::move(label));
}

// ---------------------------------------------------------------------------
// Residuals

Vector residual_q(const MapHandle& f, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    require_pair_dims(f, x, y);
    return f(x + y) + f(x - y) - 2.0 * f(x) - 2.0 * f(y);
}

Vector residual_gq(const MapHandle& f, const EquationParams& params, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
    require_pair_dims(f, x, y);
    const double r = params.r();
    const double s = params.s();
    return f(r * x + s * y) + params.rs() * f(x - y) - r * f(x) - s * f(y);
}

double residual_scale(const SpaceSpec& space, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    const double nx = norm_eval(space, x);
    const double ny = norm_eval(space, y);
    return 1.0 + nx * nx + ny * ny;
}

ParityParts parity_decompose(const MapHandle& f) {
    MapHandle even(
        [f](const Vector& x) -> Vector { return 0.5 * (f(x) + f(-x)); }, f.domain_dim(), f.codomain_dim(),
        f.label() + ":even");
    MapHandle odd(
        [f](const Vector& x) -> Vector { return 0.5 * (f(x) - f(-x)); }, f.domain_dim(), f.codomain_dim(),
        f.label() + ":odd");
    return ParityParts{std::move(even), std::move(odd)};
}

Vector polarize(const MapHandle& f, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    require_pair_dims(f, x, y);
    return 0.25 * (f(x + y) - f(x - y));
}

ChainDefects chain_defects(const ParityParts& parts, const EquationParams& params, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) {
    require_pair_dims(parts.even, x, y);
    const double r = params.r();
    const double s = params.s();
    const MapHandle& fo = parts.odd;
    const MapHandle& fe = parts.even;

    ChainDefects d;
    d.rx_scaling = codomain_norm(fo(r * x) - r * r * fo(x));
    d.sy_scaling = codomain_norm(fo(s * y) - s * (1.0 + r) * fo(y));
    const Vector fe_x = fe(x);
    const Vector fe_2x = fe(2.0 * x);
    d.doubling = codomain_norm(fe_2x - 4.0 * fe_x);
    d.even_expansion = codomain_norm(fe(2.0 * x + y) + 2.0 * fe_x + fe(y) - 2.0 * fe(x + y) - fe_2x);
    return d;
}

ChainDefects derivation_chain_check(const MapHandle& f, const EquationParams& params, const SpaceSpec& space,
                                    const Sampler& sampler) {
    if (space.dim() != f.domain_dim()) throw ParameterError("space dimension does not match the map's domain");
    const ParityParts parts = parity_decompose(f);
    ChainDefects worst;
    for (const auto& [x, y] : sample_pairs_restricted(space, 0.0, sampler)) {
        const ChainDefects d = chain_defects(parts, params, x, y);
        worst.rx_scaling = std::max(worst.rx_scaling, d.rx_scaling);
        worst.sy_scaling = std::max(worst.sy_scaling, d.sy_scaling);
        worst.doubling = std::max(worst.doubling, d.doubling);
        worst.even_expansion = std::max(worst.even_expansion, d.even_expansion);
    }
    return worst;
}

}  // namespace qstab
