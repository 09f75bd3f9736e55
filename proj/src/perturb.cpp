#include "qstab/perturb.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace qstab {

namespace {

double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ParameterError("cannot parse " + what + " from '" + std::string(text) + "'");
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

NoiseModel parse_noise(const std::string& text, int domain_dim, std::uint64_t seed) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (kind == "none" && arg.empty()) return noise::None{};
    if (arg.empty()) throw ParameterError("noise model '" + text + "' needs a parameter");
    if (kind == "constant") return noise::Constant{parse_double(arg, "constant noise level")};
    if (kind == "uniform") {
        const double delta = parse_double(arg, "uniform noise bound");
        if (delta < 0.0) throw ParameterError("uniform noise bound must be >= 0");
        return noise::UniformBounded{delta, seed};
    }
    if (kind == "decay") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) throw ParameterError("decay noise expects decay:<c>,<alpha>");
        const double c = parse_double(std::string_view(arg).substr(0, comma), "decay amplitude");
        const double alpha = parse_double(std::string_view(arg).substr(comma + 1), "decay exponent");
        if (!(alpha > 0.0)) throw ParameterError("decay exponent must be > 0");
        return noise::Decay{c, alpha};
    }
    if (kind == "sine") {
        if (domain_dim < 1) throw ParameterError("sine noise needs a domain dimension");
        return noise::Sine{parse_double(arg, "sine amplitude"), Vector::Ones(domain_dim)};
    }
    throw ParameterError("unknown noise model '" + text + "'");
}

std::string describe(const NoiseModel& model) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, noise::None>) return "none";
            else if constexpr (std::is_same_v<T, noise::Constant>) return "constant:" + fmt(n.c);
            else if constexpr (std::is_same_v<T, noise::UniformBounded>) return "uniform:" + fmt(n.delta);
            else if constexpr (std::is_same_v<T, noise::Decay>) return "decay:" + fmt(n.c) + "," + fmt(n.alpha);
            else return "sine:" + fmt(n.c);
        },
        model);
}

double noise_bound(const NoiseModel& model) {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, noise::None>) return 0.0;
            else if constexpr (std::is_same_v<T, noise::UniformBounded>) return n.delta;
            else return std::abs(n.c);
        },
        model);
}

std::uint64_t hash_point(const Eigen::Ref<const Vector>& x, std::uint64_t seed, std::uint64_t k) {
    std::uint64_t h = mix64(seed ^ mix64(k));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        // +0.0 and -0.0 hash alike so the noise at 0 is well defined
        const double v = x[i] == 0.0 ? 0.0 : x[i];
        h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    }
    return h;
}

QuadraticFormd make_quadratic(int domain_dim, int codomain_dim, const std::vector<Matrix>& coeffs,
                              bool* symmetrized) {
    if (codomain_dim < 1 || static_cast<int>(coeffs.size()) != codomain_dim)
        throw ParameterError("expected one coefficient matrix per codomain coordinate");
    std::vector<Matrix> sym;
    sym.reserve(coeffs.size());
    bool changed = false;
    for (const Matrix& b : coeffs) {
        if (b.rows() != domain_dim || b.cols() != domain_dim)
            throw ParameterError("coefficient matrix does not match the domain dimension");
        if (b != b.transpose()) {
            changed = true;
            sym.emplace_back(0.5 * (b + b.transpose()));
        } else {
            sym.push_back(b);
        }
    }
    if (symmetrized) *symmetrized = changed;
    return QuadraticFormd(std::move(sym));
}

QuadraticFormd random_quadratic(int domain_dim, int codomain_dim, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Matrix> coeffs;
    for (int k = 0; k < codomain_dim; ++k) {
        Matrix b(domain_dim, domain_dim);
        for (int i = 0; i < domain_dim; ++i) {
            for (int j = i; j < domain_dim; ++j) {
                b(i, j) = unif(rng);
                b(j, i) = b(i, j);
            }
        }
        coeffs.push_back(std::move(b));
    }
    return QuadraticFormd(std::move(coeffs));
}

MapHandle make_perturbed(const QuadraticFormd& q, const NoiseModel& model, const SpaceSpec& domain) {
    if (domain.dim() != q.domain_dim()) throw ParameterError("space dimension does not match the quadratic form");
    const int m = q.codomain_dim();
    auto eval = [q, model, domain, m](const Vector& x) -> Vector {
        Vector out = q(x);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, noise::Constant>) {
                    out.array() += n.c;
                } else if constexpr (std::is_same_v<T, noise::UniformBounded>) {
                    for (int k = 0; k < m; ++k) {
                        const std::uint64_t h = hash_point(x, n.seed, static_cast<std::uint64_t>(k));
                        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
                        out[k] += n.delta * (2.0 * u - 1.0);
                    }
                } else if constexpr (std::is_same_v<T, noise::Decay>) {
                    out.array() += n.c / (1.0 + std::pow(norm_eval(domain, x), n.alpha));
                } else if constexpr (std::is_same_v<T, noise::Sine>) {
                    if (n.w.size() != x.size()) throw ParameterError("sine frequency vector has wrong dimension");
                    out.array() += n.c * std::sin(n.w.dot(x));
                }
            },
            model);
        return out;
    };
    return MapHandle(std::move(eval), q.domain_dim(), m, "quadratic+" + describe(model));
}

MapHandle make_perturbed(const QuadraticFormd& q, const NoiseModel& model) {
    return make_perturbed(q, model, SpaceSpec::euclidean(q.domain_dim()));
}

MapHandle make_odd_witness(const Matrix& linear) {
    if (linear.rows() < 1 || linear.cols() < 1) throw ParameterError("linear witness needs a nonempty matrix");
    return MapHandle([linear](const Vector& x) -> Vector { return linear * x; }, static_cast<int>(linear.cols()),
                     static_cast<int>(linear.rows()), "linear");
}

MapHandle make_cubic(int domain_dim, int codomain_dim) {
    return MapHandle(
        [codomain_dim](const Vector& x) -> Vector {
            return Vector::Constant(codomain_dim, x.array().cube().sum());
        },
        domain_dim, codomain_dim, "cubic");
}

}  // namespace qstab
