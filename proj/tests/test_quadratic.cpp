#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "qstab/perturb.hpp"
#include "qstab/quadratic.hpp"

using namespace qstab;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

MapHandle scalar_map(double (*fn)(double), const char* label) {
    return MapHandle([fn](const Vector& x) -> Vector { return scalar(fn(x[0])); }, 1, 1, label);
}

double sq(double x) { return x * x; }
double sq_plus5(double x) { return x * x + 5.0; }
double cube(double x) { return x * x * x; }
double ident(double x) { return x; }
double sq_plus_x(double x) { return x * x + x; }

// Exact rational arithmetic, used as an independent oracle.
struct Rat {
    long long n, d;
    Rat(long long num, long long den = 1) : n(num), d(den) {
        const long long g = std::gcd(n, d);
        n /= g;
        d /= g;
        if (d < 0) n = -n, d = -d;
    }
    Rat operator+(Rat o) const { return Rat(n * o.d + o.n * d, d * o.d); }
    Rat operator-(Rat o) const { return Rat(n * o.d - o.n * d, d * o.d); }
    Rat operator*(Rat o) const { return Rat(n * o.n, d * o.d); }
    double value() const { return static_cast<double>(n) / static_cast<double>(d); }
};

const SpaceSpec kPlane = SpaceSpec::euclidean(2);

}  // namespace

TEST(EquationParams, FractionParsing) {
    const auto p = EquationParams::parse("1/3");
    EXPECT_TRUE(p.rational_r());
    EXPECT_EQ(p.fraction()->num, 1);
    EXPECT_EQ(p.fraction()->den, 3);
    EXPECT_DOUBLE_EQ(p.r(), 1.0 / 3.0);
    EXPECT_EQ(p.s(), 1.0 - p.r());

    const auto q = EquationParams::parse("2/-4");
    EXPECT_EQ(q.fraction()->num, -1);
    EXPECT_EQ(q.fraction()->den, 2);
    EXPECT_TRUE(q.dyadic());
    EXPECT_FALSE(p.dyadic());

    const auto dec = EquationParams::parse("0.25");
    EXPECT_FALSE(dec.rational_r());
    EXPECT_DOUBLE_EQ(dec.s(), 0.75);
}

TEST(EquationParams, RejectsDegenerate) {
    EXPECT_THROW(EquationParams::parse("1/1"), ParameterError);
    EXPECT_THROW(EquationParams::parse("0"), ParameterError);
    EXPECT_THROW(EquationParams::parse("1"), ParameterError);
    EXPECT_THROW(EquationParams::parse("1/0"), ParameterError);
    EXPECT_THROW(EquationParams::parse("abc"), ParameterError);
    EXPECT_THROW(EquationParams::parse("1/3x"), ParameterError);
}

TEST(EquationParams, NearDegenerateWarning) {
    EXPECT_TRUE(EquationParams::parse("1/200").near_degenerate());
    EXPECT_FALSE(EquationParams::parse("1/2").near_degenerate());
}

TEST(QuadEval, Examples) {
    const QuadraticFormd one({Matrix::Identity(1, 1)});
    EXPECT_DOUBLE_EQ(quad_eval(one, scalar(3))[0], 9.0);
    const QuadraticFormd plane({Matrix::Identity(2, 2)});
    EXPECT_DOUBLE_EQ(quad_eval(plane, Vector::LinSpaced(2, 3, 4))[0], 25.0);
    const auto q = random_quadratic(4, 3, 17);
    EXPECT_TRUE(quad_eval(q, Vector::Zero(4)).isZero(0.0));
}

TEST(QuadEval, DimensionMismatchAndSymmetry) {
    const QuadraticFormd plane({Matrix::Identity(2, 2)});
    EXPECT_THROW(quad_eval(plane, scalar(1)), ParameterError);
    Matrix b(2, 2);
    b << 0, 2, 0, 0;
    EXPECT_THROW(QuadraticFormd({b}), ParameterError);
}

TEST(QuadEval, TemplatedOnScalar) {
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> b(2, 2);
    b << 2, 1, 1, 3;
    const QuadraticForm<long double> q({b});
    Eigen::Matrix<long double, Eigen::Dynamic, 1> x(2);
    x << 1, -1;
    EXPECT_EQ(quad_eval(q, x)[0], 3.0L);
}

TEST(ResidualQ, Examples) {
    EXPECT_DOUBLE_EQ(residual_q(scalar_map(sq, "x^2"), scalar(1), scalar(2))[0], 0.0);
    EXPECT_DOUBLE_EQ(residual_q(scalar_map(sq_plus5, "x^2+5"), scalar(0.7), scalar(-2.5))[0], -10.0);
    EXPECT_DOUBLE_EQ(residual_q(scalar_map(cube, "x^3"), scalar(1), scalar(1))[0], 4.0);
    EXPECT_THROW(residual_q(scalar_map(sq, "x^2"), Vector::Zero(2), scalar(1)), ParameterError);
}

TEST(ResidualGq, Examples) {
    const auto third = EquationParams::from_fraction(1, 3);
    EXPECT_NEAR(residual_gq(scalar_map(sq, "x^2"), third, scalar(3), scalar(0))[0], 0.0, 1e-15);
    EXPECT_NEAR(residual_gq(scalar_map(ident, "x"), third, scalar(1), scalar(0))[0], 2.0 / 9.0, 1e-15);
}

TEST(ResidualGq, ConstantShiftMatchesExactRationalOracle) {
    // f(x) = x^2 + 5, r = 1/3, x = 3, y = 0 evaluated in exact arithmetic.
    const Rat r(1, 3), s(2, 3), x(3), y(0), c(5);
    auto f = [&](Rat t) { return t * t + c; };
    const Rat exact = f(r * x + s * y) + r * s * f(x - y) - r * f(x) - s * f(y);
    EXPECT_EQ(exact.n, 10);
    EXPECT_EQ(exact.d, 9);
    // closed form c * rs
    const Rat closed = c * r * s;
    EXPECT_EQ(closed.n, exact.n);
    EXPECT_EQ(closed.d, exact.d);

    const double got =
        residual_gq(scalar_map(sq_plus5, "x^2+5"), EquationParams::from_fraction(1, 3), scalar(3), scalar(0))[0];
    EXPECT_NEAR(got, exact.value(), 1e-14);
}

TEST(ResidualProperties, QuadraticFormsSolveBothEquations) {
    const Sampler sampler{21, 500, 5.0, BallMode{}};
    for (const char* r_text : {"1/2", "1/3", "-1", "2/3", "5/7"}) {
        const auto params = EquationParams::parse(r_text);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto q = random_quadratic(3, 2, seed);
            const auto f = as_map(q);
            for (const auto& [x, y] : sample_pairs_restricted(SpaceSpec::euclidean(3), 0.0, sampler)) {
                const double scale = residual_scale(SpaceSpec::euclidean(3), x, y);
                ASSERT_LE(codomain_norm(residual_q(f, x, y)), 1e-9 * scale);
                ASSERT_LE(codomain_norm(residual_gq(f, params, x, y)), 1e-9 * scale) << r_text;
            }
        }
    }
}

TEST(ResidualProperties, ConstantShiftClosedForms) {
    const auto params = EquationParams::from_fraction(1, 3);
    for (const double c : {0.05, -3.0, 12.5}) {
        const auto f = make_perturbed(random_quadratic(2, 1, 4), noise::Constant{c});
        for (const auto& [x, y] : sample_pairs_restricted(kPlane, 0.0, Sampler{8, 300, 2.0, BallMode{}})) {
            ASSERT_NEAR(residual_q(f, x, y)[0], -2.0 * c, 1e-12 * (1.0 + std::abs(c)) * residual_scale(kPlane, x, y));
            ASSERT_NEAR(residual_gq(f, params, x, y)[0], params.rs() * c,
                        1e-12 * (1.0 + std::abs(c)) * residual_scale(kPlane, x, y));
        }
    }
}

TEST(ResidualProperties, OddAdditiveWitnessLaw) {
    Matrix l(2, 2);
    l << 1.5, -2, 0.25, 3;
    const auto f = make_odd_witness(l);
    for (const char* r_text : {"1/2", "1/4", "-3/8"}) {
        const auto params = EquationParams::parse(r_text);
        ASSERT_TRUE(params.dyadic());
        for (const auto& x : sample_vectors(kPlane, Sampler{2, 300, 4.0, BallMode{}})) {
            const Vector got = residual_gq(f, params, x, Vector::Zero(2));
            const Vector want = params.rs() * (l * x);
            ASSERT_LE(codomain_norm(got - want), 1e-12 * (1.0 + codomain_norm(want)));
        }
    }
}

TEST(ParityDecompose, Examples) {
    const auto parts = parity_decompose(scalar_map(sq_plus_x, "x^2+x"));
    for (const double x : {-2.5, -1.0, 0.0, 0.5, 3.0}) {
        EXPECT_DOUBLE_EQ(parts.even(scalar(x))[0], x * x);
        EXPECT_DOUBLE_EQ(parts.odd(scalar(x))[0], x);
    }
    const auto even_parts = parity_decompose(scalar_map(sq, "x^2"));
    const auto odd_parts = parity_decompose(scalar_map(cube, "x^3"));
    for (const double x : {-1.7, 0.3, 2.0}) {
        EXPECT_EQ(even_parts.odd(scalar(x))[0], 0.0);
        EXPECT_EQ(odd_parts.even(scalar(x))[0], 0.0);
        EXPECT_EQ(odd_parts.odd(scalar(x))[0], cube(x));
    }
}

TEST(ParityDecompose, SplitIsExactOnSamples) {
    const auto f = make_perturbed(random_quadratic(2, 2, 3), noise::Sine{0.7, Vector::Ones(2)});
    const auto parts = parity_decompose(f);
    for (const auto& x : sample_vectors(kPlane, Sampler{4, 500, 3.0, BallMode{}})) {
        ASSERT_EQ(parts.even(x), parts.even(-x));
        ASSERT_EQ(parts.odd(x), -parts.odd(-x));
        const Vector sum = parts.even(x) + parts.odd(x);
        ASSERT_LE(codomain_norm(sum - f(x)), 4 * std::numeric_limits<double>::epsilon() * (1.0 + codomain_norm(f(x))));
    }
}

TEST(Polarize, Examples) {
    const auto f = scalar_map(sq, "x^2");
    EXPECT_DOUBLE_EQ(polarize(f, scalar(1), scalar(2))[0], 2.0);
    EXPECT_DOUBLE_EQ(polarize(f, scalar(1), scalar(1))[0], 1.0);
    Matrix b = Matrix::Zero(2, 2);
    b.diagonal() << 2, 3;
    const auto g = as_map(QuadraticFormd({b}));
    EXPECT_DOUBLE_EQ(polarize(g, Vector::Unit(2, 0), Vector::Unit(2, 1))[0], 0.0);
}

TEST(Polarize, RecoversBilinearFormSymmetricAndAdditive) {
    const auto q = random_quadratic(3, 2, 99);
    const auto f = as_map(q);
    const auto xs = sample_vectors(SpaceSpec::euclidean(3), Sampler{6, 300, 2.0, BallMode{}});
    for (std::size_t i = 0; i + 2 < xs.size(); i += 3) {
        const Vector &x = xs[i], &y = xs[i + 1], &z = xs[i + 2];
        const double scale = 1.0 + x.squaredNorm() + y.squaredNorm() + z.squaredNorm();
        ASSERT_LE(codomain_norm(polarize(f, x, y) - q.bilinear(x, y)), 1e-12 * scale);
        ASSERT_LE(codomain_norm(polarize(f, x, y) - polarize(f, y, x)), 1e-10 * scale);
        ASSERT_LE(codomain_norm(polarize(f, x + z, y) - polarize(f, x, y) - polarize(f, z, y)), 1e-10 * scale);
    }
}

TEST(DerivationChain, Examples) {
    const auto third = EquationParams::from_fraction(1, 3);
    const auto sq_parts = parity_decompose(scalar_map(sq, "x^2"));
    const auto at_3 = chain_defects(sq_parts, third, scalar(3), scalar(0));
    EXPECT_EQ(at_3.doubling, 0.0);  // f(6) - 4 f(3)
    const auto at_11 = chain_defects(sq_parts, third, scalar(1), scalar(1));
    EXPECT_EQ(at_11.even_expansion, 0.0);  // 9 + 2 + 1 - 8 - 4

    const auto id_parts = parity_decompose(scalar_map(ident, "x"));
    const auto lin = chain_defects(id_parts, third, scalar(1), scalar(1));
    EXPECT_NEAR(lin.rx_scaling, 2.0 / 9.0, 1e-15);
}

TEST(DerivationChain, SampledMaxima) {
    const auto third = EquationParams::from_fraction(1, 3);
    const Sampler sampler{10, 400, 2.0, BallMode{}};
    const auto q = derivation_chain_check(as_map(random_quadratic(2, 1, 8)), third, kPlane, sampler);
    EXPECT_EQ(q.rx_scaling, 0.0);
    EXPECT_EQ(q.sy_scaling, 0.0);
    EXPECT_LE(q.doubling, 1e-12);
    EXPECT_LE(q.even_expansion, 1e-12);

    // odd additive: (a) equals |r^2 - r| ||f(x)|| pointwise
    Matrix l(1, 2);
    l << 1.0, -0.5;
    const auto parts = parity_decompose(make_odd_witness(l));
    for (const auto& [x, y] : sample_pairs_restricted(kPlane, 0.0, sampler)) {
        const auto d = chain_defects(parts, third, x, y);
        const double expect = std::abs(third.r() * third.r() - third.r()) * std::abs((l * x)[0]);
        ASSERT_NEAR(d.rx_scaling, expect, 1e-14);
        ASSERT_LE(d.doubling, 0.0);
    }
}

TEST(MapHandle, TabulatedLookups) {
    const auto t = MapHandle::tabulated({{scalar(1), scalar(2)}, {scalar(2), scalar(8)}}, "table");
    EXPECT_FALSE(t.callable());
    EXPECT_EQ(t(scalar(2))[0], 8.0);
    EXPECT_THROW(t(scalar(3)), ParameterError);
}
