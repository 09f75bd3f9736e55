#include <gtest/gtest.h>

#include <cmath>

#include "qstab/geometry.hpp"

using namespace qstab;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

const Vector kE1 = v2(1, 0);
const Vector kE2 = v2(0, 1);

// Witness arithmetic oracle: the defect of (p,q,u,v) at y = x, ||x|| = t
// in an inner-product space is t^2 - r t^u - s t^v.
double diagonal_witness(double r, double u, double v, double t) {
    return t * t - r * std::pow(t, u) - (1.0 - r) * std::pow(t, v);
}

}  // namespace

TEST(ParallelogramDefect, Examples) {
    EXPECT_NEAR(parallelogram_defect(SpaceSpec::euclidean(2), kE1, kE2), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(parallelogram_defect(SpaceSpec::p_norm(2, 1.0), kE1, kE2), 4.0);
    EXPECT_DOUBLE_EQ(parallelogram_defect(SpaceSpec::sup_norm(2), kE1, kE2), -2.0);
    EXPECT_THROW(parallelogram_defect(SpaceSpec::euclidean(2), kE1, Vector::Zero(3)), ParameterError);
}

TEST(GqNormDefect, Examples) {
    const auto plane = SpaceSpec::euclidean(2);
    const auto half = EquationParams::from_fraction(1, 2);
    EXPECT_NEAR(gq_norm_defect(plane, half, Exponents::make(2, 2, 2, 2), kE1, kE2), 0.0, 1e-15);
    // sqrt(0.5) + 0.25 * 2 - 0.5 - 0.5
    EXPECT_NEAR(gq_norm_defect(plane, half, Exponents::make(1, 2, 2, 2), kE1, kE2), std::sqrt(0.5) - 0.5, 1e-15);
    EXPECT_NEAR(gq_norm_defect(plane, half, Exponents::make(1, 2, 2, 2), kE1, kE2), 0.20711, 1e-5);
    EXPECT_DOUBLE_EQ(gq_norm_defect(plane, half, Exponents::make(2, 2, 1, 2), 2.0 * kE1, Vector::Zero(2)), 1.0);
}

TEST(GqNormDefect, UndefinedForZeroToNegativePower) {
    const auto plane = SpaceSpec::euclidean(2);
    EXPECT_THROW(gq_norm_defect(plane, EquationParams::from_fraction(1, 2), Exponents::make(2, 2, 2, -1), kE1,
                                Vector::Zero(2)),
                 UndefinedValueError);
    EXPECT_THROW(Exponents::make(2, 0, 2, 2), ParameterError);
}

TEST(DetectInnerProduct, EuclideanIsAcceptedWithIdentityGram) {
    const auto v = detect_inner_product(SpaceSpec::euclidean(3), Sampler{1, 2000, 1.0, BallMode{}}, 1e-10);
    ASSERT_TRUE(v.accepted);
    ASSERT_TRUE(v.recovered_gram.has_value());
    EXPECT_LE((*v.recovered_gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(*v.bilinearity_defect, 1e-12);
}

TEST(DetectInnerProduct, WeightedQuadraticRecoversGram) {
    Matrix a(3, 3);
    a << 4, 1, 0.5, 1, 3, -0.25, 0.5, -0.25, 2;
    const auto v = detect_inner_product(SpaceSpec::weighted_quadratic(a), Sampler{2, 10000, 2.0, BallMode{}}, 1e-10);
    ASSERT_TRUE(v.accepted);
    EXPECT_LE((*v.recovered_gram - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(v.max_normalized_defect, 1e-10);
    EXPECT_LE(*v.bilinearity_defect, 1e-9);
}

TEST(DetectInnerProduct, PNormsAreRejectedAtBasisWitnesses) {
    for (const auto& space : {SpaceSpec::p_norm(2, 1.0), SpaceSpec::p_norm(2, 3.0), SpaceSpec::sup_norm(2),
                              SpaceSpec::p_norm(3, 1.0)}) {
        const auto v = detect_inner_product(space, Sampler{3, 500, 1.0, BallMode{}}, 1e-10);
        EXPECT_FALSE(v.accepted) << space.describe();
        EXPECT_FALSE(v.recovered_gram.has_value());
        EXPECT_GE(std::abs(parallelogram_defect(space, Vector::Unit(space.dim(), 0), Vector::Unit(space.dim(), 1))),
                  0.5);
        EXPECT_GE(v.max_parallelogram_defect, 0.5) << space.describe();
    }
    const auto l1 = detect_inner_product(SpaceSpec::p_norm(2, 1.0), Sampler{3, 500, 1.0, BallMode{}}, 1e-10);
    EXPECT_GE(l1.max_parallelogram_defect, 4.0);
}

TEST(ExponentScan, OnlyTheSquareTupleVanishesOnTheEuclideanPlane) {
    const auto plane = SpaceSpec::euclidean(2);
    const auto table =
        exponent_scan(plane, EquationParams::from_fraction(1, 3), default_exponent_grid(), Sampler{4, 500, 1.0, BallMode{}}, 1e-9);
    ASSERT_EQ(table.size(), 81u);
    int flagged = 0;
    for (const auto& row : table) {
        if (row.flagged) {
            ++flagged;
            EXPECT_EQ(row.exps, Exponents::make(2, 2, 2, 2));
            EXPECT_LE(row.sup_defect, 1e-9);
        }
    }
    EXPECT_EQ(flagged, 1);
}

TEST(ExponentScan, WitnessExamples) {
    const auto plane = SpaceSpec::euclidean(2);
    const auto half = EquationParams::from_fraction(1, 2);
    const Sampler sampler{4, 50, 1.0, BallMode{}};
    const auto t1 = exponent_scan(plane, half, {Exponents::make(2, 2, 1, 2)}, sampler, 1e-9);
    EXPECT_GE(t1[0].sup_defect, 1.0);
    const auto t2 = exponent_scan(plane, half, {Exponents::make(2, 2, 3, 3)}, sampler, 1e-9);
    EXPECT_GE(t2[0].sup_defect, std::abs(diagonal_witness(0.5, 3, 3, 2.0)));
    EXPECT_DOUBLE_EQ(std::abs(diagonal_witness(0.5, 3, 3, 2.0)), 4.0);
}

TEST(ExponentScan, NegativeExponentsExcludeZeroWitnesses) {
    const auto plane = SpaceSpec::euclidean(2);
    const auto table = exponent_scan(plane, EquationParams::from_fraction(1, 2), {Exponents::make(2, -2, 2, 2)},
                                     Sampler{4, 50, 1.0, BallMode{}}, 1e-9);
    EXPECT_GT(table[0].excluded, 0);
    EXPECT_GT(table[0].evaluated, 0);
    EXPECT_FALSE(table[0].flagged);
    EXPECT_THROW(exponent_scan(plane, EquationParams::from_fraction(1, 2), {}, Sampler{4, 50, 1.0, BallMode{}}, 1e-9),
                 ParameterError);
}

TEST(GeometryProperties, AcceptedSpacesSatisfyTheSquareIdentityForAllR) {
    Matrix a(2, 2);
    a << 2, 0.3, 0.3, 1;
    for (const auto& space : {SpaceSpec::euclidean(2), SpaceSpec::weighted_quadratic(a)}) {
        const Sampler sampler{9, 1000, 2.0, BallMode{}};
        ASSERT_TRUE(detect_inner_product(space, sampler, 1e-10).accepted);
        for (const char* r_text : {"1/2", "1/3", "0.9", "0.05"}) {
            const auto params = EquationParams::parse(r_text);
            for (const auto& [x, y] : sample_pairs_restricted(space, 0.0, sampler)) {
                const double d = gq_norm_defect(space, params, Exponents::make(2, 2, 2, 2), x, y);
                ASSERT_LE(std::abs(d), 1e-10 * residual_scale(space, x, y));
            }
        }
    }
}

TEST(GeometryProperties, DiagonalWitnessSeparatesUnequalOuterExponents) {
    const auto plane = SpaceSpec::euclidean(2);
    for (const double u : {1.0, 2.0, 3.0}) {
        for (const double v : {1.0, 2.0, 3.0}) {
            if (u == v) continue;
            const auto params = EquationParams::from_fraction(1, 3);
            bool nonzero = false;
            for (const double t : {0.5, 2.0}) {
                const Vector x = t * kE1;
                const double got = gq_norm_defect(plane, params, Exponents::make(2, 2, u, v), x, x);
                EXPECT_NEAR(got, diagonal_witness(params.r(), u, v, t), 1e-14);
                nonzero = nonzero || std::abs(got) > 1e-3;
            }
            EXPECT_TRUE(nonzero) << u << "," << v;
        }
    }
}
