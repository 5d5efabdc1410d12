#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "twistor/linalg.hpp"
#include "twistor/mpoly.hpp"
#include "twistor/p1.hpp"

using namespace twistor;

TEST(Rational, ParsesFractionsDecimalsAndExponents) {
    EXPECT_EQ(parseRational("3/4"), Rational(3, 4));
    EXPECT_EQ(parseRational("-2"), Rational(-2));
    EXPECT_EQ(parseRational("0.125"), Rational(1, 8));
    EXPECT_EQ(parseRational("1.5e2"), Rational(150));
    EXPECT_EQ(parseRational("25e-2"), Rational(1, 4));
    EXPECT_EQ(parseRational("010/03"), Rational(10, 3));  // leading zeros stay decimal
    EXPECT_EQ(formatRational(Rational(-6, 4)), "-3/2");
    EXPECT_THROW(parseRational("1/0"), ParseError);
    EXPECT_THROW(parseRational("abc"), ParseError);
    EXPECT_THROW(parseRational(""), ParseError);
}

TEST(Rational, ExactSquareRoots) {
    EXPECT_EQ(*exactSqrt(Rational(9, 16)), Rational(3, 4));
    EXPECT_FALSE(exactSqrt(Rational(2)));
    EXPECT_FALSE(exactSqrt(Rational(-1)));
    EXPECT_THROW(realSqrt(Rational(3)), ModelError);
}

TEST(P1, AntipodalMapIsAFixedPointFreeInvolution) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 50; ++i) {
        P1Point p = P1Point::standard({nd(rng), nd(rng)});
        P1Point q = antipodal(p);
        EXPECT_GT(chordal(p, q), 0.99);  // antipodal points are at chordal distance 1
        EXPECT_LT(chordal(antipodal(q), p), 1e-12);
    }
    EXPECT_LT(chordal(antipodal(P1Point::standard({0.0})), P1Point::infinity()), 1e-15);
}

TEST(P1, MoebiusPullbackIsContravariant) {
    // pulling back along g then along g^-1 is the identity (up to det^k)
    CoeffPoly<Rational> s(3, {Cq(Rational(1)), Cq(Rational(2), Rational(-1)), Cq(Rational(0), Rational(3)), Cq(Rational(-5))});
    const Cq a(Rational(2)), b(Rational(1), Rational(1)), c(Rational(0), Rational(1)), d(Rational(3));
    auto t = moebiusPullback(moebiusPullback(s, a, b, c, d), d, -b, -c, a);
    const Cq det = a * d - b * c;
    Cq f(Rational(1));
    for (int k = 0; k < 3; ++k) f = f * det;
    for (int j = 0; j <= 3; ++j) EXPECT_EQ(t[j], f * s[j]);
}

TEST(Reality, TauSquaresToMinusOneInOddDegree) {
    std::mt19937_64 rng(5);
    for (int k = 0; k <= 4; ++k)
        for (int sign : {1, -1}) {
            SigmaCoordRule r{0, sign, k};
            CoeffPoly<Rational> s(k);
            for (auto& c : s.coeffs) c = oracle::randomGaussianRational(rng);
            // on a self-pair tau squares to (-1)^k
            CoeffPoly<Rational> expected = s;
            if (k % 2 != 0)
                for (auto& c : expected.coeffs) c = -c;
            EXPECT_EQ(tauPullback(tauPullback(s, r), r), expected) << "k=" << k << " sign=" << sign;
        }
}

TEST(Reality, ParityFailureIsReported) {
    EXPECT_EQ(ruleParityFailure({2, 2, 2}, {{1, 1, 2}, {0, 1, 2}, {2, -1, 2}}), "");
    EXPECT_NE(ruleParityFailure({1}, {{0, 1, 1}}), "");
    EXPECT_NE(ruleParityFailure({2, 2}, {{1, 1, 2}, {1, 1, 2}}), "");
    EXPECT_THROW(realityFixedSpace({1}, {{0, 1, 1}}), NonInvolutiveError);
}

TEST(Reality, FixedSpaceDimensions) {
    EXPECT_EQ(realityFixedSpace({2, 2, 2}, {{1, 1, 2}, {0, 1, 2}, {2, -1, 2}}).paramCount, 9);
    EXPECT_EQ(realityFixedSpace({1, 1}, {{1, -1, 1}, {0, 1, 1}}).paramCount, 4);
    EXPECT_EQ(realityFixedSpace({4}, {{0, 1, 4}}).paramCount, 5);
}

TEST(Reality, EmbeddedSectionsAreTauFixed) {
    std::vector<SigmaCoordRule> rules{{1, 1, 2}, {0, 1, 2}, {2, -1, 2}};
    auto b = realityFixedSpace({2, 2, 2}, rules);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Rational> p;
        for (int i = 0; i < b.paramCount; ++i) p.push_back(oracle::randomRational(rng));
        auto sec = b.embed(p);
        for (std::size_t i = 0; i < rules.size(); ++i)
            EXPECT_EQ(sec[i], tauPullback(sec[static_cast<std::size_t>(rules[i].targetIndex)], rules[i]));
        EXPECT_EQ(b.project(sec), p);
    }
}

TEST(Splitting, H0FromSplitting) {
    SplittingType t({1, 1});
    EXPECT_EQ(h0FromSplitting(t, 0), 4);
    EXPECT_EQ(h0FromSplitting(t, -2), 0);
    EXPECT_EQ(h0FromSplitting(SplittingType({3, -2}), -1), 3);
}

TEST(Splitting, CoprimeRowHasLineBundleKernel) {
    // [p q] : O(s1) + O(s2) -> O(t) with coprime p, q has kernel O(s1 + s2 - t)
    CoeffPoly<Rational> p(2, {Cq(Rational(1)), Cq(Rational(0)), Cq(Rational(1))});  // 1 + z^2
    CoeffPoly<Rational> q(1, {Cq(Rational(0)), Cq(Rational(1))});                   // z
    PolyMatrix<Rational> M{{p, q}};
    EXPECT_EQ(kernelSplitting(M, {0, 1}, {2}), SplittingType({-1}));
}

TEST(Splitting, ZeroMapKeepsTheSource) {
    PolyMatrix<Rational> M{{CoeffPoly<Rational>(1), CoeffPoly<Rational>(0)}};
    EXPECT_EQ(kernelSplitting(M, {2, 3}, {3}), SplittingType({3, 2}));
}

TEST(Splitting, RejectsInconsistentDegrees) {
    CoeffPoly<Rational> p(2, {Cq(Rational(1)), Cq(Rational(0)), Cq(Rational(1))});
    PolyMatrix<Rational> M{{p, p}};
    EXPECT_THROW(kernelSplitting(M, {0, 1}, {2}), DegreeError);
}

TEST(Splitting, AgreesWithBruteForceNullspaces) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> deg(0, 3), rows(1, 2), extra(1, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = rows(rng);
        const int c = r + extra(rng);
        std::vector<int> src(static_cast<std::size_t>(c)), tgt(static_cast<std::size_t>(r));
        for (auto& s : src) s = deg(rng);
        const int top = *std::max_element(src.begin(), src.end());
        for (auto& t : tgt) t = top + deg(rng);
        auto M = oracle::randomPolyMatrix(rng, src, tgt);
        auto split = kernelSplitting(M, src, tgt);
        EXPECT_EQ(split.rank(), c - r);
        for (int m = -4; m <= 4; ++m) {
            const int brute = oracle::kernelDimension(M, src, tgt, m);
            EXPECT_EQ(kernelSectionCount(M, src, tgt, m), brute) << "trial " << trial << " m=" << m;
            EXPECT_EQ(h0FromSplitting(split, m), brute) << "trial " << trial << " m=" << m;
        }
    }
}

TEST(Roots, CompanionMatrixRoots) {
    // (z - 1)(z + 2i)
    auto r = polyRoots({Cd(0, -2), Cd(-1, 2), Cd(1)});
    ASSERT_EQ(r.size(), 2u);
    std::sort(r.begin(), r.end(), [](const Cd& a, const Cd& b) { return a.im < b.im; });
    EXPECT_NEAR(r[0].im, -2.0, 1e-12);
    EXPECT_NEAR(r[1].re, 1.0, 1e-12);
}

TEST(LinearAlgebra, ExactAndNumericRankAgree) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> d(-2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix<Rational> a(4, std::vector<Rational>(5));
        Eigen::MatrixXd e(4, 5);
        for (int j = 0; j < 5; ++j) {
            const int r0 = d(rng), r1 = d(rng);
            // odd trials: rows 2 and 3 are combinations of rows 0 and 1
            const int v[4] = {r0, r1, trial % 2 ? r0 + r1 : d(rng), trial % 2 ? r0 - 2 * r1 : d(rng)};
            for (int i = 0; i < 4; ++i) {
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v[i];
                e(i, j) = v[i];
            }
        }
        EXPECT_EQ(exactRank(a), numericRank(e));
    }
}

TEST(MPoly, DerivativeAndEvaluation) {
    const int n = 2;
    auto x = MPoly<Rational>::variable(n, 0), y = MPoly<Rational>::variable(n, 1);
    auto p = x * x * y - Cq(Rational(3)) * y;
    EXPECT_EQ(p.derivative(0), Cq(Rational(2)) * x * y);
    EXPECT_EQ(p.eval(std::vector<Rational>{Rational(2), Rational(5)}).re, Rational(5));
    EXPECT_EQ(p.totalDegree(), 3);
    EXPECT_THROW(p.eval(std::vector<Rational>{Rational(1)}), DimensionError);
}
