#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "twistor/model.hpp"
#include "twistor/model_io.hpp"

using namespace twistor;

namespace {

CoeffPoly<Rational> antirealLambda() {
    return CoeffPoly<Rational>(2, {Cq(Rational(0), Rational(1)), Cq{}, Cq(Rational(0), Rational(-1))});
}

std::vector<double> randomPoint(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = nd(rng);
    return x;
}

// F(zeta, s(zeta)) evaluated directly on the embedded section.
Cd fiberValue(const TwistorModel& m, const std::vector<double>& params, Cd zeta) {
    auto sec = m.basis().embed(params);
    std::vector<Cd> u;
    for (const auto& s : sec) u.push_back(s.eval(zeta));
    return m.equations[0].eval(P1Point::standard(zeta), u);
}

} // namespace

TEST(QuadricModel, RealEquationsMatchHandWrittenForm) {
    auto sys = realSectionSystem(buildQuadric());
    EXPECT_EQ(sys.nvars(), 9);
    EXPECT_EQ(sys.size(), 7);
    EXPECT_TRUE(oracle::sameUpToSign(sys.equations(), oracle::quadricEquations()));
}

TEST(QuadricModel, ValidatesWithTwoDimensionalFibers) {
    auto rep = validateModel(buildQuadric(), 3);
    EXPECT_TRUE(rep.ok);
    ASSERT_TRUE(rep.fiberDimension);
    EXPECT_EQ(*rep.fiberDimension, 2);
    EXPECT_TRUE(rep.notes.empty());
}

TEST(QuadricModel, SquaringSectionsAreRealSections) {
    std::mt19937_64 rng(17);
    auto m = buildQuadric();
    auto sys = realSectionSystem(m);
    for (int trial = 0; trial < 10; ++trial)
        for (auto v : {SquaringVariant::Minus, SquaringVariant::Plus}) {
            auto p = squaringSection(oracle::randomGaussianRational(rng), oracle::randomGaussianRational(rng), v).flat();
            for (const auto& r : sys.residuals(p)) EXPECT_EQ(r, Rational(0));
            // direct evaluation of xy - z^2 along the section
            std::vector<double> pd;
            for (const auto& q : p) pd.push_back(toDouble(q));
            for (double t : {-1.3, 0.2, 2.5})
                EXPECT_LT(abs(fiberValue(m, pd, Cd(t, 0.7 * t))), 1e-9 * (1 + t * t) * (1 + t * t));
        }
}

TEST(DeformedModel, ConstantsShiftByLambdaSquared) {
    auto sys = realSectionSystem(buildDeformed(antirealLambda(), RealityType::TauAntireal));
    ASSERT_EQ(sys.size(), 5);
    // lambda^2 = -1 + 2 zeta^2 - zeta^4 shifts c0 by +1 and c2 by -2
    auto ref = oracle::quadricEquations();
    const MPoly<Rational> one = MPoly<Rational>::constant(9, Cq(Rational(1)));
    std::vector<MPoly<Rational>> expected{ref[0] + one, ref[1], ref[2], ref[3], ref[4] - Cq(Rational(2)) * one};
    EXPECT_TRUE(oracle::sameUpToSign(sys.equations(), expected));
}

TEST(DeformedModel, KnownRealSectionsSolveTheFiberEquation) {
    auto m = buildDeformed(antirealLambda(), RealityType::TauAntireal);
    auto sys = realSectionSystem(m);
    for (double th : {0.0, 0.4, 1.1, 2.0}) {
        // x1 = 0, x2 = -x0, r = 0, z0 real, |x0|^2 + z0^2 = 1
        const double x0r = std::cos(th) * 0.6, x0i = std::cos(th) * 0.8, z0 = std::sin(th);
        std::vector<double> p{x0r, x0i, 0, 0, -x0r, -x0i, z0, 0, 0};
        EXPECT_LT(sys.residuals(p).norm(), 1e-12);
        for (double t : {-0.7, 0.3, 1.9}) EXPECT_LT(abs(fiberValue(m, p, Cd(t, -t))), 1e-10);
    }
}

TEST(DeformedModel, RejectsLambdaOfTheWrongReality) {
    EXPECT_THROW(buildDeformed(antirealLambda(), RealityType::TauReal), RealityError);
    EXPECT_THROW(buildDeformed(CoeffPoly<Rational>(2), RealityType::TauReal), RealityError);
    EXPECT_THROW(buildDeformed(CoeffPoly<Rational>(1), RealityType::TauReal), DegreeError);
    auto real = CoeffPoly<Rational>(2, {Cq{}, Cq(Rational(1)), Cq{}});  // lambda = zeta
    EXPECT_NO_THROW(buildDeformed(real, RealityType::TauReal));
    EXPECT_TRUE(validateModel(buildDeformed(antirealLambda(), RealityType::TauAntireal)).ok);
}

TEST(Validation, ReportsEachFailureKind) {
    auto broken = buildQuadric();
    broken.equations[0].addTerm({0, 0, 0}, CoeffPoly<Rational>(4, {Cq(Rational(1)), Cq{}, Cq{}, Cq{}, Cq{}}));
    auto rep = validateModel(broken);
    ASSERT_FALSE(rep.ok);
    EXPECT_EQ(rep.failures[0].kind, "RealityError");

    auto twisted = buildQuadric();
    twisted.equations[0].addTerm({0, 0, 0}, CoeffPoly<Rational>(3, {Cq(Rational(1)), Cq{}, Cq{}, Cq{}}));
    rep = validateModel(twisted);
    ASSERT_FALSE(rep.ok);
    EXPECT_EQ(rep.failures[0].kind, "DegreeError");

    auto odd = buildSmoothO11();
    odd.sigmaRules = {{0, 1, 1}, {1, 1, 1}};
    rep = validateModel(odd);
    ASSERT_FALSE(rep.ok);
    EXPECT_EQ(rep.failures[0].kind, "NonInvolutiveError");

    auto swapped = buildQuadric();
    swapped.sigmaRules[2].sign = 1;
    rep = validateModel(swapped);
    EXPECT_FALSE(rep.notes.empty());
}

TEST(ConeGlue, SlTwoConeGivesTheQuadric) {
    ConePolynomial xy{{{1, 1, 0}, Cq(Rational(1))}, {{0, 0, 2}, Cq(Rational(-1))}};
    auto m = glueConeTwistor({xy}, {1, 1, 1}, 2, {{1, 1, 0}, {0, 1, 0}, {2, -1, 0}});
    EXPECT_TRUE(sameStructure(m, buildQuadric()));
    EXPECT_TRUE(sameStructure(glueConeTwistor({}, {1, 1}, 1, {{1, -1, 0}, {0, 1, 0}}), buildSmoothO11()));
}

TEST(ConeGlue, RejectsBadWeights) {
    ConePolynomial bad{{{1, 0}, Cq(Rational(1))}, {{0, 2}, Cq(Rational(1))}};
    EXPECT_THROW(glueConeTwistor({bad}, {1, 1}, 1, {{1, -1, 0}, {0, 1, 0}}), WeightError);
    EXPECT_THROW(glueConeTwistor({}, {1, 1}, 3, {{1, -1, 0}, {0, 1, 0}}), WeightError);
    EXPECT_THROW(glueConeTwistor({}, {0, 1}, 1, {{1, -1, 0}, {0, 1, 0}}), WeightError);
    EXPECT_THROW(glueConeTwistor({}, {1, 1}, 1, {{0, 1, 0}, {1, 1, 0}}), NonInvolutiveError);
}

TEST(RealSystem, JacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(23);
    for (const auto& m : {buildQuadric(), buildDeformed(antirealLambda(), RealityType::TauAntireal)}) {
        auto sys = realSectionSystem(m);
        for (int trial = 0; trial < 100; ++trial) {
            auto x = randomPoint(rng, sys.nvars());
            Eigen::MatrixXd J = sys.jacobian(x), F = oracle::finiteDifferenceJacobian(sys, x);
            EXPECT_LT((J - F).norm(), 1e-6 * std::max(1.0, J.norm())) << m.name << " trial " << trial;
        }
    }
}

TEST(RealSystem, ExactAndDoubleResidualsAgree) {
    std::mt19937_64 rng(29);
    auto sys = realSectionSystem(buildQuadric());
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Rational> q;
        std::vector<double> d;
        for (int i = 0; i < 9; ++i) {
            q.push_back(oracle::randomRational(rng));
            d.push_back(toDouble(q.back()));
        }
        auto exact = sys.residuals(q);
        auto approx = sys.residuals(d);
        for (int k = 0; k < sys.size(); ++k) EXPECT_NEAR(toDouble(exact[static_cast<std::size_t>(k)]), approx(k), 1e-9);
    }
    EXPECT_THROW(sys.residuals(std::vector<double>(8)), DimensionError);
}

TEST(ModelIo, RoundTripPreservesStructure) {
    for (const auto& m : {buildQuadric(), buildSmoothO11(), buildDeformed(antirealLambda(), RealityType::TauAntireal)}) {
        auto back = modelFromJson(Json::parse(modelToJson(m).dump()));
        EXPECT_TRUE(sameStructure(m, back)) << m.name;
        EXPECT_EQ(back.componentEquations, m.componentEquations) << m.name;
        EXPECT_EQ(back.coordNames, m.coordNames);
    }
}

TEST(ModelIo, DescriptorsAndMalformedInput) {
    EXPECT_TRUE(sameStructure(modelFromDescriptor("quadric"), buildQuadric()));
    EXPECT_TRUE(sameStructure(modelFromDescriptor(Json{{"builtin", "O11"}}), buildSmoothO11()));
    Json d{{"builtin", "deformed"}, {"lambda", Json::array({0, 1, 0})}, {"reality", "tau-real"}};
    EXPECT_NO_THROW(modelFromDescriptor(d));
    d["reality"] = "tau-antireal";
    EXPECT_THROW(modelFromDescriptor(d), RealityError);
    EXPECT_THROW(modelFromDescriptor("cubic"), ParseError);
    EXPECT_THROW(modelFromJson(Json{{"degrees", {1}}}), ParseError);
    auto j = modelToJson(buildQuadric());
    j["equations"][0]["terms"][0]["zeta"] = Json::array({1, 2, 3});
    EXPECT_THROW(modelFromJson(j), DegreeError);
}
