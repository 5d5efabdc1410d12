#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "twistor/quotient.hpp"
#include "twistor/scenario.hpp"

using namespace twistor;

namespace {

// Unit-quaternion groups: q^2 = 1 forces q = +-1, and -1 is central.
int classesByQuaternionAlgebra(const FiniteQuaternionGroup& g) {
    int n = 1;
    for (const auto& q : g.elements)
        if (boost::math::abs(q + Quat(1.0)) < 1e-9) ++n;
    return n;
}

Json loadFixture(const std::string& name) {
    std::ifstream f(std::string(TWISTOR_FIXTURES_DIR) + "/" + name);
    return Json::parse(f);
}

} // namespace

TEST(Quotient, NamedGroupsHaveTheirOrders) {
    EXPECT_EQ(cyclicGroup(5).order(), 5);
    EXPECT_EQ(quaternionGroupQ8().order(), 8);
    EXPECT_EQ(binaryDihedral(3).order(), 12);
    EXPECT_EQ(binaryTetrahedral().order(), 24);
    EXPECT_EQ(namedGroup("BD16").order(), 16);
    EXPECT_THROW(namedGroup("BD10"), ParseError);
    EXPECT_THROW(namedGroup("A5"), ParseError);
}

TEST(Quotient, CensusMatchesQuaternionAlgebra) {
    for (const std::string name : {"Z2", "Z3", "Z5", "Z12", "Q8", "BD12", "BD16", "2T"}) {
        auto g = namedGroup(name);
        auto c = censusInvolutions(g);
        const int expected = classesByQuaternionAlgebra(g);
        EXPECT_EQ(static_cast<int>(c.conjugacyClasses.size()), expected) << name;
        EXPECT_EQ(static_cast<int>(c.involutions.size()), expected) << name;
        EXPECT_EQ(componentCount(g).count, expected) << name;
        EXPECT_FALSE(componentCount(g).lowerBound);
        EXPECT_EQ(properQuotientPredicate(g), expected == 1) << name;
    }
    EXPECT_TRUE(componentCount(quaternionGroupQ8(), ActionType::Other).lowerBound);
}

TEST(Quotient, CensusOfAnAbstractTable) {
    // Klein four-group: every element is an involution, every class a singleton
    auto k4 = groupFromTable({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
    auto c = censusInvolutions(k4);
    EXPECT_EQ(c.involutions.size(), 4u);
    EXPECT_EQ(c.conjugacyClasses.size(), 4u);
}

TEST(Quotient, CensusIsConjugationInvariant) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> nd;
    for (const std::string name : {"Q8", "BD12", "2T"}) {
        auto g = namedGroup(name);
        for (int trial = 0; trial < 3; ++trial) {
            Quat h(nd(rng), nd(rng), nd(rng), nd(rng));
            h /= boost::math::abs(h);
            auto gh = conjugated(g, h);
            EXPECT_EQ(censusInvolutions(gh).conjugacyClasses.size(), censusInvolutions(g).conjugacyClasses.size());
        }
    }
}

TEST(Quotient, GroupAxiomFailuresCarryAWitness) {
    // a Latin square with identity 0 and self-inverse elements: a loop of
    // order 5, which cannot be associative
    std::vector<std::vector<int>> loop{{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
    try {
        groupFromTable(loop);
        FAIL() << "expected GroupAxiomError";
    } catch (const GroupAxiomError& e) {
        const int a = e.witness[0], b = e.witness[1], c = e.witness[2];
        auto m = [&](int x, int y) { return loop[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; };
        EXPECT_NE(m(m(a, b), c), m(a, m(b, c)));
    }
    EXPECT_THROW(groupFromQuaternions({Quat(1.0), Quat(0.0, 1.0)}), GroupAxiomError);
    EXPECT_THROW(groupFromQuaternions({Quat(1.0), Quat(2.0)}), GroupAxiomError);
    EXPECT_THROW(groupFromTable({{0, 1}, {1, 1}}), GroupAxiomError);
}

TEST(Veronese, SquaringMapIsTwoToOneOntoTheSectionSpace) {
    std::mt19937_64 rng(73);
    std::vector<std::pair<Cq, Cq>> exact{{Cq{}, Cq{}}};
    std::vector<std::pair<Cd, Cd>> approx{{Cd{}, Cd{}}};
    std::normal_distribution<double> nd;
    for (int i = 0; i < 12; ++i) {
        exact.emplace_back(oracle::randomGaussianRational(rng), oracle::randomGaussianRational(rng));
        approx.emplace_back(Cd(nd(rng), nd(rng)), Cd(nd(rng), nd(rng)));
    }
    exact.emplace_back(Cq{}, Cq(Rational(2), Rational(1)));  // a = 0 branch
    for (auto v : {SquaringVariant::Minus, SquaringVariant::Plus}) {
        auto re = veroneseQuotientCheck(exact, v);
        EXPECT_TRUE(re.pass());
        EXPECT_EQ(re.samples, 14);
        EXPECT_EQ(re.nonzeroSamples, 13);
        EXPECT_TRUE(veroneseQuotientCheck(approx, v).pass());
    }
    auto pre = squaringPreimages(QuadricParams<double>::fromFlat(
                                     squaringSection(Cd(1, 2), Cd(-0.5, 0.25), SquaringVariant::Minus).flat()),
                                 SquaringVariant::Minus);
    ASSERT_EQ(pre.size(), 2u);
    EXPECT_LT(abs(pre[0].first + pre[1].first), 1e-12);
}

TEST(Scenario, ParseErrors) {
    EXPECT_THROW(parseScenario(Json{{"model", "quadric"}, {"tasks", {"frobnicate"}}}), ParseError);
    EXPECT_THROW(parseScenario(Json{{"model", "quadric"}, {"tasks", {"classify"}}}), ParseError);
    EXPECT_THROW(parseScenario(Json{{"seed", 1}, {"tasks", {"classify"}}}), ParseError);
    EXPECT_THROW(parseScenario(Json{{"model", "quadric"}}), ParseError);
    EXPECT_NO_THROW(parseScenario(Json{{"tasks", Json::array({{{"op", "quotient-census"}, {"group", "Q8"}}})}}));
}

TEST(Scenario, FixturesPassTheirExpectations) {
    for (const auto& entry : std::filesystem::directory_iterator(TWISTOR_FIXTURES_DIR)) {
        auto rep = runScenario(parseScenario(loadFixture(entry.path().filename().string())));
        EXPECT_FALSE(rep.anyFailed()) << entry.path() << "\n" << rep.summary();
        EXPECT_FALSE(rep.tasks.empty());
    }
}

TEST(Scenario, ReportsAreDeterministic) {
    for (const std::string name : {"deformed-antireal.json", "quadric-full.json"}) {
        auto s = parseScenario(loadFixture(name));
        EXPECT_EQ(runScenario(s).toJson().dump(), runScenario(s).toJson().dump()) << name;
    }
}

TEST(Scenario, FailedChecksAndErrorsMapToExitCodes) {
    auto dir = std::filesystem::temp_directory_path() / "twistor_scenario_test";
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const Json& j) {
        std::ofstream(dir / name) << j.dump();
        return (dir / name).string();
    };
    std::ostringstream out, err;
    // an off-fiber target is a domain failure, not an input error
    auto offFiber = write("off.json", Json{{"model", "quadric"},
                                           {"seed", 1},
                                           {"tasks", Json::array({{{"op", "solve-fiber"},
                                                                   {"zeta", Json::array({0, 0})},
                                                                   {"point", Json::array({1, 1, 0})}}})}});
    EXPECT_EQ(runScenarioFile(offFiber, "", out, err), 1);
    auto wrongExpect = write("expect.json", Json{{"tasks", Json::array({{{"op", "quotient-census"},
                                                                          {"group", "Z3"},
                                                                          {"expect", {{"componentCount", 2}}}}})}});
    EXPECT_EQ(runScenarioFile(wrongExpect, "", out, err), 1);
    // x0 conj(x2) = 1 but z0^2 = 0: not a real section
    auto nonMember = write("nonmember.json", Json{{"model", "quadric"},
                                                  {"exact", true},
                                                  {"tasks", Json::array({{{"op", "normal-bundle"},
                                                                          {"section", Json::array({1, 2, 1, 0, 0})}}})}});
    EXPECT_EQ(runScenarioFile(nonMember, "", out, err), 1);
    EXPECT_EQ(runScenarioFile(write("bad.json", Json{{"model", "quadric"}, {"tasks", {"frobnicate"}}}), "", out, err), 2);
    EXPECT_EQ(runScenarioFile((dir / "missing.json").string(), "", out, err), 2);
    const auto report = (dir / "report.json").string();
    EXPECT_EQ(runScenarioFile(std::string(TWISTOR_FIXTURES_DIR) + "/quotient-Q8.json", report, out, err), 0);
    std::ifstream f(report);
    auto j = Json::parse(f);
    EXPECT_EQ(j["toolkit"], kToolkitVersion);
    EXPECT_EQ(j["tasks"][0]["numbers"]["componentCount"], 2);
    std::filesystem::remove_all(dir);
}
