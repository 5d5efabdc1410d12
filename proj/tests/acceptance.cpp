// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// A criterion that exceeds its time budget fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "twistor/analyzer.hpp"
#include "twistor/quotient.hpp"

using namespace twistor;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail << "failed: " << what << "; ";
        ok = ok && cond;
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream budgetNote;
    budgetNote << std::fixed << std::setprecision(2) << secs << "s / " << budget << "s";
    o.require(secs <= budget, "time budget exceeded (" + budgetNote.str() + ")");
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS" : "FAIL") << " [" << std::setw(2) << id << "] " << name << " (" << budgetNote.str()
              << ") " << o.detail.str() << std::endl;
}

TwistorModel deformed() {
    return buildDeformed(CoeffPoly<Rational>(2, {Cq(Rational(0), Rational(1)), Cq{}, Cq(Rational(0), Rational(-1))}),
                         RealityType::TauAntireal);
}

std::vector<double> toDoubles(const std::vector<Rational>& q) {
    std::vector<double> d;
    for (const auto& v : q) d.push_back(toDouble(v));
    return d;
}

std::vector<double> randomRegularSection(std::mt19937_64& rng) {
    const Cq a = oracle::randomGaussianRational(rng), b = oracle::randomGaussianRational(rng);
    auto v = rng() % 2 ? SquaringVariant::Plus : SquaringVariant::Minus;
    if (a.norm2() + b.norm2() == 0) return randomRegularSection(rng);
    return toDoubles(squaringSection(a, b, v).flat());
}

} // namespace

int main() {
    std::cout << std::unitbuf;

    criterion(1, "equation reproduction", 1.0, [](Outcome& o) {
        auto sys = realSectionSystem(buildQuadric());
        o.require(sys.nvars() == 9 && sys.size() == 7, "7 real equations in 9 unknowns");
        o.require(oracle::sameUpToSign(sys.equations(), oracle::quadricEquations()), "exact match with eqs. (1)-(4)");
        o.detail << sys.size() << " equations, " << sys.nvars() << " unknowns, exact match";
    });

    criterion(2, "Veronese consistency", 2.0, [](Outcome& o) {
        std::mt19937_64 rng(101);
        std::vector<std::pair<Cq, Cq>> samples;
        for (int i = 0; i < 100; ++i) samples.emplace_back(oracle::randomGaussianRational(rng), oracle::randomGaussianRational(rng));
        for (auto v : {SquaringVariant::Minus, SquaringVariant::Plus}) {
            auto rep = veroneseQuotientCheck(samples, v);
            o.require(rep.membershipPasses == rep.samples, "exact membership");
            o.require(rep.collapsePasses == rep.samples, "+-(a, b) collapse");
            o.require(rep.pass(), "Veronese report");
            o.detail << (v == SquaringVariant::Minus ? "minus: " : "plus: ") << rep.membershipPasses << "/" << rep.samples
                     << " exact members; ";
        }
    });

    criterion(3, "two-to-one fiber map at zeta = 0", 5.0, [](Outcome& o) {
        auto m = buildQuadric();
        auto sys = realSectionSystem(m);
        const P1Point z0 = P1Point::standard({});
        std::mt19937_64 rng(103);
        int twos = 0;
        for (int i = 0; i < 50; ++i) {
            auto fp = phiEval(m, randomRegularSection(rng), z0);
            if (fiberSolve(m, sys, z0, fp.values).solutions.size() == 2) ++twos;
        }
        o.require(twos == 50, "2 sections at 50 regular points");
        const Cd one(1.0), zero{};
        auto a = fiberSolve(m, sys, z0, {one, one, one}).solutions;
        o.require(a.size() == 2, "2 sections through (1,1,1)");
        for (const auto& s : a) o.require(std::abs(std::abs(s[2]) - 2) < 1e-9 && std::abs(s[3]) < 1e-9 && std::abs(s[8]) < 1e-9,
                                          "x1 = +-2, r = 0");
        auto b = fiberSolve(m, sys, z0, {zero, one, zero}).solutions;
        o.require(b.size() == 2, "2 sections through (0,1,0)");
        for (const auto& s : b) o.require(std::abs(std::abs(s[8]) - 1) < 1e-9, "r = +-1");
        auto c = fiberSolve(m, sys, z0, {zero, zero, zero}).solutions;
        o.require(c.size() == 1, "1 section through (0,0,0)");
        o.detail << twos << "/50 regular points with 2 sections; (1,1,1): " << a.size() << ", (0,1,0): " << b.size()
                 << ", (0,0,0): " << c.size();
    });

    criterion(4, "singular locus is the origin", 5.0, [](Outcome& o) {
        auto sys = realSectionSystem(buildQuadric());
        std::mt19937_64 rng(107);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 200; ++i) pts.push_back(randomRegularSection(rng));
        pts.push_back(std::vector<double>(9, 0.0));
        auto rep = singularScan(sys, pts);
        o.require(rep.nonMembers == 0, "all samples are members");
        o.require(rep.regularRank == 5, "regular rank 5");
        o.require(rep.deficient.size() == 1, "one rank-deficient point");
        if (rep.deficient.size() == 1) {
            o.require(rep.deficient[0].rank == 0, "rank 0 at the deficient point");
            double n = 0;
            for (double v : rep.deficient[0].p) n += v * v;
            o.require(n == 0.0, "deficient point is the origin");
        }
        o.detail << rep.examined << " points, regular rank " << rep.regularRank << ", " << rep.deficient.size()
                 << " deficient";
    });

    criterion(5, "branch locus", 10.0, [](Outcome& o) {
        auto m = buildQuadric();
        auto sys = realSectionSystem(m);
        std::mt19937_64 rng(109);
        std::normal_distribution<double> nd;
        std::vector<P1Point> zetas;
        for (int k = 0; k < 5; ++k) zetas.push_back(P1Point::standard({nd(rng), nd(rng)}).canonical());
        int unbranched = 0, total = 0, originBranched = 0;
        for (int i = 0; i < 100; ++i) {
            auto p = randomRegularSection(rng);
            for (const auto& z : zetas) {
                ++total;
                if (branchTest(m, sys, p, z).verdict == Branching::Unbranched) ++unbranched;
            }
        }
        for (const auto& z : zetas)
            if (branchTest(m, sys, std::vector<double>(9, 0.0), z).verdict == Branching::Branched) ++originBranched;
        o.require(unbranched == total, "regular sections unbranched");
        o.require(originBranched == static_cast<int>(zetas.size()), "origin branched");
        o.detail << unbranched << "/" << total << " regular tests unbranched, origin branched at " << originBranched << "/"
                 << zetas.size() << " zeta";
    });

    criterion(6, "normal bundle O(1)+O(1)", 10.0, [](Outcome& o) {
        auto m = buildQuadric();
        std::mt19937_64 rng(113);
        int good = 0;
        for (int i = 0; i < 100; ++i) {
            const Cq a = oracle::randomGaussianRational(rng), b = oracle::randomGaussianRational(rng);
            if (a.norm2() + b.norm2() == 0) { --i; continue; }
            auto rep = normalSplitting(m, squaringSection(a, b, i % 2 ? SquaringVariant::Plus : SquaringVariant::Minus).flat());
            if (!rep.degenerate && rep.splitting == SplittingType({1, 1}) && rep.h0 == 4 && rep.h0Minus2 == 0) ++good;
        }
        o.require(good == 100, "splitting {1,1}, h0 = 4, h0(-2) = 0");
        o.detail << good << "/100 sections split as O(1)+O(1) (exact)";
    });

    criterion(7, "classification dichotomy", 20.0, [](Outcome& o) {
        auto q = classifyHC(buildQuadric());
        o.require(q.verdict == HCVerdict::Hypercomplex, "quadric is hypercomplex");
        auto dm = deformed();
        auto d = classifyHC(dm);
        o.require(d.verdict == HCVerdict::WeaklyHypercomplex, "deformed is weakly hypercomplex");
        o.require(d.familyDimension && *d.familyDimension == 2, "family dimension 2");
        int certified = 0;
        for (const auto& f : d.families) {
            if (!f.certified) continue;
            ++certified;
            for (const auto* x : {&f.member, &f.continuedMember}) {
                const auto& p = *x;
                o.require(std::abs(p[0] * p[0] + p[1] * p[1] + p[6] * p[6] - 1) < 1e-6 && std::abs(p[7]) < 1e-6,
                          "member on the sphere |x0|^2 + z0^2 = 1");
                for (double s : {1.0, -1.0}) {
                    auto fp = phiEval(dm, p, P1Point::standard({s, 0}));
                    double n = 0;
                    for (const auto& v : fp.values) n += abs(v);
                    o.require(n < 1e-6, "member passes through the singular point over zeta = +-1");
                }
            }
        }
        o.require(certified > 0, "a certified family");
        auto again = classifyHC(dm);
        o.require(again.evidence == d.evidence, "deterministic under a fixed seed");
        auto s = classifyHC(buildSmoothO11());
        o.require(s.verdict == HCVerdict::Hypercomplex, "O(1)+O(1) is hypercomplex");
        o.detail << "quadric " << toString(q.verdict) << ", deformed " << toString(d.verdict) << " (family dim "
                 << (d.familyDimension ? *d.familyDimension : -1) << ", " << certified << " certified), O(1)+O(1) "
                 << toString(s.verdict);
    });

    criterion(8, "symmetric-matrix model", 2.0, [](Outcome& o) {
        std::mt19937_64 rng(127);
        int good = 0, checks = 0;
        Rational maxDisplayed(0);
        for (int i = 0; i < 100; ++i) {
            std::array<Rational, 4> q;
            for (auto& v : q) v = oracle::randomRational(rng);
            if (q == std::array<Rational, 4>{}) { --i; continue; }
            for (auto v : {SquaringVariant::Minus, SquaringVariant::Plus}) {
                ++checks;
                auto sec = squaringSection(Cq(q[0], q[1]), Cq(q[2], q[3]), v);
                const int s = componentLabel(sec) == ComponentLabel::Minus ? -1 : 1;
                auto mm = symMatrixModel(sec, s);
                auto rep = matrixIdentities(mm.B, mm.t);
                if (rep.traceB == 0 && rep.rankA == 1 && rep.oracleResidual2 == 0 &&
                    rep.displayedResidual2 == rep.predictedDisplayed2)
                    ++good;
                if (rep.displayedResidual2 > maxDisplayed) maxDisplayed = rep.displayedResidual2;
            }
        }
        o.require(good == checks, "tr B = 0, rank(B + t/4) = 1, oracle identity exact");
        o.detail << good << "/" << checks << " exact; displayed form B(B + t/4) has nonzero residual "
                 << "|.|^2 = (3t/4)^2 |A|^2, max " << std::setprecision(4) << toDouble(maxDisplayed);
    });

    criterion(9, "quotient component counts", 1.0, [](Outcome& o) {
        const int z2 = componentCount(cyclicGroup(2)).count, z3 = componentCount(cyclicGroup(3)).count,
                  z5 = componentCount(cyclicGroup(5)).count, q8 = componentCount(quaternionGroupQ8()).count;
        o.require(z2 == 2 && z3 == 1 && z5 == 1 && q8 == 2, "counts");
        o.require(properQuotientPredicate(cyclicGroup(3)) && properQuotientPredicate(cyclicGroup(5)), "proper quotients");
        o.require(!properQuotientPredicate(cyclicGroup(2)), "Z2 has an involution");
        o.detail << "Z2 " << z2 << ", Z3 " << z3 << ", Z5 " << z5 << ", Q8 " << q8;
    });

    criterion(10, "cone gluing", 1.0, [](Outcome& o) {
        ConePolynomial xy{{{1, 1, 0}, Cq(Rational(1))}, {{0, 0, 2}, Cq(Rational(-1))}};
        auto m = glueConeTwistor({xy}, {1, 1, 1}, 2, {{1, 1, 0}, {0, 1, 0}, {2, -1, 0}});
        o.require(sameStructure(m, buildQuadric()), "l = 2 cone equals the quadric");
        auto f = glueConeTwistor({}, {1, 1}, 1, {{1, -1, 0}, {0, 1, 0}});
        o.require(sameStructure(f, buildSmoothO11()), "l = 1 on C^2 equals O(1)+O(1)");
        o.detail << "structural equality with both reference models";
    });

    criterion(11, "oracle suites", 10.0, [](Outcome& o) {
        std::mt19937_64 rng(131);
        std::uniform_int_distribution<int> deg(0, 3), rows(1, 2), extra(1, 2);
        int agree = 0, total = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const int r = rows(rng), c = r + extra(rng);
            std::vector<int> src(static_cast<std::size_t>(c)), tgt(static_cast<std::size_t>(r));
            for (auto& s : src) s = deg(rng);
            const int top = *std::max_element(src.begin(), src.end());
            for (auto& t : tgt) t = top + deg(rng);
            auto M = oracle::randomPolyMatrix(rng, src, tgt);
            auto split = kernelSplitting(M, src, tgt);
            for (int m = -4; m <= 4; ++m, ++total)
                if (h0FromSplitting(split, m) == oracle::kernelDimension(M, src, tgt, m)) ++agree;
        }
        o.require(agree == total, "splitting vs brute-force nullspaces");
        double worst = 0;
        std::normal_distribution<double> nd;
        for (const auto& m : {buildQuadric(), deformed()}) {
            auto sys = realSectionSystem(m);
            for (int i = 0; i < 100; ++i) {
                std::vector<double> x(9);
                for (auto& v : x) v = nd(rng);
                Eigen::MatrixXd J = sys.jacobian(x);
                worst = std::max(worst, (J - oracle::finiteDifferenceJacobian(sys, x)).norm() / std::max(1.0, J.norm()));
            }
        }
        o.require(worst < 1e-6, "Jacobian vs finite differences");
        o.detail << agree << "/" << total << " kernel dimensions agree; worst Jacobian relative error " << std::scientific
                 << std::setprecision(2) << worst;
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
