#pragma once

#include <boost/math/quaternion.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <string>
#include <vector>

#include "analyzer.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace twistor {

using Quat = boost::math::quaternion<double>;

/// Finite group of unit quaternions, or an abstract group given by its
/// multiplication table (then `elements` is empty).
struct FiniteQuaternionGroup {
    std::string name;
    std::vector<Quat> elements;
    std::vector<std::vector<int>> table;
    int identity = 0;

    int order() const { return static_cast<int>(table.size()); }
    int mul(int a, int b) const { return table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
    int inverse(int a) const {
        for (int b = 0; b < order(); ++b)
            if (mul(a, b) == identity) return b;
        throw GroupAxiomError("element has no inverse", a, -1, -1);
    }
};

namespace detail {

inline void checkGroupTable(const FiniteQuaternionGroup& g) {
    const int n = g.order();
    if (n == 0) throw GroupAxiomError("empty group", -1, -1, -1);
    for (int a = 0; a < n; ++a) {
        if (static_cast<int>(g.table[static_cast<std::size_t>(a)].size()) != n)
            throw GroupAxiomError("multiplication table is not square", a, -1, -1);
        for (int b = 0; b < n; ++b)
            if (g.mul(a, b) < 0 || g.mul(a, b) >= n) throw GroupAxiomError("product outside the group", a, b, -1);
    }
    if (g.identity < 0 || g.identity >= n) throw GroupAxiomError("identity index out of range", g.identity, -1, -1);
    for (int a = 0; a < n; ++a)
        if (g.mul(g.identity, a) != a || g.mul(a, g.identity) != a)
            throw GroupAxiomError("identity does not act trivially", g.identity, a, -1);
    for (int a = 0; a < n; ++a) {
        bool found = false;
        for (int b = 0; b < n && !found; ++b) found = g.mul(a, b) == g.identity && g.mul(b, a) == g.identity;
        if (!found) throw GroupAxiomError("element has no inverse", a, -1, -1);
    }
    if (n <= 48)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) throw GroupAxiomError("associativity fails", a, b, c);
}

} // namespace detail

inline FiniteQuaternionGroup groupFromTable(std::vector<std::vector<int>> table, int identity = 0,
                                            std::string name = "table") {
    FiniteQuaternionGroup g{std::move(name), {}, std::move(table), identity};
    detail::checkGroupTable(g);
    return g;
}

/// Builds the multiplication table; closure is checked with tolerance `tol`.
inline FiniteQuaternionGroup groupFromQuaternions(const std::vector<Quat>& elems, std::string name = "quaternions",
                                                  double tol = 1e-12) {
    FiniteQuaternionGroup g{std::move(name), elems, {}, -1};
    const int n = static_cast<int>(elems.size());
    auto find = [&](const Quat& q) {
        for (int i = 0; i < n; ++i)
            if (boost::math::abs(q - elems[static_cast<std::size_t>(i)]) <= tol) return i;
        return -1;
    };
    for (int i = 0; i < n; ++i)
        if (std::abs(boost::math::norm(elems[static_cast<std::size_t>(i)]) - 1.0) > tol)
            throw GroupAxiomError("element is not a unit quaternion", i, -1, -1);
    g.identity = find(Quat(1.0));
    if (g.identity < 0) throw GroupAxiomError("identity missing", -1, -1, -1);
    g.table.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int c = find(elems[static_cast<std::size_t>(a)] * elems[static_cast<std::size_t>(b)]);
            if (c < 0) throw GroupAxiomError("not closed under multiplication", a, b, -1);
            g.table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = c;
        }
    detail::checkGroupTable(g);
    return g;
}

/// Z_k generated by cos(2 pi / k) + i sin(2 pi / k).
inline FiniteQuaternionGroup cyclicGroup(int k) {
    if (k < 1) throw GroupAxiomError("cyclic group order must be positive", k, -1, -1);
    std::vector<Quat> e;
    for (int j = 0; j < k; ++j) {
        const double t = 2.0 * std::numbers::pi * j / k;
        e.emplace_back(std::cos(t), std::sin(t), 0.0, 0.0);
    }
    return groupFromQuaternions(e, "Z" + std::to_string(k), 1e-12);
}

/// Binary dihedral group of order 4n, generated by exp(i pi / n) and j.
inline FiniteQuaternionGroup binaryDihedral(int n) {
    if (n < 2) throw GroupAxiomError("binary dihedral index must be at least 2", n, -1, -1);
    std::vector<Quat> e;
    const Quat j(0.0, 0.0, 1.0, 0.0);
    for (int m = 0; m < 2 * n; ++m) {
        const double t = std::numbers::pi * m / n;
        const Quat a(std::cos(t), std::sin(t), 0.0, 0.0);
        e.push_back(a);
        e.push_back(a * j);
    }
    return groupFromQuaternions(e, "BD" + std::to_string(4 * n), 1e-12);
}

inline FiniteQuaternionGroup quaternionGroupQ8() {
    std::vector<Quat> e;
    for (double s : {1.0, -1.0}) {
        e.emplace_back(s, 0.0, 0.0, 0.0);
        e.emplace_back(0.0, s, 0.0, 0.0);
        e.emplace_back(0.0, 0.0, s, 0.0);
        e.emplace_back(0.0, 0.0, 0.0, s);
    }
    return groupFromQuaternions(e, "Q8");
}

/// Binary tetrahedral group: Q8 together with (+-1 +- i +- j +- k) / 2.
inline FiniteQuaternionGroup binaryTetrahedral() {
    auto e = quaternionGroupQ8().elements;
    for (int m = 0; m < 16; ++m)
        e.emplace_back((m & 1 ? -0.5 : 0.5), (m & 2 ? -0.5 : 0.5), (m & 4 ? -0.5 : 0.5), (m & 8 ? -0.5 : 0.5));
    return groupFromQuaternions(e, "2T");
}

/// h G h^-1 for a unit quaternion h.
inline FiniteQuaternionGroup conjugated(const FiniteQuaternionGroup& g, const Quat& h) {
    if (g.elements.empty()) return g;
    std::vector<Quat> e;
    const Quat hinv = boost::math::conj(h) / boost::math::norm(h);
    for (const auto& q : g.elements) e.push_back(h * q * hinv);
    return groupFromQuaternions(e, g.name + "^h", 1e-10);
}

/// Named groups accepted on the command line: Z<k>, Q8, BD<4n>, 2T.
inline FiniteQuaternionGroup namedGroup(const std::string& name) {
    try {
        if (name == "Q8") return quaternionGroupQ8();
        if (name == "2T") return binaryTetrahedral();
        if (name.size() > 1 && name[0] == 'Z') return cyclicGroup(std::stoi(name.substr(1)));
        if (name.size() > 2 && name.rfind("BD", 0) == 0) {
            const int order = std::stoi(name.substr(2));
            if (order % 4 != 0) throw ParseError("binary dihedral order must be divisible by 4");
            return binaryDihedral(order / 4);
        }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }
    throw ParseError("unknown group '" + name + "'");
}

struct InvolutionCensus {
    std::vector<int> involutions;               // g with g^2 = e, e included
    std::vector<std::vector<int>> conjugacyClasses;
};

inline InvolutionCensus censusInvolutions(const FiniteQuaternionGroup& g) {
    detail::checkGroupTable(g);
    InvolutionCensus c;
    for (int a = 0; a < g.order(); ++a)
        if (g.mul(a, a) == g.identity) c.involutions.push_back(a);
    std::vector<bool> seen(static_cast<std::size_t>(g.order()), false);
    for (int a : c.involutions) {
        if (seen[static_cast<std::size_t>(a)]) continue;
        std::vector<int> cls;
        for (int h = 0; h < g.order(); ++h) {
            const int b = g.mul(g.mul(h, a), g.inverse(h));
            if (!seen[static_cast<std::size_t>(b)]) {
                seen[static_cast<std::size_t>(b)] = true;
                cls.push_back(b);
            }
        }
        std::sort(cls.begin(), cls.end());
        c.conjugacyClasses.push_back(std::move(cls));
    }
    return c;
}

enum class ActionType { LeftMultiplication, Other };

struct ComponentCount {
    int count = 0;
    bool lowerBound = false;
    std::vector<std::string> assumptionFlags;
};

/// Components of the regular part of the closure quotient: one per conjugacy
/// class of elements with g^2 = e, provided each fixed set Y_g of g sigma is
/// connected. For left multiplication on H^n the Y_g are real forms of the
/// flat complexification, hence connected.
inline ComponentCount componentCount(const FiniteQuaternionGroup& g, ActionType action = ActionType::LeftMultiplication) {
    ComponentCount out;
    out.count = static_cast<int>(censusInvolutions(g).conjugacyClasses.size());
    if (action == ActionType::LeftMultiplication) {
        out.assumptionFlags.push_back("Y_g connected: real form of the flat complexification");
    } else {
        out.lowerBound = true;
        out.assumptionFlags.push_back("Y_g connectivity not established for this action: count is a lower bound");
    }
    return out;
}

/// True iff G has no element of order 2, in which case the closure quotient is M/G.
inline bool properQuotientPredicate(const FiniteQuaternionGroup& g) {
    return censusInvolutions(g).involutions.size() == 1;
}

/// Preimages of a quadric section under the squaring map (a, b) -> section.
inline std::vector<std::pair<Cd, Cd>> squaringPreimages(const QuadricParams<double>& p, SquaringVariant v,
                                                        double tol = 1e-9) {
    std::vector<std::pair<Cd, Cd>> cands;
    const Cd ra = fromStd(std::sqrt(toStd(p.x0)));
    if (abs(ra) > tol) {
        for (const Cd& a : {ra, -ra}) cands.emplace_back(a, p.z0 / a);
    } else {
        // a = 0: x2 = conj(b)^2
        const Cd rb = fromStd(std::sqrt(toStd(p.x2))).conj();
        cands.emplace_back(Cd{}, rb);
        cands.emplace_back(Cd{}, -rb);
    }
    std::vector<std::pair<Cd, Cd>> out;
    double scale = 1.0;
    for (double x : p.flat()) scale = std::max(scale, std::abs(x));
    for (const auto& [a, b] : cands) {
        const auto q = squaringSection(a, b, v);
        if (distance(q.flat(), p.flat()) > tol * scale) continue;
        bool dup = false;
        for (const auto& [a2, b2] : out) dup = dup || (abs(a - a2) + abs(b - b2) <= tol * scale);
        if (!dup) out.emplace_back(a, b);
    }
    return out;
}

struct VeroneseReport {
    int samples = 0;
    int membershipPasses = 0;
    int collapsePasses = 0;
    int twoToOnePasses = 0;  // nonzero samples with exactly two preimages
    int fiberSolveAgrees = 0; // the section is among the fiberSolve solutions at zeta = 0
    int nonzeroSamples = 0;
    bool originMapsToOrigin = true;
    bool pass() const {
        return membershipPasses == samples && collapsePasses == samples && twoToOnePasses == nonzeroSamples &&
               fiberSolveAgrees == samples && originMapsToOrigin;
    }
};

/// Checks the squaring map against the quadric real system: membership (exact
/// for rational samples), (a, b) ~ (-a, -b), two preimages away from (0, 0),
/// and agreement with fiberSolve at zeta = 0.
template <class R>
VeroneseReport veroneseQuotientCheck(const std::vector<std::pair<Complex<R>, Complex<R>>>& samples, SquaringVariant v) {
    VeroneseReport rep;
    const TwistorModel quadric = buildQuadric();
    const RealEquationSystem sys = realSectionSystem(quadric);
    for (const auto& [a, b] : samples) {
        ++rep.samples;
        const auto q = squaringSection(a, b, v);
        bool member;
        if constexpr (std::is_same_v<R, Rational>) member = membershipExact(sys, q.flat());
        else member = membership(sys, q.flat()).pass;
        if (member) ++rep.membershipPasses;
        if (squaringSection(-a, -b, v) == q) ++rep.collapsePasses;
        const bool zero = a == Complex<R>{} && b == Complex<R>{};
        QuadricParams<double> qd = QuadricParams<double>::fromFlat([&] {
            std::vector<double> f;
            for (const auto& x : q.flat()) f.push_back(toDouble(x));
            return f;
        }());
        if (zero) {
            if (!(q == QuadricParams<R>{})) rep.originMapsToOrigin = false;
        } else {
            ++rep.nonzeroSamples;
            if (squaringPreimages(qd, v).size() == 2) ++rep.twoToOnePasses;
        }
        const auto fs = fiberSolve(quadric, sys, P1Point::standard({0.0}), phiEval(quadric, qd.flat(), P1Point::standard({0.0})).values);
        for (const auto& s : fs.solutions)
            if (distance(s, qd.flat()) <= 1e-8 * (1.0 + std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0)))) {
                ++rep.fiberSolveAgrees;
                break;
            }
    }
    return rep;
}

} // namespace twistor
