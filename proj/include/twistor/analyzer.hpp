#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "p1.hpp"
#include "solver.hpp"

namespace twistor {

// ---------------------------------------------------------------------------
// Membership and Jacobian rank
// ---------------------------------------------------------------------------

struct MembershipReport {
    std::vector<double> residuals;
    double maxResidual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Pass iff max |residual| <= tol * (1 + |p|^2).
inline MembershipReport membership(const RealEquationSystem& sys, const std::vector<double>& p, double tol = 1e-9) {
    if (static_cast<int>(p.size()) != sys.nvars())
        throw DimensionError("membership: expected " + std::to_string(sys.nvars()) + " parameters, got " +
                             std::to_string(p.size()));
    MembershipReport rep;
    Eigen::VectorXd r = sys.residuals(p);
    double n2 = 0.0;
    for (double v : p) n2 += v * v;
    rep.threshold = tol * (1.0 + n2);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        rep.residuals.push_back(r(i));
        rep.maxResidual = std::max(rep.maxResidual, std::abs(r(i)));
    }
    rep.pass = rep.maxResidual <= rep.threshold;
    return rep;
}

/// Exact membership: every residual vanishes.
inline bool membershipExact(const RealEquationSystem& sys, const std::vector<Rational>& p) {
    if (static_cast<int>(p.size()) != sys.nvars()) throw DimensionError("membership: parameter count mismatch");
    for (const auto& r : sys.residuals(p))
        if (r != 0) return false;
    return true;
}

inline int jacobianRank(const RealEquationSystem& sys, const std::vector<double>& p, double relTol = kRankRelTol) {
    if (sys.empty()) return 0;
    return numericRank(sys.jacobian(p), relTol);
}
inline int jacobianRank(const RealEquationSystem& sys, const std::vector<Rational>& p) {
    if (sys.empty()) return 0;
    return exactRank(sys.jacobian(p));
}

// ---------------------------------------------------------------------------
// Fiber incidence
// ---------------------------------------------------------------------------

/// A point of the fiber Z_zeta, coordinates in the chart of zeta.
struct FiberPoint {
    P1Point zeta;
    std::vector<Cd> values;
};

/// Intersection of the real section with the fiber over zeta.
template <class R>
FiberPoint phiEval(const TwistorModel& model, const std::vector<R>& params, const P1Point& zeta) {
    auto sec = model.basis().embed(params);
    FiberPoint fp{zeta, {}};
    for (const auto& s : sec) fp.values.push_back(evalAt(s, zeta));
    return fp;
}

/// Real structure on fiber points: (zeta, u) -> (-1/conj(zeta), w) with
/// w_i = sign_i conj(u_target) / conj(zeta)^k. The image is expressed in the
/// opposite chart, where w~_i = (-1)^k sign_i conj(u_target).
inline FiberPoint sigmaFiber(const TwistorModel& model, const FiberPoint& p) {
    FiberPoint q{antipodal(p.zeta), {}};
    for (std::size_t i = 0; i < model.sigmaRules.size(); ++i) {
        const auto& r = model.sigmaRules[i];
        Cd w = p.values[static_cast<std::size_t>(r.targetIndex)].conj();
        if ((r.twist % 2 != 0) != (r.sign < 0)) w = -w;
        q.values.push_back(w);
    }
    return q;
}

/// Real-linear map from section parameters to (re u_1, im u_1, ...) at zeta.
inline Eigen::MatrixXd incidenceMatrix(const RealParamBasis& b, const P1Point& zeta) {
    const auto m = static_cast<Eigen::Index>(b.embedding.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * m, b.paramCount);
    std::vector<double> e(static_cast<std::size_t>(b.paramCount), 0.0);
    for (int p = 0; p < b.paramCount; ++p) {
        e[static_cast<std::size_t>(p)] = 1.0;
        auto sec = b.embed(e);
        for (Eigen::Index i = 0; i < m; ++i) {
            Cd v = evalAt(sec[static_cast<std::size_t>(i)], zeta);
            L(2 * i, p) = v.re;
            L(2 * i + 1, p) = v.im;
        }
        e[static_cast<std::size_t>(p)] = 0.0;
    }
    return L;
}

inline Eigen::VectorXd flattenValues(const std::vector<Cd>& u) {
    Eigen::VectorXd v(2 * static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        v(2 * static_cast<Eigen::Index>(i)) = u[i].re;
        v(2 * static_cast<Eigen::Index>(i) + 1) = u[i].im;
    }
    return v;
}

/// Residual of the fiber equations at a fiber point, relative to its size.
inline double fiberResidual(const TwistorModel& model, const FiberPoint& p) {
    double worst = 0.0, n2 = 0.0;
    for (const auto& v : p.values) n2 += v.norm2();
    for (const auto& f : model.equations) worst = std::max(worst, abs(f.eval(p.zeta, p.values)));
    return worst / (1.0 + n2);
}

/// The model is the reference quadric xy = z^2 with its double-zero component.
inline bool isReferenceQuadric(const TwistorModel& model) {
    static const TwistorModel ref = buildQuadric();
    return sameStructure(model, ref) && model.componentEquations == ref.componentEquations;
}

struct FiberSolveConfig {
    Tolerances tol;
    std::uint64_t seed = 7;
    int starts = 48;
};

struct FiberSolveResult {
    std::vector<std::vector<double>> solutions;
    bool complete = false;
    std::string method;
};

namespace detail {

/// Sections at zeta = 0 of the quadric model through (X, Y, Z): incidence fixes
/// x0 = X, x2 = conj(Y), z0 = Z; the double-zero equation leaves x1 = +-2 sqrt(x0 x2)
/// and the middle coefficient equation leaves r = +-(|x0| - |x2|). Every solution
/// is among these at most four candidates.
inline std::vector<std::vector<double>> quadricFiberAtZero(const RealEquationSystem& sys, const std::vector<Cd>& t,
                                                           const Tolerances& tol) {
    const Cd x0 = t[0], x2 = t[1].conj(), z0 = t[2];
    const double dr = abs(x0) - abs(x2);
    const Cd root = fromStd(std::sqrt(toStd(x0 * x2)));
    std::vector<std::vector<double>> out;
    for (double r : {dr, -dr})
        for (const Cd& x1 : {Cd(2.0) * root, Cd(-2.0) * root}) {
            QuadricParams<double> q{x0, x1, x2, z0, r};
            auto p = q.flat();
            if (membership(sys, p, tol.membership).pass) insertDistinct(out, p, tol.dedup);
        }
    return out;
}

/// SU(2) element sending 0 to zeta: [[conj w0, w1], [-conj w1, w0]].
struct Rotation {
    Cd a, b, c, d;
};
inline Rotation rotationTo(const P1Point& zeta) {
    auto [w0, w1] = zeta.homogeneous();
    return {w0.conj(), w1, -w1.conj(), w0};
}

} // namespace detail

/// All real sections in the model's real system meeting `target` over zeta.
/// The reference quadric uses an exact closed-form reducer (rotated to
/// zeta = 0 by SU(2)); other models use seeded multistart Gauss-Newton with
/// heuristic completeness.
inline FiberSolveResult fiberSolve(const TwistorModel& model, const RealEquationSystem& sys, const P1Point& zeta,
                                   const std::vector<Cd>& target, const FiberSolveConfig& cfg = {}) {
    if (static_cast<int>(target.size()) != model.coordCount()) throw DimensionError("fiber point has wrong arity");
    FiberPoint tp{zeta, target};
    if (fiberResidual(model, tp) > 1e-8) throw FiberError("target does not lie on the fiber");
    FiberSolveResult res;
    const RealParamBasis basis = model.basis();
    if (isReferenceQuadric(model)) {
        res.method = "quadric-closed-form";
        res.complete = true;
        const auto g = detail::rotationTo(zeta);
        auto [w0, w1] = zeta.homogeneous();
        const Cd scale = zeta.chart == Chart::Standard ? w0 * w0 : w1 * w1;
        std::vector<Cd> t0;
        for (const auto& v : target) t0.push_back(scale * v);
        for (const auto& p0 : detail::quadricFiberAtZero(sys, t0, cfg.tol)) {
            // pull back along g^-1 = [[d, -b], [-c, a]]
            auto sec = basis.embed(p0);
            for (auto& s : sec) s = moebiusPullback(s, g.d, -g.b, -g.c, g.a);
            auto p = basis.project(sec);
            insertDistinct(res.solutions, p, cfg.tol.dedup);
        }
        return res;
    }
    res.method = "multistart-gauss-newton";
    AugmentedSystem aug{&sys, {}, {}};
    aug.addLinear(incidenceMatrix(basis, zeta), flattenValues(target));
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    double scale = 1.0;
    for (const auto& v : target) scale = std::max(scale, std::sqrt(abs(v)));
    for (int s = 0; s < cfg.starts; ++s) {
        std::vector<double> x0(static_cast<std::size_t>(sys.nvars()));
        for (auto& v : x0) v = scale * nd(rng);
        auto nr = gaussNewton(aug, x0, cfg.tol);
        if (!nr.converged) continue;
        if (!membership(sys, nr.x, cfg.tol.membership).pass) continue;
        insertDistinct(res.solutions, nr.x, cfg.tol.dedup);
    }
    return res;
}

inline FiberSolveResult fiberSolve(const TwistorModel& model, const P1Point& zeta, const std::vector<Cd>& target,
                                   const FiberSolveConfig& cfg = {}) {
    return fiberSolve(model, realSectionSystem(model), zeta, target, cfg);
}

// ---------------------------------------------------------------------------
// Singular locus
// ---------------------------------------------------------------------------

/// Dimension of the tangent space at p of the locus where the Jacobian keeps
/// its rank: kernel of [J; U^T (dJ/dx_k) V] with U, V the left/right null
/// spaces of J(p).
inline int rankStratumDimension(const RealEquationSystem& sys, const std::vector<double>& p, double relTol = kRankRelTol) {
    const int n = sys.nvars();
    if (sys.empty()) return n;
    Eigen::MatrixXd J = sys.jacobian(p);
    Eigen::MatrixXd U = leftNullspaceBasis(J, relTol);
    Eigen::MatrixXd V = nullspaceBasis(J, relTol);
    std::vector<Eigen::MatrixXd> dJ;
    for (int k = 0; k < n; ++k) dJ.push_back(sys.jacobianDerivative(p, k));
    const Eigen::Index extra = U.cols() * V.cols();
    Eigen::MatrixXd S(J.rows() + extra, n);
    S.topRows(J.rows()) = J;
    Eigen::Index row = J.rows();
    for (Eigen::Index a = 0; a < U.cols(); ++a)
        for (Eigen::Index b = 0; b < V.cols(); ++b, ++row)
            for (int k = 0; k < n; ++k) S(row, k) = U.col(a).dot(dJ[static_cast<std::size_t>(k)] * V.col(b));
    return n - numericRank(S, relTol);
}

struct SingularPoint {
    std::vector<double> p;
    int rank = 0;
    int stratumDimension = 0;
    int cluster = -1;
};

struct SingularCluster {
    int size = 0;
    int dimension = 0;
    std::vector<double> representative;
};

struct SingularReport {
    int regularRank = 0;
    int examined = 0;
    int nonMembers = 0;
    std::vector<int> ranks;
    std::vector<SingularPoint> deficient;
    std::vector<SingularCluster> clusters;
};

struct SingularScanConfig {
    Tolerances tol;
    double clusterRadius = 0.5;
};

/// Classifies candidate points by Jacobian rank. The regular rank is the
/// system's expected rank when set, otherwise the largest observed rank.
/// Rank-deficient points are grouped by single linkage and each group gets a
/// dimension estimate from the rank-stratum tangent space.
inline SingularReport singularScan(const RealEquationSystem& sys, const std::vector<std::vector<double>>& points,
                                   const SingularScanConfig& cfg = {}) {
    SingularReport rep;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!membership(sys, points[i], cfg.tol.membership).pass) {
            ++rep.nonMembers;
            rep.ranks.push_back(-1);
            continue;
        }
        ++rep.examined;
        rep.ranks.push_back(jacobianRank(sys, points[i], cfg.tol.rank));
        members.push_back(i);
    }
    rep.regularRank = sys.expectedRegularRank.value_or(0);
    if (!sys.expectedRegularRank)
        for (int r : rep.ranks) rep.regularRank = std::max(rep.regularRank, r);
    for (std::size_t i : members) {
        if (rep.ranks[i] >= rep.regularRank) continue;
        SingularPoint sp{points[i], rep.ranks[i], rankStratumDimension(sys, points[i], cfg.tol.rank), -1};
        rep.deficient.push_back(std::move(sp));
    }
    // single linkage
    for (std::size_t i = 0; i < rep.deficient.size(); ++i) {
        if (rep.deficient[i].cluster >= 0) continue;
        const int id = static_cast<int>(rep.clusters.size());
        rep.clusters.push_back({});
        std::vector<std::size_t> stack{i};
        rep.deficient[i].cluster = id;
        while (!stack.empty()) {
            std::size_t c = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < rep.deficient.size(); ++j) {
                if (rep.deficient[j].cluster >= 0) continue;
                if (distance(rep.deficient[c].p, rep.deficient[j].p) <= cfg.clusterRadius) {
                    rep.deficient[j].cluster = id;
                    stack.push_back(j);
                }
            }
        }
    }
    for (const auto& sp : rep.deficient) {
        auto& cl = rep.clusters[static_cast<std::size_t>(sp.cluster)];
        if (cl.size == 0) cl.representative = sp.p;
        ++cl.size;
        cl.dimension = std::max(cl.dimension, sp.stratumDimension);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Branching
// ---------------------------------------------------------------------------

enum class Branching { Unbranched, Branched };

struct BranchReport {
    Branching verdict = Branching::Branched;
    int augmentedRank = 0;
    int unknowns = 0;
};

/// p is an isolated, multiplicity-one solution of [system; Phi_zeta(q) = Phi_zeta(p)]
/// iff the augmented Jacobian has full column rank.
inline BranchReport branchTest(const TwistorModel& model, const RealEquationSystem& sys, const std::vector<double>& p,
                               const P1Point& zeta, double relTol = kRankRelTol) {
    const RealParamBasis basis = model.basis();
    Eigen::MatrixXd L = incidenceMatrix(basis, zeta);
    Eigen::MatrixXd J(sys.size() + L.rows(), sys.nvars());
    if (sys.size() > 0) J.topRows(sys.size()) = sys.jacobian(p);
    J.bottomRows(L.rows()) = L;
    BranchReport rep;
    rep.unknowns = sys.nvars();
    rep.augmentedRank = numericRank(J, relTol);
    rep.verdict = rep.augmentedRank == rep.unknowns ? Branching::Unbranched : Branching::Branched;
    return rep;
}

// ---------------------------------------------------------------------------
// Normal sheaf
// ---------------------------------------------------------------------------

/// F(zeta, s(zeta)) as a section of O(twist).
template <class R>
CoeffPoly<R> substituteSection(const FiberEquation& f, const std::vector<CoeffPoly<R>>& sec) {
    CoeffPoly<R> total(f.twist);
    for (const auto& [e, g] : f.terms) {
        CoeffPoly<R> acc = fromRationalPoly<R>(g);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) acc = acc * sec[i];
        if (acc.degreeBound != f.twist) throw DegreeError("equation term does not have the equation's twist");
        total = total + acc;
    }
    return total;
}

template <class R>
struct NormalBundleReport {
    bool degenerate = false;
    std::string degenerateWhere;
    std::vector<P1Point> degenerateLocations;
    PolyMatrix<R> linearization;
    SplittingType splitting;
    int h0 = 0;
    int h0Minus2 = 0;
};

/// Linearizes the fiber equations along the real section (entry dF_q/du_i on
/// the section, a section of O(d_q - k_i)) and splits the kernel sheaf.
template <class R>
NormalBundleReport<R> normalSplitting(const TwistorModel& model, const std::vector<R>& params) {
    NormalBundleReport<R> rep;
    auto sec = model.basis().embed(params);
    std::vector<int> src = model.degrees, tgt;
    for (const auto& f : model.equations) {
        tgt.push_back(f.twist);
        std::vector<CoeffPoly<R>> row;
        for (int i = 0; i < model.coordCount(); ++i)
            row.push_back(substituteSection(f.derivative(i, model.degrees[static_cast<std::size_t>(i)]), sec));
        rep.linearization.push_back(std::move(row));
    }
    const int grank = genericRank(rep.linearization, src, tgt);
    if (grank < static_cast<int>(tgt.size())) {
        rep.degenerate = true;
        bool zeroRow = false;
        for (const auto& row : rep.linearization)
            if (std::all_of(row.begin(), row.end(), [](const auto& e) { return e.isZero(); })) zeroRow = true;
        rep.degenerateWhere = zeroRow ? "zero row: all partials vanish identically" : "linearization drops rank everywhere";
        return rep;
    }
    rep.splitting = kernelSplitting(rep.linearization, src, tgt);
    int expected = 0;
    for (int s : src) expected += s;
    for (int t : tgt) expected -= t;
    if (rep.splitting.degree() != expected) {
        rep.degenerate = true;
        rep.degenerateWhere = "linearization drops rank at isolated points";
        if (tgt.size() == 1) {
            // common zeros of the single row, including infinity
            const auto& row = rep.linearization[0];
            std::vector<CoeffPoly<double>> rd;
            for (const auto& e : row) rd.push_back(toDoublePoly(e));
            double scale = 0.0;
            for (const auto& e : rd)
                for (const auto& c : e.coeffs) scale = std::max(scale, abs(c));
            const double tol = 1e-7 * std::max(scale, 1e-300);
            bool atInf = true;
            for (const auto& e : rd)
                if (e.degreeBound >= 0 && abs(e.coeffs.back()) > tol) atInf = false;
            if (atInf) rep.degenerateLocations.push_back(P1Point::infinity());
            const CoeffPoly<double>* pivot = nullptr;
            for (const auto& e : rd)
                if (!e.isZero(tol)) { pivot = &e; break; }
            if (pivot)
                for (const auto& z : polyRoots(pivot->coeffs)) {
                    bool common = true;
                    for (const auto& e : rd)
                        if (abs(e.eval(z)) > 1e-6 * std::max(1.0, scale) * std::pow(1.0 + abs(z), e.degreeBound)) common = false;
                    if (common) rep.degenerateLocations.push_back(P1Point::standard(z).canonical());
                }
        }
        return rep;
    }
    rep.h0 = h0FromSplitting(rep.splitting, 0);
    rep.h0Minus2 = h0FromSplitting(rep.splitting, -2);
    return rep;
}

// ---------------------------------------------------------------------------
// Hypercomplex classification
// ---------------------------------------------------------------------------

enum class HCVerdict { Hypercomplex, WeaklyHypercomplex, Undetermined };

inline std::string toString(HCVerdict v) {
    switch (v) {
    case HCVerdict::Hypercomplex: return "Hypercomplex";
    case HCVerdict::WeaklyHypercomplex: return "WeaklyHypercomplex";
    default: return "Undetermined";
    }
}

struct SingularFiberPoint {
    FiberPoint point;
    bool totalSpaceSingular = false;
};

struct SectionFamily {
    SingularFiberPoint through;
    std::vector<double> member;
    std::vector<double> continuedMember;
    int corank = 0;
    bool certified = false;
};

struct HCClassification {
    HCVerdict verdict = HCVerdict::Undetermined;
    std::vector<SingularFiberPoint> singularFiberPoints;
    std::vector<SectionFamily> families;
    std::optional<int> familyDimension;
    SingularReport singularScan;
    int branchTests = 0;
    int branchedRegular = 0;
    int splittingChecks = 0;
    int splittingFailures = 0;
    std::vector<std::string> evidence;
};

struct ClassifyConfig {
    Tolerances tol;
    std::uint64_t seed = 2024;
    int samples = 40;
    int zetaSamples = 3;
    int singularStarts = 24;
    int maxSingularPoints = 4;
    int familyStarts = 6;
    double continuationStep = 0.05;
    double clusterRadius = 0.5;
};

namespace detail {

/// Fiber points where the fiber Jacobian drops rank: F_q = 0,
/// sum_q lambda_q dF_q/du = 0, c . lambda = 1, solved by complex Newton in
/// both charts from seeded random starts. Such points are often multiple
/// roots (Newton stalls near sqrt(eps)), so each hit is polished on the
/// system with the row sum_q lambda_q dF_q/dzeta added; when that converges
/// the point is a singular point of the total space and is a regular root there.
inline std::vector<SingularFiberPoint> findSingularFiberPoints(const TwistorModel& model, const ClassifyConfig& cfg,
                                                               std::mt19937_64& rng) {
    std::vector<SingularFiberPoint> found;
    const auto& eqs = model.equations;
    if (eqs.empty()) return found;
    const int m = model.coordCount();
    const int E = static_cast<int>(eqs.size());
    const auto us = [](int i) { return static_cast<std::size_t>(i); };
    std::vector<std::vector<FiberEquation>> D(us(E));
    for (int q = 0; q < E; ++q)
        for (int i = 0; i < m; ++i) D[us(q)].push_back(eqs[us(q)].derivative(i, model.degrees[us(i)]));
    std::normal_distribution<double> nd;
    std::vector<std::complex<double>> cvec;
    for (int q = 0; q < E; ++q) cvec.emplace_back(nd(rng), nd(rng));
    const int nU = 1 + m + E;

    struct Outcome {
        bool ok = false;
        double residual = 0.0;
    };
    auto newton = [&](Eigen::VectorXcd& z, Chart chart, bool withZeta, int maxIt) {
        const int rows = E + m + 1 + (withZeta ? 1 : 0);
        Outcome out;
        for (int it = 0; it < maxIt; ++it) {
            const P1Point zeta{chart, fromStd(z(0))};
            std::vector<Cd> u(us(m));
            for (int i = 0; i < m; ++i) u[us(i)] = fromStd(z(1 + i));
            Eigen::VectorXcd F = Eigen::VectorXcd::Zero(rows);
            Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(rows, nU);
            for (int q = 0; q < E; ++q) {
                F(q) = toStd(eqs[us(q)].eval(zeta, u));
                auto g = eqs[us(q)].gradient(zeta, u);
                J(q, 0) = toStd(g[us(m)]);
                for (int i = 0; i < m; ++i) J(q, 1 + i) = toStd(g[us(i)]);
            }
            for (int i = 0; i < m; ++i)
                for (int q = 0; q < E; ++q) {
                    const auto& Dq = D[us(q)][us(i)];
                    const std::complex<double> lam = z(1 + m + q);
                    const std::complex<double> val = toStd(Dq.eval(zeta, u));
                    F(E + i) += lam * val;
                    auto g = Dq.gradient(zeta, u);
                    J(E + i, 0) += lam * toStd(g[us(m)]);
                    for (int l = 0; l < m; ++l) J(E + i, 1 + l) += lam * toStd(g[us(l)]);
                    J(E + i, 1 + m + q) = val;
                }
            F(E + m) = -1.0;
            for (int q = 0; q < E; ++q) {
                F(E + m) += cvec[us(q)] * z(1 + m + q);
                J(E + m, 1 + m + q) = cvec[us(q)];
            }
            if (withZeta) {
                const int row = E + m + 1;
                const double h = 1e-6;
                const P1Point zp{chart, zeta.value + Cd{h}}, zm{chart, zeta.value - Cd{h}};
                for (int q = 0; q < E; ++q) {
                    const std::complex<double> lam = z(1 + m + q);
                    const std::complex<double> dz = toStd(eqs[us(q)].gradient(zeta, u)[us(m)]);
                    F(row) += lam * dz;
                    J(row, 1 + m + q) = dz;
                    const auto gp = eqs[us(q)].gradient(zp, u), gm = eqs[us(q)].gradient(zm, u);
                    J(row, 0) += lam * (toStd(gp[us(m)]) - toStd(gm[us(m)])) / (2.0 * h);
                    for (int l = 0; l < m; ++l) J(row, 1 + l) += lam * toStd(D[us(q)][us(l)].gradient(zeta, u)[us(m)]);
                }
            }
            out.residual = F.cwiseAbs().maxCoeff();
            Eigen::VectorXcd step = J.completeOrthogonalDecomposition().solve(F);
            if (!step.allFinite()) return Outcome{};
            z -= step;
            if (step.norm() <= 1e-14 * std::max(1.0, z.norm())) {
                out.ok = out.residual <= 1e-10 * std::max(1.0, z.squaredNorm());
                return out;
            }
        }
        return out;
    };

    for (int s = 0; s < cfg.singularStarts && static_cast<int>(found.size()) < cfg.maxSingularPoints; ++s) {
        const Chart chart = s % 2 == 0 ? Chart::Standard : Chart::Infinity;
        Eigen::VectorXcd z(nU);
        for (int i = 0; i < nU; ++i) z(i) = {nd(rng), nd(rng)};
        z(0) *= 0.5;
        if (!newton(z, chart, false, 300).ok) continue;
        bool total = false;
        Eigen::VectorXcd zp = z;
        if (auto pol = newton(zp, chart, true, 60); pol.ok && (zp - z).norm() <= 1e-4 * std::max(1.0, z.norm())) {
            z = zp;
            total = true;
        }
        P1Point zeta{chart, fromStd(z(0))};
        std::vector<Cd> u(us(m));
        for (int i = 0; i < m; ++i) u[us(i)] = fromStd(z(1 + i));
        if (abs(zeta.value) > 1.0) {
            const Cd inv = Cd{1.0} / zeta.value;
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < model.degrees[us(i)]; ++k) u[us(i)] *= inv;
            zeta = {chart == Chart::Standard ? Chart::Infinity : Chart::Standard, inv};
        }
        bool dup = false;
        for (const auto& f : found) {
            if (chordal(f.point.zeta, zeta) > 1e-6) continue;
            // charts differ only near |zeta| = 1; compare in the new point's chart
            std::vector<Cd> v = f.point.values;
            if (f.point.zeta.chart != zeta.chart)
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < model.degrees[us(i)]; ++k) v[us(i)] *= f.point.zeta.value;
            double d = 0.0;
            for (int i = 0; i < m; ++i) d = std::max(d, abs(v[us(i)] - u[us(i)]));
            if (d < 1e-6 * (1.0 + abs(u[0]))) dup = true;
        }
        if (!dup) found.push_back({{zeta, u}, total});
    }
    return found;
}

/// Predictor-corrector step along a random kernel direction of the augmented
/// Jacobian. Succeeds when the corrector lands on a distinct solution.
inline std::optional<std::vector<double>> continueAlongKernel(const AugmentedSystem& aug, const std::vector<double>& p,
                                                              const ClassifyConfig& cfg, std::mt19937_64& rng) {
    Eigen::MatrixXd K = nullspaceBasis(aug.jacobian(p), cfg.tol.rank);
    if (K.cols() == 0) return std::nullopt;
    std::normal_distribution<double> nd;
    double pn = 0.0;
    for (double v : p) pn = std::max(pn, std::abs(v));
    const double h = cfg.continuationStep * std::max(1.0, pn);
    for (int attempt = 0; attempt < 3; ++attempt) {
        Eigen::VectorXd c(K.cols());
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = nd(rng);
        Eigen::VectorXd v = K * c;
        v.normalize();
        std::vector<double> q0 = p;
        for (std::size_t i = 0; i < q0.size(); ++i) q0[i] += h * v(static_cast<Eigen::Index>(i));
        AugmentedSystem corr = aug;
        Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(q0.data(), static_cast<Eigen::Index>(q0.size()));
        corr.addLinear(v.transpose(), Eigen::VectorXd::Constant(1, v.dot(pv)));
        auto nr = gaussNewton(corr, q0, cfg.tol);
        if (nr.converged && distance(nr.x, p) >= 0.5 * h) return nr.x;
    }
    return std::nullopt;
}

} // namespace detail

/// Random points of the real section space: Gauss-Newton projections of
/// seeded Gaussian starts.
inline std::vector<std::vector<double>> sampleSections(const RealEquationSystem& sys, int count, std::mt19937_64& rng,
                                                       const Tolerances& tol = {}) {
    std::vector<std::vector<double>> out;
    std::normal_distribution<double> nd;
    AugmentedSystem aug{&sys, {}, {}};
    for (int attempt = 0; attempt < 10 * count && static_cast<int>(out.size()) < count; ++attempt) {
        std::vector<double> x(static_cast<std::size_t>(sys.nvars()));
        for (auto& v : x) v = nd(rng);
        if (sys.empty()) {
            out.push_back(x);
            continue;
        }
        auto nr = gaussNewton(aug, x, tol);
        if (nr.converged && membership(sys, nr.x, tol.membership).pass) out.push_back(nr.x);
    }
    return out;
}

/// Hypercomplex vs weakly hypercomplex decision:
/// (a) singular fiber points of Z; (b) real sections through each antipodal
/// pair of them; (c) a certified positive-dimensional family there means
/// WeaklyHypercomplex; (d) otherwise isolated singular sections, unbranched
/// incidence and O(1)-splitting normal bundles on sampled regular sections
/// mean Hypercomplex; anything else is Undetermined.
inline HCClassification classifyHC(const TwistorModel& model, const ClassifyConfig& cfg = {}) {
    HCClassification out;
    ValidationReport vr = validateModel(model, cfg.seed);
    if (!vr.ok) {
        out.evidence.push_back("model failed validation: " + vr.failures.front().message);
        return out;
    }
    const RealEquationSystem sys = realSectionSystem(model);
    const RealParamBasis basis = model.basis();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;

    out.singularFiberPoints = detail::findSingularFiberPoints(model, cfg, rng);
    out.evidence.push_back("singular fiber points located: " + std::to_string(out.singularFiberPoints.size()));

    std::vector<std::vector<double>> candidates;
    for (const auto& sp : out.singularFiberPoints) {
        AugmentedSystem aug{&sys, {}, {}};
        aug.addLinear(incidenceMatrix(basis, sp.point.zeta), flattenValues(sp.point.values));
        FiberPoint opposite = sigmaFiber(model, sp.point);
        aug.addLinear(incidenceMatrix(basis, opposite.zeta), flattenValues(opposite.values));
        std::vector<std::vector<double>> sols;
        for (int s = 0; s < cfg.familyStarts; ++s) {
            std::vector<double> x(static_cast<std::size_t>(sys.nvars()));
            for (auto& v : x) v = nd(rng);
            auto nr = gaussNewton(aug, x, cfg.tol);
            if (nr.converged && membership(sys, nr.x, cfg.tol.membership).pass) insertDistinct(sols, nr.x, 1e-3);
        }
        for (const auto& p : sols) {
            candidates.push_back(p);
            SectionFamily fam{sp, p, {}, sys.nvars() - numericRank(aug.jacobian(p), cfg.tol.rank), false};
            if (fam.corank > 0) {
                if (auto q = detail::continueAlongKernel(aug, p, cfg, rng);
                    q && membership(sys, *q, cfg.tol.membership).pass) {
                    fam.continuedMember = *q;
                    fam.certified = true;
                }
            }
            out.families.push_back(fam);
        }
    }
    for (const auto& fam : out.families) {
        if (!fam.certified) continue;
        out.verdict = HCVerdict::WeaklyHypercomplex;
        out.familyDimension = std::max(out.familyDimension.value_or(0), fam.corank);
    }
    if (out.verdict == HCVerdict::WeaklyHypercomplex) {
        out.evidence.push_back("certified positive-dimensional family of real sections through an antipodal pair "
                               "of singular fiber points (dimension " + std::to_string(*out.familyDimension) + ")");
        return out;
    }
    out.evidence.push_back("sections through singular fiber points: " + std::to_string(candidates.size()) +
                           ", none in a certified positive-dimensional family");

    auto samples = sampleSections(sys, cfg.samples, rng, cfg.tol);
    if (samples.empty()) {
        out.evidence.push_back("no real sections could be sampled");
        return out;
    }
    std::vector<std::vector<double>> scanPts = samples;
    scanPts.insert(scanPts.end(), candidates.begin(), candidates.end());
    SingularScanConfig scfg{cfg.tol, cfg.clusterRadius};
    out.singularScan = singularScan(sys, scanPts, scfg);
    bool isolated = true;
    for (const auto& c : out.singularScan.clusters)
        if (c.dimension > 0) isolated = false;
    std::vector<std::vector<double>> regular;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (out.singularScan.ranks[i] == out.singularScan.regularRank) regular.push_back(samples[i]);
    for (const auto& p : regular) {
        for (int z = 0; z < cfg.zetaSamples; ++z) {
            P1Point zeta = P1Point::standard({0.7 * nd(rng), 0.7 * nd(rng)}).canonical();
            ++out.branchTests;
            if (branchTest(model, sys, p, zeta, cfg.tol.rank).verdict == Branching::Branched) ++out.branchedRegular;
        }
        ++out.splittingChecks;
        auto nb = normalSplitting(model, p);
        const bool ones = !nb.degenerate && !nb.splitting.degrees.empty() &&
                          std::all_of(nb.splitting.degrees.begin(), nb.splitting.degrees.end(), [](int c) { return c == 1; });
        if (!ones) ++out.splittingFailures;
    }
    out.evidence.push_back("singular scan: " + std::to_string(out.singularScan.deficient.size()) +
                           " rank-deficient points in " + std::to_string(out.singularScan.clusters.size()) +
                           " clusters, regular rank " + std::to_string(out.singularScan.regularRank));
    out.evidence.push_back("branch tests on regular sections: " + std::to_string(out.branchTests) + ", branched " +
                           std::to_string(out.branchedRegular));
    out.evidence.push_back("normal bundle checks: " + std::to_string(out.splittingChecks) + ", non-O(1) splittings " +
                           std::to_string(out.splittingFailures));
    if (isolated && !regular.empty() && out.branchedRegular == 0 && out.splittingFailures == 0)
        out.verdict = HCVerdict::Hypercomplex;
    return out;
}

// ---------------------------------------------------------------------------
// Components and the symmetric-matrix model of the quadric
// ---------------------------------------------------------------------------

enum class ComponentLabel { Plus, Minus, Boundary };

inline std::string toString(ComponentLabel l) {
    switch (l) {
    case ComponentLabel::Plus: return "+1";
    case ComponentLabel::Minus: return "-1";
    default: return "boundary";
    }
}

/// Sign s with |x0| - |x2| = s r. Boundary when r = 0 and |x0| = |x2|.
inline ComponentLabel componentLabel(const QuadricParams<double>& p, double tol = 1e-9) {
    double n2 = 0.0;
    for (double v : p.flat()) n2 += v * v;
    if (n2 == 0.0) throw OriginError("the origin lies on both components");
    const double scale = tol * (1.0 + std::sqrt(n2));
    const double d = abs(p.x0) - abs(p.x2);
    if (std::abs(d) <= scale && std::abs(p.r) <= scale) return ComponentLabel::Boundary;
    if (std::abs(d - p.r) <= scale) return ComponentLabel::Plus;
    if (std::abs(d + p.r) <= scale) return ComponentLabel::Minus;
    throw ModelError("|x0| - |x2| != +-r: point is not on the quadric section space");
}

inline ComponentLabel componentLabel(const QuadricParams<Rational>& p) {
    if (p.flat() == std::vector<Rational>(9, Rational(0))) throw OriginError("the origin lies on both components");
    const Rational d = realSqrt(p.x0.norm2()) - realSqrt(p.x2.norm2());
    if (d == 0 && p.r == 0) return ComponentLabel::Boundary;
    if (d == p.r) return ComponentLabel::Plus;
    if (d == -p.r) return ComponentLabel::Minus;
    throw ModelError("|x0| - |x2| != +-r: point is not on the quadric section space");
}

template <class R>
using Mat4 = std::array<std::array<R, 4>, 4>;

template <class R>
struct MatrixModelPoint {
    Mat4<R> B{};
    R t{};
};

namespace detail {
inline bool nearlyEqual(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool nearlyEqual(const Rational& a, const Rational& b, double) { return a == b; }
} // namespace detail

/// Recovers the rank-one matrix A = s q q^T from a quadric real section:
/// diagonal entries from |x0| +- Re x0 and |x2| +- Re x2, the products q0 q1,
/// q2 q3 from Im x0, Im x2, and the mixed products from ab = z0 and
/// a conj(b) = -s x1 / 2. Returns B = A - (t/4) Id with t = tr A.
template <class R>
MatrixModelPoint<R> symMatrixModel(const QuadricParams<R>& p, int s, double tol = 1e-9) {
    if (s != 1 && s != -1) throw ModelError("component sign must be +1 or -1");
    const R ax0 = realSqrt(p.x0.norm2()), ax2 = realSqrt(p.x2.norm2());
    const R two(2), four(4);
    Mat4<R> P{};
    P[0][0] = (ax0 + p.x0.re) / two;
    P[1][1] = (ax0 - p.x0.re) / two;
    P[2][2] = (ax2 + p.x2.re) / two;
    P[3][3] = (ax2 - p.x2.re) / two;
    P[0][1] = p.x0.im / two;
    P[2][3] = -p.x2.im / two;
    const Complex<R> ab = p.z0;
    const Complex<R> abbar = Complex<R>(R(-s)) * p.x1 / Complex<R>(two);
    P[0][2] = (ab.re + abbar.re) / two;
    P[1][3] = (abbar.re - ab.re) / two;
    P[0][3] = (ab.im - abbar.im) / two;
    P[1][2] = (ab.im + abbar.im) / two;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) P[i][j] = P[j][i];
    double scale = 0.0;
    if constexpr (std::is_same_v<R, double>) scale = tol * std::max(1.0, (ax0 + ax2) * (ax0 + ax2));
    if (!detail::nearlyEqual(R(s) * (ax0 - ax2), p.r, tol * (1.0 + toDouble(ax0 + ax2))))
        throw ModelError("r is inconsistent with the requested component sign");
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (!detail::nearlyEqual(P[i][j] * P[i][j], P[i][i] * P[j][j], scale))
                throw ModelError("recovered products are not those of a rank-one matrix");
    MatrixModelPoint<R> out;
    out.t = R(s) * (ax0 + ax2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.B[i][j] = R(s) * P[i][j] - (i == j ? out.t / four : R(0));
    return out;
}

template <class R>
Mat4<R> matMul(const Mat4<R>& a, const Mat4<R>& b) {
    Mat4<R> c{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

template <class R>
Mat4<R> shifted(const Mat4<R>& a, const R& s) {
    Mat4<R> c = a;
    for (int i = 0; i < 4; ++i) c[i][i] += s;
    return c;
}

template <class R>
R frobenius2(const Mat4<R>& a) {
    R s(0);
    for (const auto& row : a)
        for (const auto& v : row) s += v * v;
    return s;
}

template <class R>
R trace(const Mat4<R>& a) {
    return a[0][0] + a[1][1] + a[2][2] + a[3][3];
}

template <class R>
int rank4(const Mat4<R>& a) {
    DenseMatrix<R> m(4, std::vector<R>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = a[i][j];
    if constexpr (std::is_same_v<R, Rational>) return exactRank(m);
    else {
        Eigen::Matrix4d e;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) e(i, j) = a[i][j];
        return numericRank(e);
    }
}

/// Residuals of candidate quadratic identities in (B, t) for a point of the
/// matrix model. Squared Frobenius norms are exact in rational arithmetic.
template <class R>
struct MatrixIdentityReport {
    int rankA = 0;
    R traceB{};
    R t{};
    R displayedResidual2{};  // |B (B + t/4)|^2
    R oracleResidual2{};     // |(B + t/4)(B - 3t/4)|^2
    R predictedDisplayed2{}; // (3t/4)^2 |A|^2
};

template <class R>
MatrixIdentityReport<R> matrixIdentities(const Mat4<R>& B, const R& t) {
    MatrixIdentityReport<R> rep;
    const R four(4), three(3);
    Mat4<R> A = shifted(B, R(t / four));
    rep.rankA = rank4(A);
    rep.traceB = trace(B);
    rep.t = t;
    rep.displayedResidual2 = frobenius2(matMul(B, A));
    rep.oracleResidual2 = frobenius2(matMul(A, shifted(B, R(-three * t / four))));
    const R k = three * t / four;
    rep.predictedDisplayed2 = k * k * frobenius2(A);
    return rep;
}

/// Independent route: A = q q^T, t = tr A, B = A - (t/4) Id.
template <class R>
MatrixIdentityReport<R> matrixModelOracle(const std::array<R, 4>& q) {
    Mat4<R> A{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) A[i][j] = q[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
    const R t = trace(A);
    return matrixIdentities(shifted(A, R(-t / R(4))), t);
}

} // namespace twistor
