#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "mpoly.hpp"
#include "p1.hpp"
#include "scalar.hpp"

namespace twistor {

/// Polynomial in the fiber coordinates u_1..u_m whose coefficients are
/// sections of line bundles in zeta. Along a section the whole expression is
/// a section of O(twist); each monomial prod u_i^e_i carries a zeta
/// coefficient of degree bound twist - sum e_i k_i.
struct FiberEquation {
    using Exponents = std::vector<int>;
    int twist = 0;
    std::map<Exponents, CoeffPoly<Rational>> terms;

    void addTerm(const Exponents& e, const CoeffPoly<Rational>& g) {
        auto it = terms.find(e);
        if (it == terms.end()) {
            if (!g.isZero()) terms.emplace(e, g);
            return;
        }
        it->second = it->second + g;
        if (it->second.isZero()) terms.erase(it);
    }

    friend bool operator==(const FiberEquation&, const FiberEquation&) = default;

    /// Value at a fiber point given in the chart of zeta (standard or infinity).
    Cd eval(const P1Point& zeta, const std::vector<Cd>& u) const {
        Cd acc{};
        for (const auto& [e, g] : terms) {
            Cd mono = evalAt(g, zeta);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) mono *= u[i];
            acc += mono;
        }
        return acc;
    }

    /// Gradient with respect to u (chart of zeta), followed by the derivative
    /// with respect to the chart coordinate of zeta.
    std::vector<Cd> gradient(const P1Point& zeta, const std::vector<Cd>& u) const {
        const std::size_t m = u.size();
        std::vector<Cd> grad(m + 1);
        for (const auto& [e, g] : terms) {
            CoeffPoly<double> gd = toDoublePoly(g);
            Cd gv = evalAt(g, zeta);
            // d/d(chart coordinate) of the zeta coefficient
            Cd dg{};
            const int kb = gd.degreeBound;
            const Cd z = zeta.value;
            if (zeta.chart == Chart::Standard) {
                Cd p{1.0};
                for (int j = 1; j <= kb; ++j) {
                    dg += gd[j] * Cd(double(j)) * p;
                    p *= z;
                }
            } else {
                // infinity chart polynomial has coefficient of zt^(kb-j) equal to g_j
                Cd p{1.0};
                for (int pw = 1; pw <= kb; ++pw) {
                    dg += gd[kb - pw] * Cd(double(pw)) * p;
                    p *= z;
                }
            }
            Cd mono{1.0};
            for (std::size_t i = 0; i < m; ++i)
                for (int k = 0; k < e[i]; ++k) mono *= u[i];
            grad[m] += dg * mono;
            for (std::size_t i = 0; i < m; ++i) {
                if (e[i] == 0) continue;
                Cd d = gv * Cd(double(e[i]));
                for (std::size_t l = 0; l < m; ++l) {
                    const int pw = l == i ? e[l] - 1 : e[l];
                    for (int k = 0; k < pw; ++k) d *= u[l];
                }
                grad[i] += d;
            }
        }
        return grad;
    }

    /// dF/du_i as a fiber equation of twist (twist - k_i).
    FiberEquation derivative(int i, int ki) const {
        FiberEquation d;
        d.twist = twist - ki;
        for (const auto& [e, g] : terms) {
            const int p = e[static_cast<std::size_t>(i)];
            if (p == 0) continue;
            Exponents f = e;
            f[static_cast<std::size_t>(i)] = p - 1;
            CoeffPoly<Rational> h = g;
            for (auto& c : h.coeffs) c *= Cq(Rational(p));
            d.addTerm(f, h);
        }
        return d;
    }
};

/// Twistor model: bundle (+)O(k_i) over P^1, fiber equations, real structure,
/// and optional extra component equations on the real section parameters.
struct TwistorModel {
    std::string name;
    std::vector<std::string> coordNames;
    std::vector<int> degrees;
    std::vector<FiberEquation> equations;
    std::vector<SigmaCoordRule> sigmaRules;
    /// Complex polynomials in the real section parameters (order as in
    /// realityFixedSpace); each contributes its real and imaginary parts.
    std::vector<MPoly<Rational>> componentEquations;
    std::vector<std::string> paramNames;

    int coordCount() const { return static_cast<int>(degrees.size()); }

    RealParamBasis basis() const {
        RealParamBasis b = realityFixedSpace(degrees, sigmaRules, coordNames);
        if (paramNames.size() == static_cast<std::size_t>(b.paramCount)) b.names = paramNames;
        return b;
    }
};

/// Same bundle, equations and real structure (names and component equations ignored).
inline bool sameStructure(const TwistorModel& a, const TwistorModel& b) {
    return a.degrees == b.degrees && a.equations == b.equations && a.sigmaRules == b.sigmaRules;
}

// ---------------------------------------------------------------------------
// Real sections
// ---------------------------------------------------------------------------

/// Real parameter vector of a real section, with its model's parameter names.
template <class R>
struct RealSectionParam {
    std::vector<R> values;
    std::vector<std::string> names;
};

/// Generic real section: coefficient j of coordinate i as a linear polynomial
/// in the real parameters.
inline std::vector<std::vector<MPoly<Rational>>> genericSection(const RealParamBasis& b) {
    std::vector<std::vector<MPoly<Rational>>> out(b.embedding.size());
    for (std::size_t i = 0; i < b.embedding.size(); ++i)
        for (const auto& terms : b.embedding[i]) {
            MPoly<Rational> p(b.paramCount);
            for (const auto& t : terms) p += MPoly<Rational>::variable(b.paramCount, t.param, t.factor);
            out[i].push_back(std::move(p));
        }
    return out;
}

/// The quadric model's parameters (x0, x1, x2, z0 complex; r real).
template <class R>
struct QuadricParams {
    Complex<R> x0, x1, x2, z0;
    R r{};

    std::vector<R> flat() const { return {x0.re, x0.im, x1.re, x1.im, x2.re, x2.im, z0.re, z0.im, r}; }
    static QuadricParams fromFlat(const std::vector<R>& p) {
        if (p.size() != 9) throw DimensionError("quadric parameters have 9 real components");
        return {{p[0], p[1]}, {p[2], p[3]}, {p[4], p[5]}, {p[6], p[7]}, p[8]};
    }
    /// Real-valued shorthand (x0, x1, x2, z0, r) as used in examples.
    static QuadricParams real5(R x0, R x1, R x2, R z0, R r) {
        return {Complex<R>(x0), Complex<R>(x1), Complex<R>(x2), Complex<R>(z0), r};
    }
    friend bool operator==(const QuadricParams&, const QuadricParams&) = default;
};

enum class SquaringVariant { Minus, Plus };

/// Real section (a(zeta)^2, b(zeta)^2, a(zeta) b(zeta)) of the quadric model,
/// where (a(zeta), b(zeta)) = (a - conj(b) zeta, b + conj(a) zeta) for Minus and
/// (a + conj(b) zeta, b - conj(a) zeta) for Plus.
template <class R>
QuadricParams<R> squaringSection(const Complex<R>& a, const Complex<R>& b, SquaringVariant v) {
    const Complex<R> s = v == SquaringVariant::Minus ? Complex<R>(R(1)) : Complex<R>(R(-1));
    CoeffPoly<R> A(1, {a, -s * b.conj()});
    CoeffPoly<R> B(1, {b, s * a.conj()});
    CoeffPoly<R> x = A * A, z = A * B;
    return {x[0], x[1], x[2], z[0], z[1].re};
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {
inline CoeffPoly<Rational> rconst(long v) { return CoeffPoly<Rational>::constant(Cq(Rational(v))); }
inline std::vector<SigmaCoordRule> quadricRules() { return {{1, 1, 2}, {0, 1, 2}, {2, -1, 2}}; }
inline FiberEquation quadricEquation() {
    FiberEquation f;
    f.twist = 4;
    f.addTerm({1, 1, 0}, rconst(1));
    f.addTerm({0, 0, 2}, rconst(-1));
    return f;
}
} // namespace detail

inline const std::vector<std::string>& quadricParamNames() {
    static const std::vector<std::string> names{"re(x0)", "im(x0)", "re(x1)", "im(x1)", "re(x2)",
                                                "im(x2)", "re(z0)", "im(z0)", "r"};
    return names;
}

/// Hypersurface xy = z^2 in O(2)^3 with real structure
/// (x, y, z) -> (conj y, conj x, -conj z) / conj(zeta)^2 and the double-zero
/// component equation x1^2 - 4 x0 x2 = 0.
inline TwistorModel buildQuadric() {
    TwistorModel m;
    m.name = "quadric";
    m.coordNames = {"x", "y", "z"};
    m.degrees = {2, 2, 2};
    m.equations = {detail::quadricEquation()};
    m.sigmaRules = detail::quadricRules();
    m.paramNames = quadricParamNames();
    auto sec = genericSection(m.basis());
    const auto& x = sec[0];
    m.componentEquations = {x[1] * x[1] - Cq(Rational(4)) * x[0] * x[2]};
    return m;
}

enum class RealityType { TauReal, TauAntireal };

/// xy = z^2 + lambda^2 with lambda a section of O(2) that is fixed (TauReal)
/// or negated (TauAntireal) by the z-coordinate real structure.
inline TwistorModel buildDeformed(const CoeffPoly<Rational>& lambda, RealityType type) {
    if (lambda.degreeBound != 2) throw DegreeError("lambda must be a section of O(2)");
    if (lambda.isZero()) throw RealityError("lambda must be nonzero");
    const SigmaCoordRule zRule{2, -1, 2};
    CoeffPoly<Rational> t = tauPullback(lambda, zRule);
    const bool ok = type == RealityType::TauReal ? t == lambda : t == -lambda;
    if (!ok)
        throw RealityError(std::string("lambda is not tau-") + (type == RealityType::TauReal ? "real" : "antireal"));
    TwistorModel m;
    m.name = "deformed";
    m.coordNames = {"x", "y", "z"};
    m.degrees = {2, 2, 2};
    FiberEquation f = detail::quadricEquation();
    f.addTerm({0, 0, 0}, -(lambda * lambda));
    m.equations = {f};
    m.sigmaRules = detail::quadricRules();
    m.paramNames = quadricParamNames();
    return m;
}

/// Total space of O(1) + O(1) with the quaternionic real structure; real
/// sections are (a - conj(b) zeta, b + conj(a) zeta).
inline TwistorModel buildSmoothO11() {
    TwistorModel m;
    m.name = "smooth-O11";
    m.coordNames = {"a", "b"};
    m.degrees = {1, 1};
    m.sigmaRules = {{1, -1, 1}, {0, 1, 1}};
    return m;
}

/// Weighted-homogeneous polynomial with constant coefficients.
using ConePolynomial = std::map<std::vector<int>, Cq>;

/// Twistor model of a weighted cone obtained by gluing two copies of
/// C x M via (zeta~, m~) = (1/zeta, zeta^-l . m): coordinate i becomes a
/// section of O(l w_i) and each equation a section of O(l * weighted degree).
inline TwistorModel glueConeTwistor(const std::vector<ConePolynomial>& equations, const std::vector<int>& weights,
                                   int l, std::vector<SigmaCoordRule> rules,
                                   const std::vector<std::string>& coordNames = {}) {
    if (l != 1 && l != 2) throw WeightError("gluing exponent l must be 1 or 2");
    for (int w : weights)
        if (w <= 0) throw WeightError("weights must be positive");
    TwistorModel m;
    m.name = "cone(l=" + std::to_string(l) + ")";
    m.coordNames = coordNames;
    for (int w : weights) m.degrees.push_back(l * w);
    for (const auto& eq : equations) {
        std::optional<int> wdeg;
        FiberEquation f;
        for (const auto& [e, c] : eq) {
            if (e.size() != weights.size()) throw WeightError("monomial arity differs from weight count");
            int d = 0;
            for (std::size_t i = 0; i < e.size(); ++i) d += e[i] * weights[i];
            if (wdeg && *wdeg != d) throw WeightError("equation is not weighted-homogeneous");
            wdeg = d;
            f.addTerm(e, CoeffPoly<Rational>::constant(c));
        }
        if (!wdeg) continue;
        f.twist = l * *wdeg;
        m.equations.push_back(std::move(f));
    }
    if (rules.size() != weights.size()) throw NonInvolutiveError("rule count differs from coordinate count");
    for (auto& r : rules) {
        if (r.targetIndex < 0 || r.targetIndex >= static_cast<int>(weights.size()))
            throw NonInvolutiveError("rule target out of range");
        r.twist = m.degrees[static_cast<std::size_t>(r.targetIndex)];
    }
    if (auto why = ruleParityFailure(m.degrees, rules); !why.empty()) throw NonInvolutiveError(why);
    m.sigmaRules = std::move(rules);
    return m;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationFailure {
    std::string kind;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationFailure> failures;
    std::vector<std::string> notes;
    /// Per equation: +1/-1 such that F(sigma(zeta,u)) = sign * conj(F(zeta,u)) / conj(zeta)^d.
    std::vector<int> equationSigns;
    std::optional<int> fiberDimension;

    void fail(std::string kind, std::string msg) {
        ok = false;
        failures.push_back({std::move(kind), std::move(msg)});
    }
};

/// Image of an equation under the real structure, normalised so that a
/// sigma-compatible equation F satisfies sigmaTransform(F) = +-F.
inline FiberEquation sigmaTransform(const FiberEquation& f, const std::vector<SigmaCoordRule>& rules) {
    FiberEquation out;
    out.twist = f.twist;
    for (const auto& [e, g] : f.terms) {
        std::vector<int> e2(e.size(), 0);
        int sign = 1;
        for (std::size_t i = 0; i < e.size(); ++i) {
            e2[static_cast<std::size_t>(rules[i].targetIndex)] += e[i];
            if (rules[i].sign < 0 && e[i] % 2 != 0) sign = -sign;
        }
        out.addTerm(e2, tauPullback(g, SigmaCoordRule{0, sign, g.degreeBound}));
    }
    return out;
}

namespace detail {

/// Complex Gauss-Newton projection onto the fiber {F_i(zeta, u) = 0}.
inline std::optional<std::vector<Cd>> projectToFiber(const std::vector<FiberEquation>& eqs, const P1Point& zeta,
                                                    std::vector<Cd> u) {
    const auto m = static_cast<Eigen::Index>(u.size());
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXcd F(static_cast<Eigen::Index>(eqs.size()));
        Eigen::MatrixXcd J(static_cast<Eigen::Index>(eqs.size()), m);
        for (std::size_t k = 0; k < eqs.size(); ++k) {
            F(static_cast<Eigen::Index>(k)) = toStd(eqs[k].eval(zeta, u));
            auto g = eqs[k].gradient(zeta, u);
            for (Eigen::Index i = 0; i < m; ++i) J(static_cast<Eigen::Index>(k), i) = toStd(g[static_cast<std::size_t>(i)]);
        }
        if (F.norm() < 1e-13) return u;
        Eigen::VectorXcd step = J.completeOrthogonalDecomposition().solve(F);
        for (Eigen::Index i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] -= fromStd(step(i));
    }
    return std::nullopt;
}

} // namespace detail

/// Structural checks of a model: real-structure parity, sigma-compatibility of
/// every equation (exact), twist consistency, and constancy of the generic
/// fiber dimension. Never throws; failures are collected in the report.
inline ValidationReport validateModel(const TwistorModel& model, std::uint64_t seed = 1) {
    ValidationReport rep;
    const int m = model.coordCount();
    if (model.coordNames.size() > static_cast<std::size_t>(m)) rep.fail("ModelError", "more coordinate names than coordinates");
    if (auto why = ruleParityFailure(model.degrees, model.sigmaRules); !why.empty()) {
        rep.fail("NonInvolutiveError", why);
        return rep;
    }
    bool twistsOk = true;
    for (std::size_t q = 0; q < model.equations.size(); ++q) {
        const auto& f = model.equations[q];
        for (const auto& [e, g] : f.terms) {
            if (static_cast<int>(e.size()) != m) {
                rep.fail("DegreeError", "equation " + std::to_string(q) + ": monomial arity differs from coordinate count");
                twistsOk = false;
                continue;
            }
            int w = 0;
            for (int i = 0; i < m; ++i) w += e[static_cast<std::size_t>(i)] * model.degrees[static_cast<std::size_t>(i)];
            if (g.degreeBound != f.twist - w) {
                rep.fail("DegreeError", "equation " + std::to_string(q) + ": zeta coefficient degree bound " +
                                            std::to_string(g.degreeBound) + " != twist - weight " +
                                            std::to_string(f.twist - w));
                twistsOk = false;
            }
        }
    }
    if (!twistsOk) return rep;
    for (std::size_t q = 0; q < model.equations.size(); ++q) {
        const auto& f = model.equations[q];
        FiberEquation t = sigmaTransform(f, model.sigmaRules);
        FiberEquation neg;
        neg.twist = f.twist;
        for (const auto& [e, g] : f.terms) neg.addTerm(e, -g);
        if (t == f) rep.equationSigns.push_back(1);
        else if (t == neg) rep.equationSigns.push_back(-1);
        else {
            rep.equationSigns.push_back(0);
            rep.fail("RealityError", "equation " + std::to_string(q) + " is not preserved by the real structure");
        }
    }
    try {
        auto b = model.basis();
        if (!model.componentEquations.empty())
            for (const auto& c : model.componentEquations)
                if (c.nvars() != b.paramCount && !c.isZero())
                    rep.fail("DimensionError", "component equation variable count differs from parameter count");
    } catch (const Error& e) {
        rep.fail("ModelError", e.what());
    }
    const bool referenceQuadric =
        model.degrees == std::vector<int>{2, 2, 2} && model.equations.size() == 1 &&
        model.equations[0] == detail::quadricEquation();
    if (referenceQuadric && model.sigmaRules != detail::quadricRules())
        rep.notes.push_back("real structure differs from the reference quadric convention "
                            "(x<->y swap with sign +1, z self-paired with sign -1)");

    // Generic fiber dimension from the fiber Jacobian at projected random points.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::optional<int> dim;
    bool constant = true;
    if (model.equations.empty()) dim = m;
    for (int s = 0; s < 6 && !model.equations.empty(); ++s) {
        P1Point z = P1Point::standard({0.5 * nd(rng), 0.5 * nd(rng)}).canonical();
        std::vector<Cd> u;
        for (int i = 0; i < m; ++i) u.push_back({nd(rng), nd(rng)});
        auto proj = detail::projectToFiber(model.equations, z, u);
        if (!proj) continue;
        Eigen::MatrixXcd J(static_cast<Eigen::Index>(model.equations.size()), m);
        for (std::size_t k = 0; k < model.equations.size(); ++k) {
            auto g = model.equations[k].gradient(z, *proj);
            for (int i = 0; i < m; ++i) J(static_cast<Eigen::Index>(k), i) = toStd(g[static_cast<std::size_t>(i)]);
        }
        int d = m - numericRank(J);
        if (dim && *dim != d) constant = false;
        dim = dim ? std::min(*dim, d) : d;
    }
    if (!dim) rep.fail("FiberError", "could not locate generic fiber points");
    else if (!constant) rep.fail("FiberError", "generic fiber dimension is not constant");
    rep.fiberDimension = dim;
    return rep;
}

// ---------------------------------------------------------------------------
// Real section systems
// ---------------------------------------------------------------------------

/// Real polynomial system on the real section parameters, with analytic
/// Jacobian. Polynomials are stored exactly; double evaluation uses a
/// converted copy.
class RealEquationSystem {
public:
    RealEquationSystem() = default;
    RealEquationSystem(int nvars, std::vector<std::string> varNames)
        : nvars_(nvars), varNames_(std::move(varNames)) {}

    void addEquation(const MPoly<Rational>& p, std::string label) {
        if (!p.isReal()) throw ModelError("real system equations must have real coefficients");
        if (!p.isZero() && p.nvars() != nvars_) throw DimensionError("equation variable count mismatch");
        MPoly<Rational> q = p.isZero() ? MPoly<Rational>(nvars_) : p;
        std::vector<MPoly<Rational>> grad;
        std::vector<MPoly<double>> gradD;
        for (int v = 0; v < nvars_; ++v) {
            grad.push_back(q.derivative(v));
            gradD.push_back(toDoubleMPoly(grad.back()));
        }
        exact_.push_back(q);
        approx_.push_back(toDoubleMPoly(q));
        jac_.push_back(std::move(grad));
        jacD_.push_back(std::move(gradD));
        labels_.push_back(std::move(label));
    }

    int nvars() const { return nvars_; }
    int size() const { return static_cast<int>(exact_.size()); }
    bool empty() const { return exact_.empty(); }
    const std::vector<MPoly<Rational>>& equations() const { return exact_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::string>& varNames() const { return varNames_; }
    std::optional<int> expectedRegularRank;

    Eigen::VectorXd residuals(const std::vector<double>& x) const {
        check(x.size());
        Eigen::VectorXd r(size());
        for (int i = 0; i < size(); ++i) r(i) = approx_[static_cast<std::size_t>(i)].eval(x).re;
        return r;
    }
    std::vector<Rational> residuals(const std::vector<Rational>& x) const {
        check(x.size());
        std::vector<Rational> r;
        for (const auto& p : exact_) r.push_back(p.eval(x).re);
        return r;
    }
    Eigen::MatrixXd jacobian(const std::vector<double>& x) const {
        check(x.size());
        Eigen::MatrixXd J(size(), nvars_);
        for (int i = 0; i < size(); ++i)
            for (int v = 0; v < nvars_; ++v)
                J(i, v) = jacD_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)].eval(x).re;
        return J;
    }
    DenseMatrix<Rational> jacobian(const std::vector<Rational>& x) const {
        check(x.size());
        DenseMatrix<Rational> J(static_cast<std::size_t>(size()), std::vector<Rational>(static_cast<std::size_t>(nvars_)));
        for (std::size_t i = 0; i < exact_.size(); ++i)
            for (int v = 0; v < nvars_; ++v) J[i][static_cast<std::size_t>(v)] = jac_[i][static_cast<std::size_t>(v)].eval(x).re;
        return J;
    }
    /// Second derivatives d/dx_k of the Jacobian entries (for stratum tangents).
    Eigen::MatrixXd jacobianDerivative(const std::vector<double>& x, int k) const {
        Eigen::MatrixXd D(size(), nvars_);
        for (int i = 0; i < size(); ++i)
            for (int v = 0; v < nvars_; ++v)
                D(i, v) = toDoubleMPoly(jac_[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)].derivative(k)).eval(x).re;
        return D;
    }

private:
    void check(std::size_t n) const {
        if (static_cast<int>(n) != nvars_)
            throw DimensionError("system in " + std::to_string(nvars_) + " unknowns evaluated at " + std::to_string(n) + " values");
    }

    int nvars_ = 0;
    std::vector<std::string> varNames_;
    std::vector<MPoly<Rational>> exact_;
    std::vector<MPoly<double>> approx_;
    std::vector<std::vector<MPoly<Rational>>> jac_;
    std::vector<std::vector<MPoly<double>>> jacD_;
    std::vector<std::string> labels_;
};

/// Coefficients (in zeta) of F(zeta, s(zeta)) for the generic real section s.
inline std::vector<MPoly<Rational>> substituteGenericSection(const FiberEquation& f,
                                                            const std::vector<std::vector<MPoly<Rational>>>& sec,
                                                            int nvars) {
    using UPoly = std::vector<MPoly<Rational>>;
    auto mul = [&](const UPoly& a, const UPoly& b) {
        UPoly r(a.size() + b.size() - 1, MPoly<Rational>(nvars));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        return r;
    };
    UPoly total(static_cast<std::size_t>(f.twist + 1), MPoly<Rational>(nvars));
    for (const auto& [e, g] : f.terms) {
        UPoly acc;
        for (const auto& c : g.coeffs) acc.push_back(MPoly<Rational>::constant(nvars, c));
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) acc = mul(acc, sec[i]);
        for (std::size_t j = 0; j < acc.size() && j < total.size(); ++j) total[j] += acc[j];
    }
    return total;
}

/// Real polynomial system cut out on the real section parameters: for each
/// equation of twist d, the real and imaginary parts of the zeta-coefficients
/// c_0 .. c_(ceil(d/2)-1) and, for even d, the one non-redundant part of the
/// middle coefficient; then real and imaginary parts of every component
/// equation. Conjugate symmetry makes the remaining coefficients redundant.
inline RealEquationSystem realSectionSystem(const TwistorModel& model) {
    ValidationReport rep = validateModel(model);
    if (!rep.ok) throw ModelError("model failed validation: " + rep.failures.front().message);
    RealParamBasis b = model.basis();
    const int n = b.paramCount;
    RealEquationSystem sys(n, b.names);
    auto sec = genericSection(b);
    for (std::size_t q = 0; q < model.equations.size(); ++q) {
        const auto& f = model.equations[q];
        auto c = substituteGenericSection(f, sec, n);
        const int d = f.twist;
        const std::string tag = "eq" + std::to_string(q) + ":c";
        for (int j = 0; j < (d + 1) / 2; ++j) {
            sys.addEquation(c[static_cast<std::size_t>(j)].realPart(), tag + std::to_string(j) + ":re");
            sys.addEquation(c[static_cast<std::size_t>(j)].imagPart(), tag + std::to_string(j) + ":im");
        }
        if (d % 2 == 0) {
            const int mid = d / 2;
            const bool realMiddle = (mid % 2 == 0) == (rep.equationSigns[q] > 0);
            const auto& cm = c[static_cast<std::size_t>(mid)];
            if (realMiddle) sys.addEquation(cm.realPart(), tag + std::to_string(mid) + ":re");
            else sys.addEquation(cm.imagPart(), tag + std::to_string(mid) + ":im");
        }
    }
    for (std::size_t q = 0; q < model.componentEquations.size(); ++q) {
        const auto& p = model.componentEquations[q];
        sys.addEquation(p.realPart(), "comp" + std::to_string(q) + ":re");
        sys.addEquation(p.imagPart(), "comp" + std::to_string(q) + ":im");
    }
    return sys;
}

/// Embedded coefficients of the real section with the given parameters.
template <class R>
std::vector<CoeffPoly<R>> embedSection(const TwistorModel& model, const std::vector<R>& params) {
    return model.basis().embed(params);
}

} // namespace twistor
