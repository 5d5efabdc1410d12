#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "scalar.hpp"

namespace twistor {

// ---------------------------------------------------------------------------
// Points of the projective line
// ---------------------------------------------------------------------------

enum class Chart { Standard, Infinity };

/// A point of P^1 given by an affine coordinate in one of the two charts.
/// In the standard chart the value is zeta, in the infinity chart it is
/// 1/zeta.
struct P1Point {
    Chart chart = Chart::Standard;
    Cd value{};

    static P1Point standard(Cd v) { return {Chart::Standard, v}; }
    static P1Point infinity(Cd v = {}) { return {Chart::Infinity, v}; }

    bool isInfinity() const { return chart == Chart::Infinity && value.norm2() == 0.0; }

    /// Same point expressed in the chart where |value| <= 1.
    P1Point canonical() const {
        if (abs(value) <= 1.0) return *this;
        Cd inv = Cd{1.0} / value;
        return {chart == Chart::Standard ? Chart::Infinity : Chart::Standard, inv};
    }

    /// Value in the requested chart. Throws at the one point not covered.
    Cd in(Chart c) const {
        if (c == chart) return value;
        if (value.norm2() == 0.0) throw DimensionError("point not covered by requested chart");
        return Cd{1.0} / value;
    }

    /// Unit-norm homogeneous coordinates [w0 : w1] with zeta = w1 / w0.
    std::pair<Cd, Cd> homogeneous() const {
        double n = std::sqrt(1.0 + value.norm2());
        Cd a{1.0 / n}, b = value * Cd{1.0 / n};
        return chart == Chart::Standard ? std::pair{a, b} : std::pair{b, a};
    }

    /// Chordal distance between two points (0 when equal, at most 1).
    friend double chordal(const P1Point& p, const P1Point& q) {
        auto [a0, a1] = p.homogeneous();
        auto [b0, b1] = q.homogeneous();
        return abs(a0 * b1 - a1 * b0);
    }
};

/// zeta -> -1/conj(zeta). Fixed-point free involution; implemented as a chart
/// swap so that no division occurs.
inline P1Point antipodal(const P1Point& p) {
    Cd v = -p.value.conj();
    return {p.chart == Chart::Standard ? Chart::Infinity : Chart::Standard, v};
}

// ---------------------------------------------------------------------------
// Sections of O(k)
// ---------------------------------------------------------------------------

/// A section of O(k): polynomial of degree <= k in the standard chart,
/// coefficient of zeta^j at index j. degreeBound == -1 encodes the zero
/// section of a negative-degree bundle.
template <class R>
struct CoeffPoly {
    int degreeBound = 0;
    std::vector<Complex<R>> coeffs;

    CoeffPoly() : coeffs(1) {}
    explicit CoeffPoly(int k) : degreeBound(k), coeffs(static_cast<std::size_t>(std::max(k + 1, 0))) {}
    CoeffPoly(int k, std::vector<Complex<R>> c) : degreeBound(k), coeffs(std::move(c)) {
        if (static_cast<int>(coeffs.size()) != std::max(k + 1, 0))
            throw DegreeError("coefficient vector length does not match degree bound");
    }

    static CoeffPoly constant(Complex<R> c, int k = 0) {
        CoeffPoly p(k);
        p.coeffs[0] = std::move(c);
        return p;
    }

    const Complex<R>& operator[](int j) const { return coeffs[static_cast<std::size_t>(j)]; }
    Complex<R>& operator[](int j) { return coeffs[static_cast<std::size_t>(j)]; }

    bool isZero(double tol = 0.0) const {
        return std::all_of(coeffs.begin(), coeffs.end(), [&](const auto& c) { return twistor::isZero(c, tol); });
    }

    Complex<R> eval(const Complex<R>& z) const {
        Complex<R> acc{};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// Value in the infinity chart: zt^k * s(1/zt).
    Complex<R> evalInfinity(const Complex<R>& zt) const {
        Complex<R> acc{};
        for (const auto& c : coeffs) acc = acc * zt + c;
        return acc;
    }

    friend bool operator==(const CoeffPoly& a, const CoeffPoly& b) {
        return a.degreeBound == b.degreeBound && a.coeffs == b.coeffs;
    }

    friend CoeffPoly operator+(const CoeffPoly& a, const CoeffPoly& b) {
        if (a.degreeBound != b.degreeBound) throw DegreeError("adding sections of different bundles");
        CoeffPoly r = a;
        for (std::size_t j = 0; j < r.coeffs.size(); ++j) r.coeffs[j] += b.coeffs[j];
        return r;
    }
    friend CoeffPoly operator-(const CoeffPoly& a) {
        CoeffPoly r = a;
        for (auto& c : r.coeffs) c = -c;
        return r;
    }
    friend CoeffPoly operator*(const CoeffPoly& a, const CoeffPoly& b) {
        if (a.degreeBound < 0 || b.degreeBound < 0) return CoeffPoly(std::max(-1, a.degreeBound + b.degreeBound));
        CoeffPoly r(a.degreeBound + b.degreeBound);
        for (int i = 0; i <= a.degreeBound; ++i)
            for (int j = 0; j <= b.degreeBound; ++j) r[i + j] += a[i] * b[j];
        return r;
    }
};

inline CoeffPoly<double> toDoublePoly(const CoeffPoly<double>& s) { return s; }
inline CoeffPoly<double> toDoublePoly(const CoeffPoly<Rational>& s) {
    CoeffPoly<double> r(s.degreeBound);
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) r.coeffs[j] = toDouble(s.coeffs[j]);
    return r;
}

template <class R>
Cd evalAt(const CoeffPoly<R>& s, const P1Point& p) {
    CoeffPoly<double> d = toDoublePoly(s);
    return p.chart == Chart::Standard ? d.eval(p.value) : d.evalInfinity(p.value);
}

template <class R>
CoeffPoly<R> fromRationalPoly(const CoeffPoly<Rational>& s) {
    CoeffPoly<R> r(s.degreeBound);
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) r.coeffs[j] = fromRational<R>(s.coeffs[j]);
    return r;
}

/// Pullback of an O(k) section along the Moebius map zeta -> (a zeta + b)/(c zeta + d):
/// s'(zeta) = sum_j s_j (a zeta + b)^j (c zeta + d)^(k-j).
template <class R>
CoeffPoly<R> moebiusPullback(const CoeffPoly<R>& s, const Complex<R>& a, const Complex<R>& b,
                             const Complex<R>& c, const Complex<R>& d) {
    const int k = s.degreeBound;
    CoeffPoly<R> out(k);
    if (k < 0) return out;
    CoeffPoly<R> num(1, {b, a}), den(1, {d, c});
    std::vector<CoeffPoly<R>> numPow{CoeffPoly<R>::constant(Complex<R>(R(1)))};
    std::vector<CoeffPoly<R>> denPow{CoeffPoly<R>::constant(Complex<R>(R(1)))};
    for (int j = 1; j <= k; ++j) {
        numPow.push_back(numPow.back() * num);
        denPow.push_back(denPow.back() * den);
    }
    for (int j = 0; j <= k; ++j) {
        CoeffPoly<R> term = numPow[j] * denPow[k - j];
        for (int e = 0; e <= k; ++e) out[e] += s[j] * term[e];
    }
    return out;
}

/// Roots of a univariate complex polynomial (companion-matrix eigenvalues).
/// Leading zero coefficients are trimmed; the returned count is the true degree.
inline std::vector<Cd> polyRoots(const std::vector<Cd>& coeffs, double tol = 1e-12) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    double scale = 0.0;
    for (const auto& c : coeffs) scale = std::max(scale, abs(c));
    while (deg >= 0 && abs(coeffs[static_cast<std::size_t>(deg)]) <= tol * std::max(scale, 1e-300)) --deg;
    if (deg <= 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    std::complex<double> lead = toStd(coeffs[static_cast<std::size_t>(deg)]);
    for (int i = 0; i < deg; ++i) comp(0, i) = -toStd(coeffs[static_cast<std::size_t>(deg - 1 - i)]) / lead;
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<Cd> out;
    for (int i = 0; i < deg; ++i) out.push_back(fromStd(es.eigenvalues()(i)));
    return out;
}

// ---------------------------------------------------------------------------
// Real structures on coefficient spaces
// ---------------------------------------------------------------------------

/// Antiholomorphic action of sigma on one fiber coordinate: coordinate i is
/// sent to sign * conj(u_target) / conj(zeta)^twist.
struct SigmaCoordRule {
    int targetIndex = 0;
    int sign = 1;
    int twist = 0;

    friend bool operator==(const SigmaCoordRule&, const SigmaCoordRule&) = default;
};

/// (tau s)_j = sign * (-1)^(k-j) * conj(s_(k-j)), where s is the section of the
/// rule's target coordinate. Real sections satisfy s_i = tau(s_target).
template <class R>
CoeffPoly<R> tauPullback(const CoeffPoly<R>& s, const SigmaCoordRule& rule) {
    if (s.degreeBound != rule.twist) throw DegreeError("tau pullback: degree bound differs from rule twist");
    const int k = rule.twist;
    CoeffPoly<R> out(k);
    for (int j = 0; j <= k; ++j) {
        Complex<R> c = s[k - j].conj();
        if (((k - j) % 2 != 0) != (rule.sign < 0)) c = -c;
        out[j] = c;
    }
    return out;
}

/// Checks that a rule set defines an involution compatible with the bundle
/// degrees. Returns an empty string on success, otherwise the failure reason.
inline std::string ruleParityFailure(const std::vector<int>& degrees, const std::vector<SigmaCoordRule>& rules) {
    if (rules.size() != degrees.size()) return "rule count differs from coordinate count";
    const int n = static_cast<int>(rules.size());
    for (int i = 0; i < n; ++i) {
        const auto& r = rules[static_cast<std::size_t>(i)];
        if (r.sign != 1 && r.sign != -1) return "rule " + std::to_string(i) + ": sign must be +1 or -1";
        if (r.targetIndex < 0 || r.targetIndex >= n) return "rule " + std::to_string(i) + ": target out of range";
        const auto& back = rules[static_cast<std::size_t>(r.targetIndex)];
        if (back.targetIndex != i) return "rule " + std::to_string(i) + ": target map is not an involution";
        if (r.twist != degrees[static_cast<std::size_t>(r.targetIndex)] ||
            degrees[static_cast<std::size_t>(i)] != degrees[static_cast<std::size_t>(r.targetIndex)])
            return "rule " + std::to_string(i) + ": twist does not match bundle degrees";
        const int parity = ((r.twist % 2 == 0) ? 1 : -1) * r.sign * back.sign;
        if (parity != 1)
            return "rule " + std::to_string(i) + ": (-1)^k * sign products must be +1 (sigma^2 != id)";
    }
    return {};
}

/// Real basis of the tau-fixed coefficient space plus its complex embedding.
/// Parameter layout: coordinates in index order; for a swapped pair (i<j) all
/// coefficients of i are free (re, im); for a self-paired coordinate the
/// coefficients below the middle are free (re, im) and the middle one
/// contributes a single real parameter (real or purely imaginary value).
struct RealParamBasis {
    struct Term {
        int param;
        Cq factor;
    };
    int paramCount = 0;
    std::vector<std::string> names;
    std::vector<int> degrees;
    /// embedding[i][j] = terms of coefficient j of coordinate i.
    std::vector<std::vector<std::vector<Term>>> embedding;
    /// free[i][j]: coefficient j of coordinate i is read directly by params.
    std::vector<std::vector<bool>> free;

    template <class R>
    std::vector<CoeffPoly<R>> embed(const std::vector<R>& params) const {
        if (static_cast<int>(params.size()) != paramCount)
            throw DimensionError("expected " + std::to_string(paramCount) + " real parameters");
        std::vector<CoeffPoly<R>> out;
        for (std::size_t i = 0; i < embedding.size(); ++i) {
            CoeffPoly<R> s(degrees[i]);
            for (std::size_t j = 0; j < embedding[i].size(); ++j)
                for (const auto& t : embedding[i][j])
                    s.coeffs[j] += fromRational<R>(t.factor) * Complex<R>(params[static_cast<std::size_t>(t.param)]);
            out.push_back(std::move(s));
        }
        return out;
    }

    /// Inverse of embed on tau-fixed coefficient data (reads the free coefficients).
    template <class R>
    std::vector<R> project(const std::vector<CoeffPoly<R>>& sections) const {
        std::vector<R> p(static_cast<std::size_t>(paramCount));
        for (std::size_t i = 0; i < embedding.size(); ++i)
            for (std::size_t j = 0; j < embedding[i].size(); ++j) {
                if (!free[i][j]) continue;
                for (const auto& t : embedding[i][j]) {
                    const auto& c = sections[i].coeffs[j];
                    p[static_cast<std::size_t>(t.param)] = t.factor == Cq(Rational(1)) ? c.re : c.im;
                }
            }
        return p;
    }
};

inline RealParamBasis realityFixedSpace(const std::vector<int>& degrees, const std::vector<SigmaCoordRule>& rules,
                                        const std::vector<std::string>& coordNames = {}) {
    if (auto why = ruleParityFailure(degrees, rules); !why.empty()) throw NonInvolutiveError(why);
    RealParamBasis b;
    b.degrees = degrees;
    const std::size_t n = degrees.size();
    b.embedding.resize(n);
    b.free.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.embedding[i].resize(static_cast<std::size_t>(degrees[i] + 1));
        b.free[i].assign(static_cast<std::size_t>(degrees[i] + 1), false);
    }
    auto name = [&](std::size_t i) { return i < coordNames.size() ? coordNames[i] : "u" + std::to_string(i + 1); };
    const Cq one(Rational(1)), im = Cq::i();

    // tau-image factor: coefficient j of coordinate i equals
    // sign_i * (-1)^(k-j) * conj(coefficient k-j of target).
    auto mirror = [&](std::size_t i, int j, const std::vector<RealParamBasis::Term>& src) {
        const auto& r = rules[i];
        const int k = r.twist;
        const bool neg = ((k - j) % 2 != 0) != (r.sign < 0);
        std::vector<RealParamBasis::Term> out;
        for (const auto& t : src) {
            Cq f = t.factor.conj();
            if (neg) f = -f;
            out.push_back({t.param, f});
        }
        return out;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rules[i];
        const auto t = static_cast<std::size_t>(r.targetIndex);
        const int k = degrees[i];
        if (t > i) {
            for (int j = 0; j <= k; ++j) {
                int pr = b.paramCount++, pi = b.paramCount++;
                b.names.push_back("re(" + name(i) + std::to_string(j) + ")");
                b.names.push_back("im(" + name(i) + std::to_string(j) + ")");
                b.embedding[i][static_cast<std::size_t>(j)] = {{pr, one}, {pi, im}};
                b.free[i][static_cast<std::size_t>(j)] = true;
            }
            for (int j = 0; j <= k; ++j)
                b.embedding[t][static_cast<std::size_t>(j)] = mirror(t, j, b.embedding[i][static_cast<std::size_t>(k - j)]);
        } else if (t == i) {
            for (int j = 0; 2 * j < k; ++j) {
                int pr = b.paramCount++, pi = b.paramCount++;
                b.names.push_back("re(" + name(i) + std::to_string(j) + ")");
                b.names.push_back("im(" + name(i) + std::to_string(j) + ")");
                b.embedding[i][static_cast<std::size_t>(j)] = {{pr, one}, {pi, im}};
                b.free[i][static_cast<std::size_t>(j)] = true;
                b.embedding[i][static_cast<std::size_t>(k - j)] = mirror(i, k - j, b.embedding[i][static_cast<std::size_t>(j)]);
            }
            // k is even by parity; middle coefficient satisfies c = sign*(-1)^(k/2)*conj(c)
            const int m = k / 2;
            const bool realMiddle = ((m % 2 == 0) == (r.sign > 0));
            int p = b.paramCount++;
            b.names.push_back(realMiddle ? name(i) + std::to_string(m) : "im(" + name(i) + std::to_string(m) + ")");
            b.embedding[i][static_cast<std::size_t>(m)] = {{p, realMiddle ? one : im}};
            b.free[i][static_cast<std::size_t>(m)] = true;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Splitting types of kernels of polynomial matrices
// ---------------------------------------------------------------------------

/// Degrees (c_1 >= c_2 >= ...) of a vector bundle on P^1 split as a sum of O(c_j).
struct SplittingType {
    std::vector<int> degrees;

    SplittingType() = default;
    explicit SplittingType(std::vector<int> d) : degrees(std::move(d)) {
        std::sort(degrees.begin(), degrees.end(), std::greater<>());
    }
    int rank() const { return static_cast<int>(degrees.size()); }
    int degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }
    friend bool operator==(const SplittingType&, const SplittingType&) = default;

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < degrees.size(); ++i) s += (i ? "," : "") + std::to_string(degrees[i]);
        return s + "}";
    }
};

/// h^0 of the twist by O(m): sum_j max(0, c_j + m + 1).
inline int h0FromSplitting(const SplittingType& t, int m) {
    int h = 0;
    for (int c : t.degrees) h += std::max(0, c + m + 1);
    return h;
}

template <class R>
using PolyMatrix = std::vector<std::vector<CoeffPoly<R>>>;

namespace detail {

template <class R>
void checkPolyMatrix(const PolyMatrix<R>& M, const std::vector<int>& src, const std::vector<int>& tgt) {
    if (M.size() != tgt.size()) throw DegreeError("matrix row count differs from target degree count");
    for (std::size_t j = 0; j < M.size(); ++j) {
        if (M[j].size() != src.size()) throw DegreeError("matrix column count differs from source degree count");
        for (std::size_t i = 0; i < src.size(); ++i) {
            const auto& e = M[j][i];
            if (e.degreeBound == tgt[j] - src[i]) continue;
            if (e.isZero()) continue;
            throw DegreeError("entry (" + std::to_string(j) + "," + std::to_string(i) +
                              ") has degree bound " + std::to_string(e.degreeBound) + ", expected " +
                              std::to_string(tgt[j] - src[i]));
        }
    }
}

template <class R>
Complex<R> coeffOf(const CoeffPoly<R>& p, int e) {
    if (e < 0 || e >= static_cast<int>(p.coeffs.size())) return {};
    return p.coeffs[static_cast<std::size_t>(e)];
}

template <class R>
std::vector<Complex<R>> genericSamplePoints(int count);

template <>
inline std::vector<Cq> genericSamplePoints<Rational>(int count) {
    std::vector<Cq> pts;
    for (int i = 0; i < count; ++i) pts.push_back(Cq(Rational(2 * i + 3, 7), Rational(i + 1, 5)));
    return pts;
}
template <>
inline std::vector<Cd> genericSamplePoints<double>(int count) {
    std::vector<Cd> pts;
    for (int i = 0; i < count; ++i)
        pts.push_back(Cd(0.3721 + 0.611 * std::cos(2.1 * i + 0.3), -0.2917 + 0.587 * std::sin(1.7 * i + 0.9)));
    return pts;
}

} // namespace detail

/// Dimension of {(s_i) : deg s_i <= src_i + m, M s = 0}, i.e. h^0 of the kernel
/// sheaf twisted by O(m).
template <class R>
int kernelSectionCount(const PolyMatrix<R>& M, const std::vector<int>& src, const std::vector<int>& tgt, int m) {
    std::vector<int> offset(src.size() + 1, 0);
    for (std::size_t i = 0; i < src.size(); ++i) offset[i + 1] = offset[i] + std::max(0, src[i] + m + 1);
    const int unknowns = offset.back();
    if (unknowns == 0) return 0;
    DenseMatrix<Complex<R>> A;
    for (std::size_t j = 0; j < tgt.size(); ++j) {
        for (int e = 0; e <= tgt[j] + m; ++e) {
            std::vector<Complex<R>> row(static_cast<std::size_t>(unknowns));
            bool any = false;
            for (std::size_t i = 0; i < src.size(); ++i) {
                const int top = src[i] + m;
                for (int b = 0; b <= top; ++b) {
                    auto c = detail::coeffOf(M[j][i], e - b);
                    if (c == Complex<R>{}) continue;
                    row[static_cast<std::size_t>(offset[i] + b)] = c;
                    any = true;
                }
            }
            if (any) A.push_back(std::move(row));
        }
    }
    return unknowns - matrixRank(A, static_cast<std::size_t>(unknowns));
}

/// Generic (maximal) rank of a polynomial matrix, by evaluation at enough
/// distinct points to avoid every root of a nonzero maximal minor.
template <class R>
int genericRank(const PolyMatrix<R>& M, const std::vector<int>& src, const std::vector<int>& tgt) {
    if (M.empty() || src.empty()) return 0;
    int minSrc = *std::min_element(src.begin(), src.end());
    int bound = 0;
    for (int t : tgt) bound += std::max(0, t - minSrc);
    int best = 0;
    for (const auto& z : detail::genericSamplePoints<R>(bound + 1)) {
        DenseMatrix<Complex<R>> A(M.size(), std::vector<Complex<R>>(src.size()));
        for (std::size_t j = 0; j < M.size(); ++j)
            for (std::size_t i = 0; i < src.size(); ++i) A[j][i] = M[j][i].eval(z);
        best = std::max(best, matrixRank(A, src.size()));
        if (best == static_cast<int>(std::min(M.size(), src.size()))) break;
    }
    return best;
}

/// Splitting type of the kernel of M : (+)O(src_i) -> (+)O(tgt_j).
/// Scans twists m upward from -(max src) - 1, decoding the degrees from the
/// jumps d(m) - d(m-1) = #{j : c_j >= -m}.
template <class R>
SplittingType kernelSplitting(const PolyMatrix<R>& M, const std::vector<int>& src, const std::vector<int>& tgt) {
    detail::checkPolyMatrix(M, src, tgt);
    if (src.empty()) return {};
    const int kernelRank = static_cast<int>(src.size()) - genericRank(M, src, tgt);
    if (kernelRank == 0) return {};
    const int maxSrc = *std::max_element(src.begin(), src.end());
    int m = -maxSrc - 1;
    int prevD = kernelSectionCount(M, src, tgt, m - 1);
    int prevStep = 0;
    std::vector<int> degrees;
    const int scanLimit = 4 * (maxSrc + 2) + 16 * static_cast<int>(tgt.size() + src.size()) +
                          std::accumulate(tgt.begin(), tgt.end(), 0);
    for (int iter = 0; iter < scanLimit; ++iter, ++m) {
        const int d = kernelSectionCount(M, src, tgt, m);
        const int step = d - prevD;
        if (step < prevStep || step > kernelRank)
            throw DegreeError("kernel section counts are not consistent with a splitting");
        for (int c = 0; c < step - prevStep; ++c) degrees.push_back(-m);
        if (step == kernelRank) {
            const int dNext = kernelSectionCount(M, src, tgt, m + 1);
            if (dNext - d != kernelRank) throw DegreeError("kernel section counts failed the affinity check");
            return SplittingType(degrees);
        }
        prevD = d;
        prevStep = step;
    }
    throw DegreeError("kernel splitting scan did not stabilize");
}

} // namespace twistor
