#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>

#include "errors.hpp"

namespace twistor {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Minimal complex type usable over both double and exact rationals.
/// std::complex is only specified for floating-point types.
template <class R>
struct Complex {
    R re{};
    R im{};

    Complex() = default;
    Complex(R r) : re(std::move(r)) {}  // NOLINT(implicit)
    Complex(R r, R i) : re(std::move(r)), im(std::move(i)) {}
    template <class I, std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, R>, int> = 0>
    Complex(I v) : re(R(v)) {}  // NOLINT(implicit)

    static Complex i() { return {R(0), R(1)}; }

    Complex conj() const { return {re, -im}; }
    R norm2() const { return re * re + im * im; }

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o) {
        R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator/=(const Complex& o) {
        R d = o.norm2();
        R r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const Complex& c) {
        return os << '(' << c.re << ',' << c.im << ')';
    }
};

using Cd = Complex<double>;
using Cq = Complex<Rational>;

inline double toDouble(double x) { return x; }
inline double toDouble(const Rational& x) { return static_cast<double>(x); }
inline Cd toDouble(const Cd& c) { return c; }
inline Cd toDouble(const Cq& c) { return {toDouble(c.re), toDouble(c.im)}; }

inline std::complex<double> toStd(const Cd& c) { return {c.re, c.im}; }
inline Cd fromStd(const std::complex<double>& c) { return {c.real(), c.imag()}; }

inline double abs(const Cd& c) { return std::hypot(c.re, c.im); }

template <class R>
R fromRational(const Rational& q) {
    if constexpr (std::is_same_v<R, Rational>) return q;
    else return static_cast<R>(toDouble(q));
}
template <class R>
Complex<R> fromRational(const Cq& q) { return {fromRational<R>(q.re), fromRational<R>(q.im)}; }

/// Tolerance-aware zero test; exact for rationals.
inline bool isZero(double x, double tol) { return std::abs(x) <= tol; }
inline bool isZero(const Rational& x, double) { return x == 0; }
template <class R>
bool isZero(const Complex<R>& c, double tol) { return isZero(c.re, tol) && isZero(c.im, tol); }

/// Exact square root of a nonnegative rational, if it is a perfect square.
inline std::optional<Rational> exactSqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    BigInt n = boost::multiprecision::numerator(q);
    BigInt d = boost::multiprecision::denominator(q);
    BigInt sn = boost::multiprecision::sqrt(n);
    BigInt sd = boost::multiprecision::sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return Rational(sn, sd);
}

inline double realSqrt(double x) { return std::sqrt(x < 0 ? 0.0 : x); }
inline Rational realSqrt(const Rational& x) {
    auto s = exactSqrt(x);
    if (!s) throw ModelError("value is not an exact rational square");
    return *s;
}

/// Signed base-10 integer; leading zeros do not select octal.
inline BigInt decimalInteger(std::string s, const std::string& text) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed number '" + text + "'");
    s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
    BigInt v(s);
    return neg ? BigInt(-v) : v;
}

/// Parse "p/q", an integer, or a decimal literal into an exact rational.
inline Rational parseRational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty number");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt p = decimalInteger(s.substr(0, slash), text);
            BigInt q = decimalInteger(s.substr(slash + 1), text);
            if (q == 0) throw ParseError("zero denominator in '" + text + "'");
            return Rational(p, q);
        }
        bool neg = false;
        std::size_t pos = 0;
        if (s[0] == '-' || s[0] == '+') { neg = s[0] == '-'; pos = 1; }
        std::string mant = s.substr(pos);
        long exp10 = 0;
        auto e = mant.find_first_of("eE");
        if (e != std::string::npos) {
            exp10 = std::stol(mant.substr(e + 1));
            mant = mant.substr(0, e);
        }
        auto dot = mant.find('.');
        if (dot != std::string::npos) {
            exp10 -= static_cast<long>(mant.size() - dot - 1);
            mant.erase(dot, 1);
        }
        if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("malformed number '" + text + "'");
        Rational v{decimalInteger(mant, text)};
        BigInt ten = 10;
        BigInt scale = boost::multiprecision::pow(ten, static_cast<unsigned>(std::labs(exp10)));
        v = exp10 >= 0 ? v * Rational(scale) : v / Rational(scale);
        return neg ? Rational(-v) : v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + text + "'");
    }
}

/// "p/q" or "p" rendering of an exact rational.
inline std::string formatRational(const Rational& q) {
    auto n = boost::multiprecision::numerator(q);
    auto d = boost::multiprecision::denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

} // namespace twistor
