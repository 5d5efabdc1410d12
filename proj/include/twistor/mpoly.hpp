#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace twistor {

/// Polynomial in a fixed number of real variables with complex coefficients.
/// Used for section-coefficient expressions: the variables are the real
/// parameters of a real section, so conjugation acts on coefficients only.
template <class R>
class MPoly {
public:
    using Exponents = std::vector<int>;
    using Coeff = Complex<R>;

    MPoly() = default;
    explicit MPoly(int nvars) : nvars_(nvars) {}

    static MPoly constant(int nvars, const Coeff& c) {
        MPoly p(nvars);
        p.add(Exponents(static_cast<std::size_t>(nvars), 0), c);
        return p;
    }
    static MPoly variable(int nvars, int index, const Coeff& c = Coeff(R(1))) {
        MPoly p(nvars);
        Exponents e(static_cast<std::size_t>(nvars), 0);
        e[static_cast<std::size_t>(index)] = 1;
        p.add(e, c);
        return p;
    }

    int nvars() const { return nvars_; }
    const std::map<Exponents, Coeff>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    void add(const Exponents& e, const Coeff& c) {
        if (c == Coeff{}) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
            return;
        }
        it->second += c;
        if (it->second == Coeff{}) terms_.erase(it);
    }

    int totalDegree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    MPoly& operator+=(const MPoly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add(e, c);
        return *this;
    }
    MPoly& operator-=(const MPoly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add(e, -c);
        return *this;
    }
    MPoly& operator*=(const Coeff& s) {
        if (s == Coeff{}) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
    friend MPoly operator-(MPoly a) { return a *= Coeff(R(-1)); }
    friend MPoly operator*(MPoly a, const Coeff& s) { return a *= s; }
    friend MPoly operator*(const Coeff& s, MPoly a) { return a *= s; }
    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        MPoly r(std::max(a.nvars_, b.nvars_));
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(static_cast<std::size_t>(r.nvars_), 0);
                for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
                for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
                r.add(e, ca * cb);
            }
        return r;
    }
    friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

    MPoly conj() const {
        MPoly r(nvars_);
        for (const auto& [e, c] : terms_) r.add(e, c.conj());
        return r;
    }
    MPoly realPart() const {
        MPoly r(nvars_);
        for (const auto& [e, c] : terms_) r.add(e, Coeff(c.re));
        return r;
    }
    MPoly imagPart() const {
        MPoly r(nvars_);
        for (const auto& [e, c] : terms_) r.add(e, Coeff(c.im));
        return r;
    }
    bool isReal() const {
        for (const auto& [e, c] : terms_)
            if (!(c.im == R(0))) return false;
        return true;
    }

    MPoly derivative(int var) const {
        MPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            const int p = e[static_cast<std::size_t>(var)];
            if (p == 0) continue;
            Exponents f = e;
            f[static_cast<std::size_t>(var)] = p - 1;
            r.add(f, c * Coeff(R(p)));
        }
        return r;
    }

    template <class T>
    Complex<T> eval(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw DimensionError("polynomial in " + std::to_string(nvars_) + " variables evaluated at " +
                                 std::to_string(x.size()) + " values");
        Complex<T> acc{};
        for (const auto& [e, c] : terms_) {
            T mono(1);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) mono *= x[i];
            Complex<T> cc;
            if constexpr (std::is_same_v<T, R>) cc = c;
            else cc = toDouble(c);
            acc += cc * Complex<T>(mono);
        }
        return acc;
    }

    /// Human-readable rendering with the given variable names.
    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            if (!first) os << " + ";
            first = false;
            os << c;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                os << '*' << (i < names.size() ? names[i] : "p" + std::to_string(i));
                if (e[i] > 1) os << '^' << e[i];
            }
        }
        return os.str();
    }

private:
    void adopt(const MPoly& o) {
        if (nvars_ == 0) nvars_ = o.nvars_;
        else if (o.nvars_ != 0 && o.nvars_ != nvars_) throw DimensionError("mixing polynomials in different variable sets");
    }

    int nvars_ = 0;
    std::map<Exponents, Coeff> terms_;
};

template <class R>
MPoly<double> toDoubleMPoly(const MPoly<R>& p) {
    MPoly<double> r(p.nvars());
    for (const auto& [e, c] : p.terms()) r.add(e, toDouble(c));
    return r;
}

} // namespace twistor
