#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace twistor {

using Json = nlohmann::json;

// Scalars: doubles as numbers, rationals as "p/q" strings, complex values as [re, im].

inline Json toJson(const Rational& q) { return formatRational(q); }
inline Json toJson(double x) { return x; }
template <class R>
Json toJson(const Complex<R>& c) {
    return Json::array({toJson(c.re), toJson(c.im)});
}

inline Rational rationalFromJson(const Json& j) {
    if (j.is_string()) return parseRational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return parseRational(j.dump());
    throw ParseError("expected a number or \"p/q\" string, got " + j.dump());
}

inline double doubleFromJson(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return toDouble(parseRational(j.get<std::string>()));
    throw ParseError("expected a number, got " + j.dump());
}

template <class R>
R scalarFromJson(const Json& j) {
    if constexpr (std::is_same_v<R, Rational>) return rationalFromJson(j);
    else return doubleFromJson(j);
}

/// [re, im] or a bare real number.
template <class R>
Complex<R> complexFromJson(const Json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw ParseError("complex value must be [re, im]: " + j.dump());
        return {scalarFromJson<R>(j[0]), scalarFromJson<R>(j[1])};
    }
    return Complex<R>(scalarFromJson<R>(j));
}

inline Json toJson(const CoeffPoly<Rational>& p) {
    Json a = Json::array();
    for (const auto& c : p.coeffs) a.push_back(toJson(c));
    return a;
}

inline Json toJson(const SigmaCoordRule& r) { return {{"target", r.targetIndex}, {"sign", r.sign}}; }

inline Json modelToJson(const TwistorModel& m) {
    Json j;
    j["name"] = m.name;
    j["coordinates"] = m.coordNames;
    j["degrees"] = m.degrees;
    Json eqs = Json::array();
    for (const auto& f : m.equations) {
        Json terms = Json::array();
        for (const auto& [e, g] : f.terms) terms.push_back({{"exponents", e}, {"zeta", toJson(g)}});
        eqs.push_back({{"twist", f.twist}, {"terms", terms}});
    }
    j["equations"] = eqs;
    Json rules = Json::array();
    for (const auto& r : m.sigmaRules) rules.push_back(toJson(r));
    j["rules"] = rules;
    Json comps = Json::array();
    for (const auto& p : m.componentEquations) {
        Json terms = Json::array();
        for (const auto& [e, c] : p.terms()) terms.push_back({{"exponents", e}, {"coeff", toJson(c)}});
        comps.push_back({{"terms", terms}});
    }
    j["componentEquations"] = comps;
    return j;
}

/// Inverse of modelToJson. Equation twists are checked against the degrees,
/// rule twists are filled in from the target degree.
inline TwistorModel modelFromJson(const Json& j) {
    try {
        TwistorModel m;
        m.name = j.value("name", std::string("custom"));
        m.degrees = j.at("degrees").get<std::vector<int>>();
        m.coordNames = j.value("coordinates", std::vector<std::string>{});
        for (const auto& eq : j.value("equations", Json::array())) {
            FiberEquation f;
            f.twist = eq.at("twist").get<int>();
            for (const auto& t : eq.at("terms")) {
                auto e = t.at("exponents").get<std::vector<int>>();
                if (e.size() != m.degrees.size()) throw ParseError("exponent vector has wrong length");
                int bound = f.twist;
                for (std::size_t i = 0; i < e.size(); ++i) bound -= e[i] * m.degrees[i];
                if (bound < 0) throw DegreeError("monomial exceeds the equation twist");
                std::vector<Cq> coeffs;
                for (const auto& c : t.at("zeta")) coeffs.push_back(complexFromJson<Rational>(c));
                if (static_cast<int>(coeffs.size()) > bound + 1) throw DegreeError("zeta coefficient exceeds its degree bound");
                coeffs.resize(static_cast<std::size_t>(bound + 1));
                f.addTerm(e, CoeffPoly<Rational>(bound, coeffs));
            }
            m.equations.push_back(std::move(f));
        }
        const auto& rules = j.at("rules");
        if (rules.size() != m.degrees.size()) throw ParseError("one sigma rule per coordinate is required");
        for (const auto& r : rules) {
            SigmaCoordRule rule{r.at("target").get<int>(), r.at("sign").get<int>(), 0};
            if (rule.targetIndex < 0 || rule.targetIndex >= static_cast<int>(m.degrees.size()))
                throw ParseError("rule target out of range");
            if (rule.sign != 1 && rule.sign != -1) throw ParseError("rule sign must be +1 or -1");
            rule.twist = m.degrees[static_cast<std::size_t>(rule.targetIndex)];
            m.sigmaRules.push_back(rule);
        }
        if (j.contains("componentEquations")) {
            const int n = m.basis().paramCount;
            for (const auto& c : j.at("componentEquations")) {
                MPoly<Rational> p(n);
                for (const auto& t : c.at("terms")) {
                    auto e = t.at("exponents").get<std::vector<int>>();
                    if (static_cast<int>(e.size()) != n) throw ParseError("component equation has wrong variable count");
                    p.add(e, complexFromJson<Rational>(t.at("coeff")));
                }
                m.componentEquations.push_back(std::move(p));
            }
        }
        if (m.coordNames.empty())
            for (std::size_t i = 0; i < m.degrees.size(); ++i) m.coordNames.push_back("u" + std::to_string(i));
        m.paramNames = m.basis().names;
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model: ") + e.what());
    }
}

/// Builtin descriptors: "quadric", "deformed" (lambda = i - i zeta^2,
/// tau-antireal unless given), "smooth-O11".
inline TwistorModel modelFromDescriptor(const Json& d) {
    if (d.is_string()) return modelFromDescriptor(Json{{"builtin", d.get<std::string>()}});
    if (d.contains("custom")) return modelFromJson(d.at("custom"));
    const std::string b = d.value("builtin", std::string());
    if (b == "quadric") return buildQuadric();
    if (b == "smooth-O11" || b == "O11") return buildSmoothO11();
    if (b == "deformed") {
        CoeffPoly<Rational> lambda(2, {Cq(Rational(0), Rational(1)), Cq{}, Cq(Rational(0), Rational(-1))});
        if (d.contains("lambda")) {
            std::vector<Cq> c;
            for (const auto& x : d.at("lambda")) c.push_back(complexFromJson<Rational>(x));
            if (c.size() > 3) throw DegreeError("lambda must be a section of O(2)");
            c.resize(3);
            lambda = CoeffPoly<Rational>(2, c);
        }
        const std::string rt = d.value("reality", std::string("tau-antireal"));
        if (rt != "tau-real" && rt != "tau-antireal") throw ParseError("reality must be tau-real or tau-antireal");
        return buildDeformed(lambda, rt == "tau-real" ? RealityType::TauReal : RealityType::TauAntireal);
    }
    throw ParseError("unknown model descriptor " + d.dump());
}

} // namespace twistor
