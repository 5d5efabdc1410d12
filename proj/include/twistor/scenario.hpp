#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "analyzer.hpp"
#include "model_io.hpp"
#include "quotient.hpp"

namespace twistor {

inline constexpr const char* kToolkitVersion = "twistor 0.1.0";

inline const std::set<std::string>& knownOps() {
    static const std::set<std::string> ops{"validate",       "sections",  "solve-fiber", "singular-scan",
                                           "branch",         "normal-bundle", "classify", "matrix-model",
                                           "quotient-census", "cone-glue"};
    return ops;
}

/// Ops that draw random samples and therefore need a seed.
inline bool opSamples(const std::string& op) {
    return op == "validate" || op == "classify" || op == "singular-scan" || op == "solve-fiber" || op == "branch";
}

inline bool opNeedsModel(const std::string& op) { return op != "quotient-census" && op != "cone-glue"; }

struct TaskEntry {
    std::string op;
    Json args = Json::object();
};

struct Scenario {
    Json model;
    std::vector<TaskEntry> tasks;
    Tolerances tol;
    std::optional<std::uint64_t> seed;
    bool exact = false;
    std::string outputPath;
};

inline Scenario parseScenario(const Json& j) {
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    Scenario s;
    try {
        if (j.contains("model")) s.model = j.at("model");
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        s.exact = j.value("exact", false);
        s.outputPath = j.value("output", std::string());
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            s.tol.membership = t.value("membership", s.tol.membership);
            s.tol.rank = t.value("rank", s.tol.rank);
            s.tol.newton = t.value("newton", s.tol.newton);
            s.tol.dedup = t.value("dedup", s.tol.dedup);
        }
        if (!j.contains("tasks") || !j.at("tasks").is_array()) throw ParseError("scenario needs a task list");
        for (const auto& t : j.at("tasks")) {
            TaskEntry entry;
            if (t.is_string()) entry.op = t.get<std::string>();
            else {
                entry.op = t.at("op").get<std::string>();
                for (const auto& [k, v] : t.items())
                    if (k != "op") entry.args[k] = v;
            }
            if (!knownOps().count(entry.op)) throw ParseError("unknown op '" + entry.op + "'");
            if (opSamples(entry.op) && !s.seed) throw ParseError("op '" + entry.op + "' samples and needs a seed");
            if (opNeedsModel(entry.op) && s.model.is_null()) throw ParseError("op '" + entry.op + "' needs a model");
            s.tasks.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

struct TaskRecord {
    std::string op;
    Json inputs;
    std::string status = "info"; // pass | fail | info
    Json numbers = Json::object();
    std::vector<std::string> evidence;

    void check(bool ok, const std::string& what) {
        if (!ok) status = "fail";
        else if (status == "info") status = "pass";
        evidence.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
    }
};

struct Report {
    std::string model;
    std::optional<std::uint64_t> seed;
    bool exact = false;
    Tolerances tol;
    std::vector<TaskRecord> tasks;

    bool anyFailed() const {
        for (const auto& t : tasks)
            if (t.status == "fail") return true;
        return false;
    }

    Json toJson() const {
        Json j;
        j["toolkit"] = kToolkitVersion;
        j["model"] = model;
        j["seed"] = seed ? Json(*seed) : Json();
        j["arithmetic"] = exact ? "exact" : "float";
        j["tolerances"] = {{"membership", tol.membership}, {"rank", tol.rank}, {"newton", tol.newton},
                           {"newtonMaxIter", tol.newtonMaxIter}, {"dedup", tol.dedup}};
        Json ts = Json::array();
        for (const auto& t : tasks)
            ts.push_back({{"op", t.op}, {"inputs", t.inputs}, {"status", t.status}, {"numbers", t.numbers},
                          {"evidence", t.evidence}});
        j["tasks"] = ts;
        return j;
    }

    std::string summary() const {
        std::ostringstream os;
        os << kToolkitVersion << "  model: " << (model.empty() ? "-" : model) << '\n';
        for (const auto& t : tasks) {
            os << '[' << t.status << "] " << t.op << '\n';
            for (const auto& e : t.evidence) os << "    " << e << '\n';
        }
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// Argument helpers
// ---------------------------------------------------------------------------

namespace detail {

inline P1Point zetaFromJson(const Json& j) {
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity"))
        return P1Point::infinity();
    return P1Point::standard(complexFromJson<double>(j));
}

inline Json zetaToJson(const P1Point& z) {
    if (z.chart == Chart::Infinity) {
        if (z.isInfinity()) return "inf";
        return toJson(Cd{1.0} / z.value);
    }
    return toJson(z.value);
}

/// Section parameters: the full real parameter vector, or for quadric-type
/// models the shorthand (x0, x1, x2, z0, r) with real entries.
template <class R>
std::vector<R> sectionFromJson(const TwistorModel& model, const Json& j) {
    if (!j.is_array()) throw ParseError("section must be an array of numbers");
    const int n = model.basis().paramCount;
    std::vector<R> v;
    for (const auto& x : j) v.push_back(scalarFromJson<R>(x));
    if (static_cast<int>(v.size()) == n) return v;
    if (n == 9 && v.size() == 5) return QuadricParams<R>::real5(v[0], v[1], v[2], v[3], v[4]).flat();
    throw ParseError("section has " + std::to_string(v.size()) + " entries, model has " + std::to_string(n) +
                     " real parameters");
}

inline Json vecToJson(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}
inline Json vecToJson(const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(formatRational(x));
    return a;
}

template <class R>
Json mat4ToJson(const Mat4<R>& m) {
    Json a = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(toJson(x));
        a.push_back(r);
    }
    return a;
}

inline void applyExpectations(TaskRecord& rec, const Json& args) {
    if (!args.contains("expect")) return;
    for (const auto& [k, v] : args.at("expect").items()) {
        if (!rec.numbers.contains(k)) {
            rec.check(false, "expected '" + k + "' but the task did not report it");
            continue;
        }
        const Json& got = rec.numbers.at(k);
        rec.check(got == v, k + " = " + got.dump() + (got == v ? "" : " (expected " + v.dump() + ")"));
    }
}

inline std::uint64_t seedOf(const Scenario& s, const Json& args) {
    return args.value("seed", s.seed.value_or(1));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Ops
// ---------------------------------------------------------------------------

namespace ops {

inline void validate(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    auto vr = validateModel(m, detail::seedOf(s, args));
    rec.numbers["ok"] = vr.ok;
    rec.numbers["equationSigns"] = vr.equationSigns;
    rec.numbers["fiberDimension"] = vr.fiberDimension ? Json(*vr.fiberDimension) : Json();
    for (const auto& f : vr.failures) rec.evidence.push_back(f.kind + ": " + f.message);
    for (const auto& n : vr.notes) rec.evidence.push_back("note: " + n);
    if (!args.contains("expect")) rec.check(vr.ok, "model validates");
}

inline void sections(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    auto sys = realSectionSystem(m);
    rec.numbers["equations"] = sys.size();
    rec.numbers["unknowns"] = sys.nvars();
    rec.numbers["parameters"] = sys.varNames();
    Json eqs = Json::array();
    for (int i = 0; i < sys.size(); ++i)
        eqs.push_back({{"label", sys.labels()[static_cast<std::size_t>(i)]},
                       {"polynomial", sys.equations()[static_cast<std::size_t>(i)].str(sys.varNames())}});
    rec.numbers["system"] = eqs;
    rec.evidence.push_back(std::to_string(sys.size()) + " real equations in " + std::to_string(sys.nvars()) + " unknowns");
    if (args.contains("section")) {
        if (s.exact) {
            auto p = detail::sectionFromJson<Rational>(m, args.at("section"));
            const bool ok = membershipExact(sys, p);
            rec.numbers["member"] = ok;
            rec.check(ok, "section satisfies the system exactly");
        } else {
            auto p = detail::sectionFromJson<double>(m, args.at("section"));
            auto mr = membership(sys, p, s.tol.membership);
            rec.numbers["member"] = mr.pass;
            rec.numbers["maxResidual"] = mr.maxResidual;
            rec.check(mr.pass, "section satisfies the system (max residual " + std::to_string(mr.maxResidual) + ")");
        }
    }
}

inline void solveFiber(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    const P1Point zeta = detail::zetaFromJson(args.at("zeta"));
    std::vector<Cd> target;
    for (const auto& x : args.at("point")) target.push_back(complexFromJson<double>(x));
    FiberSolveConfig cfg{s.tol, detail::seedOf(s, args), args.value("starts", 48)};
    auto res = fiberSolve(m, realSectionSystem(m), zeta, target, cfg);
    Json sols = Json::array();
    for (const auto& p : res.solutions) sols.push_back(detail::vecToJson(p));
    rec.numbers["count"] = static_cast<int>(res.solutions.size());
    rec.numbers["complete"] = res.complete;
    rec.numbers["method"] = res.method;
    rec.numbers["solutions"] = sols;
    rec.evidence.push_back(std::to_string(res.solutions.size()) + " real section(s) through the point (" + res.method +
                           (res.complete ? ", complete)" : ", heuristic)"));
}

inline void singularScanOp(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    auto sys = realSectionSystem(m);
    std::mt19937_64 rng(detail::seedOf(s, args));
    auto pts = sampleSections(sys, args.value("samples", 200), rng, s.tol);
    if (args.value("includeOrigin", true)) pts.emplace_back(static_cast<std::size_t>(sys.nvars()), 0.0);
    for (const auto& p : args.value("points", Json::array())) pts.push_back(detail::sectionFromJson<double>(m, p));
    auto rep = singularScan(sys, pts, {s.tol, args.value("clusterRadius", 0.5)});
    rec.numbers["examined"] = rep.examined;
    rec.numbers["nonMembers"] = rep.nonMembers;
    rec.numbers["regularRank"] = rep.regularRank;
    rec.numbers["deficient"] = static_cast<int>(rep.deficient.size());
    Json cls = Json::array();
    for (const auto& c : rep.clusters)
        cls.push_back({{"size", c.size}, {"dimension", c.dimension}, {"representative", detail::vecToJson(c.representative)}});
    rec.numbers["clusters"] = cls;
    Json ranks = Json::array();
    for (const auto& d : rep.deficient) ranks.push_back(d.rank);
    rec.numbers["deficientRanks"] = ranks;
    rec.evidence.push_back(std::to_string(rep.deficient.size()) + " rank-deficient points among " +
                           std::to_string(rep.examined) + " (regular rank " + std::to_string(rep.regularRank) + ")");
}

/// Records whether the section solves the real system; a non-member fails the task.
inline bool requireMember(const RealEquationSystem& sys, const std::vector<double>& p, double tol, TaskRecord& rec) {
    const bool ok = membership(sys, p, tol).pass;
    rec.numbers["member"] = ok;
    rec.check(ok, "section lies on the real section space");
    return ok;
}

inline bool requireMember(const RealEquationSystem& sys, const std::vector<Rational>& p, double, TaskRecord& rec) {
    const bool ok = membershipExact(sys, p);
    rec.numbers["member"] = ok;
    rec.check(ok, "section lies on the real section space (exact)");
    return ok;
}

inline void branch(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    auto sys = realSectionSystem(m);
    auto p = detail::sectionFromJson<double>(m, args.at("section"));
    if (!requireMember(sys, p, s.tol.membership, rec)) return;
    std::vector<P1Point> zetas;
    for (const auto& z : args.value("zetas", Json::array())) zetas.push_back(detail::zetaFromJson(z));
    std::mt19937_64 rng(detail::seedOf(s, args));
    std::normal_distribution<double> nd;
    for (int i = 0, n = args.value("randomZetas", zetas.empty() ? 5 : 0); i < n; ++i)
        zetas.push_back(P1Point::standard({nd(rng), nd(rng)}).canonical());
    Json per = Json::array();
    int branched = 0;
    for (const auto& z : zetas) {
        auto br = branchTest(m, sys, p, z, s.tol.rank);
        if (br.verdict == Branching::Branched) ++branched;
        per.push_back({{"zeta", detail::zetaToJson(z)},
                       {"verdict", br.verdict == Branching::Branched ? "Branched" : "Unbranched"},
                       {"rank", br.augmentedRank}});
    }
    rec.numbers["perZeta"] = per;
    rec.numbers["branched"] = branched;
    rec.numbers["tested"] = static_cast<int>(zetas.size());
    rec.numbers["verdict"] = branched == 0 ? "Unbranched" : branched == static_cast<int>(zetas.size()) ? "Branched" : "Mixed";
    rec.evidence.push_back("branched at " + std::to_string(branched) + " of " + std::to_string(zetas.size()) + " tested zeta");
}

template <class R>
void normalBundleImpl(const TwistorModel& m, const std::vector<R>& p, double tol, TaskRecord& rec) {
    if (!requireMember(realSectionSystem(m), p, tol, rec)) return;
    auto nb = normalSplitting(m, p);
    rec.numbers["degenerate"] = nb.degenerate;
    if (nb.degenerate) {
        rec.numbers["where"] = nb.degenerateWhere;
        Json locs = Json::array();
        for (const auto& z : nb.degenerateLocations) locs.push_back(detail::zetaToJson(z));
        rec.numbers["locations"] = locs;
        rec.evidence.push_back("degenerate: " + nb.degenerateWhere);
        return;
    }
    rec.numbers["splitting"] = nb.splitting.degrees;
    rec.numbers["h0"] = nb.h0;
    rec.numbers["h0Minus2"] = nb.h0Minus2;
    rec.evidence.push_back("normal sheaf splits as " + nb.splitting.str() + ", h0 = " + std::to_string(nb.h0) +
                           ", h0(N(-2)) = " + std::to_string(nb.h0Minus2));
}

inline void normalBundle(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    if (s.exact) normalBundleImpl(m, detail::sectionFromJson<Rational>(m, args.at("section")), s.tol.membership, rec);
    else normalBundleImpl(m, detail::sectionFromJson<double>(m, args.at("section")), s.tol.membership, rec);
}

inline void classify(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    ClassifyConfig cfg;
    cfg.tol = s.tol;
    cfg.seed = detail::seedOf(s, args);
    cfg.samples = args.value("samples", cfg.samples);
    auto c = classifyHC(m, cfg);
    rec.numbers["verdict"] = toString(c.verdict);
    rec.numbers["familyDimension"] = c.familyDimension ? Json(*c.familyDimension) : Json();
    rec.numbers["singularFiberPoints"] = static_cast<int>(c.singularFiberPoints.size());
    Json fams = Json::array();
    for (const auto& f : c.families)
        if (f.certified)
            fams.push_back({{"member", detail::vecToJson(f.member)}, {"continued", detail::vecToJson(f.continuedMember)},
                            {"corank", f.corank}, {"zeta", detail::zetaToJson(f.through.point.zeta)}});
    rec.numbers["certifiedFamilies"] = fams;
    rec.evidence = c.evidence;
    rec.evidence.push_back("verdict: " + toString(c.verdict));
}

template <class R>
void matrixModelImpl(const QuadricParams<R>& q, double tol, TaskRecord& rec) {
    ComponentLabel label;
    if constexpr (std::is_same_v<R, Rational>) label = componentLabel(q);
    else label = componentLabel(q, tol);
    rec.numbers["component"] = toString(label);
    const int sgn = label == ComponentLabel::Minus ? -1 : 1;
    auto mm = symMatrixModel(q, sgn, tol);
    auto id = matrixIdentities(mm.B, mm.t);
    rec.numbers["B"] = detail::mat4ToJson(mm.B);
    rec.numbers["t"] = toJson(mm.t);
    rec.numbers["traceB"] = toJson(id.traceB);
    rec.numbers["rankA"] = id.rankA;
    rec.numbers["oracleResidual2"] = toJson(id.oracleResidual2);
    rec.numbers["displayedResidual2"] = toJson(id.displayedResidual2);
    rec.numbers["predictedDisplayed2"] = toJson(id.predictedDisplayed2);
    const double scale = 1.0 + toDouble(id.t * id.t);
    auto zero = [&](const R& x, double s) {
        if constexpr (std::is_same_v<R, Rational>) return x == 0;
        else return std::abs(x) <= 1e-9 * s;
    };
    rec.check(zero(id.traceB, std::sqrt(scale)), "tr B = 0");
    rec.check(id.rankA == 1 || (id.rankA == 0 && zero(id.t, 1.0)), "rank(B + t/4) = " + std::to_string(id.rankA));
    rec.check(zero(id.oracleResidual2, scale * scale), "(B + t/4)(B - 3t/4) = 0");
    rec.evidence.push_back("displayed form |B(B + t/4)|^2 = " + toJson(id.displayedResidual2).dump() +
                           ", predicted (3t/4)^2 |A|^2 = " + toJson(id.predictedDisplayed2).dump());
}

template <class R>
QuadricParams<R> matrixModelInput(const TwistorModel& m, const Json& args) {
    if (args.contains("ab")) {
        const auto& ab = args.at("ab");
        if (!ab.is_array() || ab.size() != 2) throw ParseError("ab must be [a, b]");
        const auto v = args.value("variant", std::string("minus")) == "plus" ? SquaringVariant::Plus : SquaringVariant::Minus;
        return squaringSection(complexFromJson<R>(ab[0]), complexFromJson<R>(ab[1]), v);
    }
    return QuadricParams<R>::fromFlat(detail::sectionFromJson<R>(m, args.at("section")));
}

inline void matrixModel(const Scenario& s, const TwistorModel& m, const Json& args, TaskRecord& rec) {
    if (!isReferenceQuadric(m)) throw ParseError("matrix-model needs the quadric model");
    if (s.exact) matrixModelImpl(matrixModelInput<Rational>(m, args), s.tol.membership, rec);
    else matrixModelImpl(matrixModelInput<double>(m, args), s.tol.membership, rec);
}

inline FiniteQuaternionGroup groupFromArgs(const Json& args) {
    if (args.contains("group")) return namedGroup(args.at("group").get<std::string>());
    if (args.contains("elements")) {
        std::vector<Quat> e;
        for (const auto& q : args.at("elements")) {
            if (q.size() != 4) throw ParseError("quaternion must have 4 components");
            e.emplace_back(doubleFromJson(q[0]), doubleFromJson(q[1]), doubleFromJson(q[2]), doubleFromJson(q[3]));
        }
        return groupFromQuaternions(e, args.value("name", std::string("custom")));
    }
    if (args.contains("table"))
        return groupFromTable(args.at("table").get<std::vector<std::vector<int>>>(), args.value("identity", 0),
                              args.value("name", std::string("table")));
    throw ParseError("quotient-census needs group, elements or table");
}

inline void quotientCensus(const Scenario&, const Json& args, TaskRecord& rec) {
    FiniteQuaternionGroup g;
    try {
        g = groupFromArgs(args);
    } catch (const GroupAxiomError& e) {
        rec.numbers["error"] = "GroupAxiomError";
        rec.numbers["witness"] = {e.witness[0], e.witness[1], e.witness[2]};
        rec.evidence.push_back(std::string("GroupAxiomError: ") + e.what());
        if (!args.contains("expect")) rec.check(false, "input is a group");
        return;
    }
    const auto action = args.value("action", std::string("left")) == "left" ? ActionType::LeftMultiplication : ActionType::Other;
    auto census = censusInvolutions(g);
    auto cc = componentCount(g, action);
    rec.numbers["group"] = g.name;
    rec.numbers["order"] = g.order();
    rec.numbers["involutions"] = static_cast<int>(census.involutions.size());
    rec.numbers["classes"] = static_cast<int>(census.conjugacyClasses.size());
    Json sizes = Json::array();
    for (const auto& c : census.conjugacyClasses) sizes.push_back(static_cast<int>(c.size()));
    rec.numbers["classSizes"] = sizes;
    rec.numbers["componentCount"] = cc.count;
    rec.numbers["lowerBound"] = cc.lowerBound;
    rec.numbers["assumptionFlags"] = cc.assumptionFlags;
    rec.numbers["properQuotient"] = properQuotientPredicate(g);
    rec.evidence.push_back(g.name + ": " + std::to_string(census.conjugacyClasses.size()) +
                           " classes of elements with g^2 = e, component count " + std::to_string(cc.count) +
                           (cc.lowerBound ? " (lower bound)" : ""));
}

inline void coneGlue(const Scenario&, const Json& args, TaskRecord& rec) {
    std::vector<ConePolynomial> eqs;
    for (const auto& e : args.value("equations", Json::array())) {
        ConePolynomial p;
        for (const auto& t : e.at("terms")) p[t.at("exponents").get<std::vector<int>>()] = complexFromJson<Rational>(t.at("coeff"));
        eqs.push_back(std::move(p));
    }
    std::vector<SigmaCoordRule> rules;
    for (const auto& r : args.at("rules")) rules.push_back({r.at("target").get<int>(), r.at("sign").get<int>(), 0});
    auto m = glueConeTwistor(eqs, args.at("weights").get<std::vector<int>>(), args.at("l").get<int>(), rules,
                             args.value("coordinates", std::vector<std::string>{}));
    rec.numbers["model"] = modelToJson(m);
    rec.numbers["degrees"] = m.degrees;
    rec.evidence.push_back("glued model has degrees " + Json(m.degrees).dump());
    if (args.contains("compareTo")) {
        auto ref = modelFromDescriptor(args.at("compareTo"));
        const bool same = sameStructure(m, ref);
        rec.numbers["matchesReference"] = same;
        rec.check(same, "degrees, equations and rules agree with " + ref.name);
    }
}

} // namespace ops

/// Runs one task; domain errors become failed records, input errors propagate.
inline TaskRecord runTask(const Scenario& s, const std::optional<TwistorModel>& model, const TaskEntry& t) {
    TaskRecord rec;
    rec.op = t.op;
    rec.inputs = t.args;
    try {
        if (t.op == "quotient-census") ops::quotientCensus(s, t.args, rec);
        else if (t.op == "cone-glue") ops::coneGlue(s, t.args, rec);
        else {
            const TwistorModel& m = *model;
            if (t.op == "validate") ops::validate(s, m, t.args, rec);
            else if (t.op == "sections") ops::sections(s, m, t.args, rec);
            else if (t.op == "solve-fiber") ops::solveFiber(s, m, t.args, rec);
            else if (t.op == "singular-scan") ops::singularScanOp(s, m, t.args, rec);
            else if (t.op == "branch") ops::branch(s, m, t.args, rec);
            else if (t.op == "normal-bundle") ops::normalBundle(s, m, t.args, rec);
            else if (t.op == "classify") ops::classify(s, m, t.args, rec);
            else if (t.op == "matrix-model") ops::matrixModel(s, m, t.args, rec);
        }
    } catch (const ParseError&) {
        throw;
    } catch (const DimensionError& e) {
        throw ParseError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad arguments for ") + t.op + ": " + e.what());
    } catch (const Error& e) {
        rec.numbers["error"] = e.what();
        rec.status = "fail";
        rec.evidence.push_back(std::string("error: ") + e.what());
        return rec;
    }
    detail::applyExpectations(rec, t.args);
    return rec;
}

inline Report runScenario(const Scenario& s) {
    Report rep;
    rep.seed = s.seed;
    rep.exact = s.exact;
    rep.tol = s.tol;
    std::optional<TwistorModel> model;
    if (!s.model.is_null()) {
        model = modelFromDescriptor(s.model);
        rep.model = model->name;
    }
    for (const auto& t : s.tasks) rep.tasks.push_back(runTask(s, model, t));
    return rep;
}

inline void writeReport(const Report& rep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write report to " + path);
    f << std::setw(2) << rep.toJson() << '\n';
}

/// Exit 0 when every check passes, 1 when one fails, 2 on input errors.
inline int runScenarioFile(const std::string& path, const std::string& outOverride, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream f(path);
        if (!f) throw ParseError("cannot read scenario " + path);
        Json j;
        try {
            j = Json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
        }
        Scenario s = parseScenario(j);
        if (!outOverride.empty()) s.outputPath = outOverride;
        Report rep = runScenario(s);
        out << rep.summary();
        if (!s.outputPath.empty()) writeReport(rep, s.outputPath);
        return rep.anyFailed() ? 1 : 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace twistor
