#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "twistor/scenario.hpp"

using namespace twistor;

namespace {

/// "a", "a+bi", "bi", "a-bi" with rational or decimal parts -> ["re", "im"].
Json complexToken(std::string tok) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char ch) { return std::isspace(ch); }), tok.end());
    if (tok.empty()) throw ParseError("empty complex number");
    auto checked = [&](const std::string& t) {
        parseRational(t);
        return t;
    };
    if (tok.back() != 'i') return Json::array({checked(tok), "0"});
    tok.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t k = tok.size(); k-- > 1;)
        if ((tok[k] == '+' || tok[k] == '-') && tok[k - 1] != 'e' && tok[k - 1] != 'E') {
            cut = k;
            break;
        }
    std::string re = cut == std::string::npos ? "0" : tok.substr(0, cut);
    std::string im = cut == std::string::npos ? tok : tok.substr(cut);
    if (im.empty() || im == "+" || im == "-") im += "1";
    if (im[0] == '+') im.erase(0, 1);
    return Json::array({checked(re), checked(im)});
}

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else cur.push_back(c);
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

Json realList(const std::string& s) {
    Json a = Json::array();
    for (const auto& t : splitList(s)) {
        parseRational(t);
        a.push_back(t);
    }
    return a;
}

Json zetaArg(const std::string& s) {
    if (s == "inf" || s == "infinity") return "inf";
    return complexToken(s);
}

Json modelArg(const std::string& s) {
    if (!std::filesystem::exists(s)) return Json{{"builtin", s}};
    std::ifstream f(s);
    Json j;
    try {
        j = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file is not valid JSON: " + std::string(e.what()));
    }
    if (j.contains("degrees")) return Json{{"custom", j}};
    return j;
}

Json conePreset(const std::string& name) {
    if (name == "sl2")
        return {{"equations", Json::array({{{"terms", Json::array({{{"exponents", {1, 1, 0}}, {"coeff", 1}},
                                                                   {{"exponents", {0, 0, 2}}, {"coeff", -1}}})}}})},
                {"weights", {1, 1, 1}},
                {"l", 2},
                {"rules", Json::array({{{"target", 1}, {"sign", 1}}, {{"target", 0}, {"sign", 1}}, {{"target", 2}, {"sign", -1}}})},
                {"coordinates", {"x", "y", "z"}},
                {"compareTo", "quadric"}};
    if (name == "flat")
        return {{"equations", Json::array()},
                {"weights", {1, 1}},
                {"l", 1},
                {"rules", Json::array({{{"target", 1}, {"sign", -1}}, {{"target", 0}, {"sign", 1}}})},
                {"coordinates", {"a", "b"}},
                {"compareTo", "smooth-O11"}};
    throw ParseError("unknown cone preset '" + name + "'");
}

struct Common {
    std::string model = "quadric";
    double tol = 1e-9;
    std::uint64_t seed = 2024;
    std::string out;
    bool exact = false;
};

void addCommon(CLI::App* sub, Common& c, bool withModel = true) {
    if (withModel) sub->add_option("--model", c.model, "builtin model (quadric, deformed, smooth-O11) or JSON file");
    sub->add_option("--tol", c.tol, "membership tolerance");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--out", c.out, "write the JSON report here");
    sub->add_flag("--exact", c.exact, "exact rational arithmetic where supported");
}

int runSingle(const std::string& op, const Common& c, Json args, bool needsModel) {
    Json sc;
    if (needsModel) sc["model"] = modelArg(c.model);
    sc["seed"] = c.seed;
    sc["exact"] = c.exact;
    sc["tolerances"] = {{"membership", c.tol}};
    args["op"] = op;
    sc["tasks"] = Json::array({args});
    Scenario s = parseScenario(sc);
    Report rep = runScenario(s);
    std::cout << rep.summary();
    if (!c.out.empty()) writeReport(rep, c.out);
    return rep.anyFailed() ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twistor-space real section toolkit"};
    app.require_subcommand(1);
    Common c;

    std::string scenarioPath;
    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenarioPath, "scenario JSON")->required();
    run->add_option("--out", c.out, "override the scenario's report path");

    auto* validate = app.add_subcommand("validate", "check sigma compatibility and fiber dimension");
    addCommon(validate, c);

    std::string section;
    auto* sections = app.add_subcommand("sections", "print the real section system; test a section with --section");
    addCommon(sections, c);
    sections->add_option("--section", section, "comma-separated real parameters");

    std::string zeta = "0", point;
    int starts = 48;
    auto* solve = app.add_subcommand("solve-fiber", "real sections through a fiber point");
    addCommon(solve, c);
    solve->add_option("--zeta", zeta, "fiber: complex number or inf");
    solve->add_option("--point", point, "comma-separated fiber coordinates (a, a+bi, bi)")->required();
    solve->add_option("--starts", starts, "multistart count for models without a closed form");

    int samples = 200;
    bool noOrigin = false;
    auto* scan = app.add_subcommand("singular-scan", "Jacobian rank over sampled sections and the origin");
    addCommon(scan, c);
    scan->add_option("--samples", samples, "number of sampled sections");
    scan->add_flag("--no-origin", noOrigin, "do not add the origin");

    std::string zetas;
    int randomZetas = 5;
    auto* branch = app.add_subcommand("branch", "incidence-rank branching test");
    addCommon(branch, c);
    branch->add_option("--section", section, "comma-separated real parameters")->required();
    branch->add_option("--zetas", zetas, "comma-separated fibers (complex or inf)");
    branch->add_option("--random-zetas", randomZetas, "additional random fibers");

    auto* normal = app.add_subcommand("normal-bundle", "splitting type of the normal sheaf along a section");
    addCommon(normal, c);
    normal->add_option("--section", section, "comma-separated real parameters")->required();

    int classifySamples = 40;
    auto* classify = app.add_subcommand("classify", "hypercomplex vs weakly hypercomplex");
    addCommon(classify, c);
    classify->add_option("--samples", classifySamples, "sampled regular sections");

    std::string ab, variant = "minus";
    auto* matrix = app.add_subcommand("matrix-model", "symmetric-matrix model of a quadric section");
    addCommon(matrix, c);
    matrix->add_option("--section", section, "comma-separated real parameters (9, or x0,x1,x2,z0,r)");
    matrix->add_option("--ab", ab, "a,b of a real O(1)+O(1) section, squared");
    matrix->add_option("--variant", variant, "minus or plus")->check(CLI::IsMember({"minus", "plus"}));

    std::string group, groupFile;
    auto* census = app.add_subcommand("quotient-census", "involution census and component count");
    addCommon(census, c, false);
    census->add_option("--group", group, "Z<k>, Q8, BD<4n>, 2T");
    census->add_option("--group-file", groupFile, "JSON with elements or table");

    std::string preset = "sl2", argsFile;
    auto* cone = app.add_subcommand("cone-glue", "twistor model of a weighted cone");
    addCommon(cone, c, false);
    cone->add_option("--preset", preset, "sl2 or flat");
    cone->add_option("--args", argsFile, "JSON arguments (equations, weights, l, rules, compareTo)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return runScenarioFile(scenarioPath, c.out, std::cout, std::cerr);
        if (*validate) return runSingle("validate", c, Json::object(), true);
        if (*sections) {
            Json a = Json::object();
            if (!section.empty()) a["section"] = realList(section);
            return runSingle("sections", c, a, true);
        }
        if (*solve) {
            Json pts = Json::array();
            for (const auto& t : splitList(point)) pts.push_back(complexToken(t));
            return runSingle("solve-fiber", c, {{"zeta", zetaArg(zeta)}, {"point", pts}, {"starts", starts}}, true);
        }
        if (*scan) return runSingle("singular-scan", c, {{"samples", samples}, {"includeOrigin", !noOrigin}}, true);
        if (*branch) {
            Json zs = Json::array();
            if (!zetas.empty())
                for (const auto& t : splitList(zetas)) zs.push_back(zetaArg(t));
            return runSingle("branch", c, {{"section", realList(section)}, {"zetas", zs}, {"randomZetas", randomZetas}}, true);
        }
        if (*normal) return runSingle("normal-bundle", c, {{"section", realList(section)}}, true);
        if (*classify) return runSingle("classify", c, {{"samples", classifySamples}}, true);
        if (*matrix) {
            Json a = Json::object();
            if (!ab.empty()) {
                auto parts = splitList(ab);
                if (parts.size() != 2) throw ParseError("--ab takes two complex numbers");
                a["ab"] = Json::array({complexToken(parts[0]), complexToken(parts[1])});
                a["variant"] = variant;
            } else if (!section.empty()) a["section"] = realList(section);
            else throw ParseError("matrix-model needs --section or --ab");
            return runSingle("matrix-model", c, a, true);
        }
        if (*census) {
            Json a = Json::object();
            if (!groupFile.empty()) {
                std::ifstream f(groupFile);
                if (!f) throw ParseError("cannot read " + groupFile);
                a = Json::parse(f);
            } else if (!group.empty()) a["group"] = group;
            else throw ParseError("quotient-census needs --group or --group-file");
            return runSingle("quotient-census", c, a, false);
        }
        if (*cone) {
            Json a;
            if (!argsFile.empty()) {
                std::ifstream f(argsFile);
                if (!f) throw ParseError("cannot read " + argsFile);
                a = Json::parse(f);
            } else a = conePreset(preset);
            return runSingle("cone-glue", c, a, false);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
