#include "spdelab/harness/config.hpp"

#include <fstream>

#include "spdelab/errors.hpp"
#include "spdelab/harness/experiments.hpp"

namespace spdelab::harness {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw InvalidArgument("config field '" + field + "': " + what);
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path, double fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) fail(path + key, "expected a number");
    return v->get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& path,
                      std::size_t fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer() || v->get<long long>() < 0)
        fail(path + key, "expected a non-negative integer");
    return v->get<std::size_t>();
}

const json& get_object(const json& obj, const char* key, const std::string& path) {
    const json* v = find(obj, key);
    if (!v) fail(path + key, "missing");
    if (!v->is_object()) fail(path + key, "expected an object");
    return *v;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    ExperimentConfig c;

    const json* name = find(doc, "experiment");
    if (!name || !name->is_string()) fail("experiment", "missing or not a string");
    c.experiment = name->get<std::string>();
    if (!known_experiment(c.experiment)) fail("experiment", "unknown experiment '" + c.experiment + "'");

    const json& fam = get_object(doc, "family", "");
    const json* fname = find(fam, "name");
    if (!fname || !fname->is_string()) fail("family.name", "missing or not a string");
    c.family = parse_family(fname->get<std::string>());
    c.params.d = get_count(fam, "d", "family.", 1);
    const json* sigma = find(fam, "sigma");
    if (!sigma || !sigma->is_array() || sigma->empty()) fail("family.sigma", "expected a non-empty array");
    for (const auto& s : *sigma) {
        if (!s.is_number()) fail("family.sigma", "entries must be numbers");
        c.params.sigma.push_back(s.get<double>());
    }
    c.params.f0 = get_number(fam, "f0", "family.", 0.0);
    c.params.kappa = get_number(fam, "kappa", "family.", 0.0);
    c.params.amplitude = get_number(fam, "amplitude", "family.", 0.0);
    c.params.epsilon = get_number(fam, "epsilon", "family.", 0.0);
    if (c.params.d > c.params.sigma.size()) fail("family.d", "d must not exceed d0 = len(sigma)");
    // Constructing the set runs the family's own parameter checks.
    try {
        CoefficientSet probe(c.family, c.params);
    } catch (const InvalidArgument& e) {
        fail("family", e.what());
    }

    const json& dom = get_object(doc, "domain", "");
    std::string mode = "interval";
    if (const json* m = find(dom, "mode")) {
        if (!m->is_string()) fail("domain.mode", "expected a string");
        mode = m->get<std::string>();
    }
    const double a = get_number(dom, "a", "domain.", 0.0);
    const double b = get_number(dom, "b", "domain.", 1.0);
    const double T = get_number(dom, "T", "domain.", 1.0);
    if (mode != "interval" && mode != "truncated-line")
        fail("domain.mode", "expected 'interval' or 'truncated-line'");
    try {
        c.domain = mode == "interval" ? DomainSpec::interval(a, b, T)
                                      : DomainSpec::truncated_line(a, b, T);
    } catch (const InvalidArgument& e) {
        fail("domain", e.what());
    }

    const json* levels = find(doc, "levels");
    if (!levels) {
        c.levels.push_back(Level{});
    } else {
        if (!levels->is_array() || levels->empty()) fail("levels", "expected a non-empty array");
        for (std::size_t i = 0; i < levels->size(); ++i) {
            const json& l = (*levels)[i];
            const std::string p = "levels[" + std::to_string(i) + "].";
            if (!l.is_object()) fail(p, "expected an object");
            Level lv;
            lv.nx = get_count(l, "nx", p, lv.nx);
            lv.steps = get_count(l, "steps", p, lv.steps);
            if (lv.nx < kMinGridNodes) fail(p + "nx", "too few grid nodes");
            if (lv.steps < 1) fail(p + "steps", "need at least one step");
            c.levels.push_back(lv);
        }
    }

    const json& mc = get_object(doc, "mc", "");
    c.paths = get_count(mc, "paths", "mc.", c.paths);
    c.dt_mc = get_number(mc, "dt", "mc.", c.dt_mc);
    const json* seed = find(mc, "seed");
    if (!seed) fail("mc.seed", "missing (the seed is mandatory)");
    if (!seed->is_number_unsigned()) fail("mc.seed", "expected a non-negative integer");
    c.seed = seed->get<std::uint64_t>();
    if (c.paths == 0) fail("mc.paths", "must be positive");
    if (!(c.dt_mc > 0.0)) fail("mc.dt", "must be positive");

    if (const json* s = find(doc, "solver")) {
        if (!s->is_object()) fail("solver", "expected an object");
        c.theta = get_number(*s, "theta", "solver.", c.theta);
        c.tol = get_number(*s, "tol", "solver.", c.tol);
        c.max_iter = get_count(*s, "max_iter", "solver.", c.max_iter);
        c.alpha = get_number(*s, "alpha", "solver.", c.alpha);
    }
    if (c.theta < 0.5 || c.theta > 1.0) fail("solver.theta", "must lie in [0.5, 1]");
    if (!(c.tol > 0.0)) fail("solver.tol", "must be positive");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) fail("solver.alpha", "must lie in (0, 1]");

    c.workers = get_count(doc, "workers", "", c.workers);
    if (c.workers == 0) fail("workers", "must be positive");
    if (const json* o = find(doc, "output_dir")) {
        if (!o->is_string()) fail("output_dir", "expected a string");
        c.output_dir = o->get<std::string>();
    }
    if (const json* o = find(doc, "options")) {
        if (!o->is_object()) fail("options", "expected an object");
        c.options = *o;
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
    json levels = json::array();
    for (const auto& l : c.levels) levels.push_back({{"nx", l.nx}, {"steps", l.steps}});
    return {
        {"experiment", c.experiment},
        {"family",
         {{"name", std::string(family_name(c.family))},
          {"d", c.params.d},
          {"sigma", c.params.sigma},
          {"f0", c.params.f0},
          {"kappa", c.params.kappa},
          {"amplitude", c.params.amplitude},
          {"epsilon", c.params.epsilon}}},
        {"domain",
         {{"mode", c.domain.absorbing() ? "interval" : "truncated-line"},
          {"a", c.domain.a},
          {"b", c.domain.b},
          {"T", c.domain.horizon}}},
        {"levels", levels},
        {"mc", {{"paths", c.paths}, {"dt", c.dt_mc}, {"seed", c.seed}}},
        {"solver", {{"theta", c.theta}, {"tol", c.tol}, {"max_iter", c.max_iter}, {"alpha", c.alpha}}},
        {"workers", c.workers},
        {"output_dir", c.output_dir.string()},
        {"options", c.options},
    };
}

}  // namespace spdelab::harness
