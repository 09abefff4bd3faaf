#include "csl/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "csl/cli/writers.hpp"

namespace csl::cli {

namespace {

using njson = nlohmann::ordered_json;

std::string join_errors(const ConfigReport& rep) {
    std::string msg = "invalid config";
    for (const auto& e : rep.errors) {
        msg += "\n  ";
        msg += e;
    }
    return msg;
}

std::string dotted(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void reject_unknown(const njson& obj, std::initializer_list<const char*> known,
                    const std::string& path, ConfigReport& rep) {
    for (const auto& item : obj.items()) {
        bool recognized = false;
        for (const char* k : known) recognized = recognized || item.key() == k;
        if (!recognized)
            rep.errors.push_back(dotted(path, item.key()) + ": unknown key (strict schema)");
    }
}

const njson* member(const njson& parent, const char* key) {
    auto it = parent.find(key);
    return it == parent.end() ? nullptr : &*it;
}

const njson* require_object(const njson& parent, const char* key, const std::string& path,
                            ConfigReport& rep) {
    const njson* j = member(parent, key);
    if (!j) {
        rep.errors.push_back(dotted(path, key) + ": missing required key");
        return nullptr;
    }
    if (!j->is_object()) {
        rep.errors.push_back(dotted(path, key) + ": expected an object");
        return nullptr;
    }
    return j;
}

bool read_double(const njson& obj, const char* key, const std::string& path, bool required,
                 double& dst, ConfigReport& rep) {
    const njson* j = member(obj, key);
    if (!j) {
        if (required) rep.errors.push_back(dotted(path, key) + ": missing required key");
        return false;
    }
    if (!j->is_number()) {
        rep.errors.push_back(dotted(path, key) + ": expected a number");
        return false;
    }
    dst = j->get<double>();
    return true;
}

bool read_int(const njson& obj, const char* key, const std::string& path, bool required,
              int& dst, ConfigReport& rep) {
    const njson* j = member(obj, key);
    if (!j) {
        if (required) rep.errors.push_back(dotted(path, key) + ": missing required key");
        return false;
    }
    if (!j->is_number_integer()) {
        rep.errors.push_back(dotted(path, key) + ": expected an integer");
        return false;
    }
    dst = j->get<int>();
    return true;
}

void read_bool(const njson& obj, const char* key, const std::string& path, bool& dst,
               ConfigReport& rep) {
    const njson* j = member(obj, key);
    if (!j) return;
    if (!j->is_boolean()) {
        rep.errors.push_back(dotted(path, key) + ": expected a boolean");
        return;
    }
    dst = j->get<bool>();
}

bool read_string(const njson& obj, const char* key, const std::string& path, bool required,
                 std::string& dst, ConfigReport& rep) {
    const njson* j = member(obj, key);
    if (!j) {
        if (required) rep.errors.push_back(dotted(path, key) + ": missing required key");
        return false;
    }
    if (!j->is_string()) {
        rep.errors.push_back(dotted(path, key) + ": expected a string");
        return false;
    }
    dst = j->get<std::string>();
    return true;
}

void parse_profile(const njson& obj, const std::string& path, ClumpProfile& dst,
                   ConfigReport& rep) {
    reject_unknown(obj, {"n_particles", "sigma", "center"}, path, rep);
    read_double(obj, "n_particles", path, true, dst.n_particles, rep);
    read_double(obj, "sigma", path, true, dst.sigma, rep);
    read_double(obj, "center", path, true, dst.center, rep);
}

void parse_clumps(const njson& obj, ScenarioConfig& cfg, ConfigReport& rep) {
    if (obj.contains("left") || obj.contains("right")) {
        reject_unknown(obj, {"left", "right"}, "clumps", rep);
        if (const njson* jl = require_object(obj, "left", "clumps", rep))
            parse_profile(*jl, "clumps.left", cfg.clumps.left, rep);
        if (const njson* jr = require_object(obj, "right", "clumps", rep))
            parse_profile(*jr, "clumps.right", cfg.clumps.right, rep);
        return;
    }
    // compact form: shared N, sigma, centered at +-separation/2
    reject_unknown(obj, {"n_particles", "sigma", "separation"}, "clumps", rep);
    double n = 1.0, sigma = 1.0, sep = 0.0;
    bool have_n = read_double(obj, "n_particles", "clumps", true, n, rep);
    bool have_s = read_double(obj, "sigma", "clumps", true, sigma, rep);
    bool have_d = read_double(obj, "separation", "clumps", true, sep, rep);
    if (have_d && sep < 0)
        rep.errors.push_back("clumps.separation: must be >= 0");
    if (have_n && have_s && have_d) {
        cfg.clumps.left = ClumpProfile{n, sigma, -0.5 * sep};
        cfg.clumps.right = ClumpProfile{n, sigma, +0.5 * sep};
    }
}

void parse_tolerances(const njson& obj, Tolerances& tol, ConfigReport& rep) {
    reject_unknown(obj, {"element", "moment", "residual", "trace"}, "numerics.tolerances", rep);
    read_double(obj, "element", "numerics.tolerances", false, tol.element, rep);
    read_double(obj, "moment", "numerics.tolerances", false, tol.moment, rep);
    read_double(obj, "residual", "numerics.tolerances", false, tol.residual, rep);
    read_double(obj, "trace", "numerics.tolerances", false, tol.trace, rep);
    if (tol.element <= 0 || tol.moment <= 0 || tol.residual <= 0 || tol.trace <= 0)
        rep.errors.push_back("numerics.tolerances: all tolerances must be positive");
}

void parse_output(const njson& obj, OutputSpec& out, ConfigReport& rep) {
    reject_unknown(obj, {"directory", "formats"}, "output", rep);
    read_string(obj, "directory", "output", false, out.directory, rep);
    if (out.directory.empty()) rep.errors.push_back("output.directory: must not be empty");
    const njson* jf = member(obj, "formats");
    if (!jf) return;
    if (!jf->is_array()) {
        rep.errors.push_back("output.formats: expected an array of strings");
        return;
    }
    out.formats.clear();
    for (const auto& item : *jf) {
        if (!item.is_string()) {
            rep.errors.push_back("output.formats: expected an array of strings");
            return;
        }
        std::string f = item.get<std::string>();
        if (f != "csv" && f != "json") {
            rep.errors.push_back("output.formats: unknown format '" + f + "' (csv, json)");
            continue;
        }
        for (const auto& seen : out.formats)
            if (seen == f) rep.errors.push_back("output.formats: duplicate format '" + f + "'");
        out.formats.push_back(f);
    }
    if (out.formats.empty()) rep.errors.push_back("output.formats: must not be empty");
}

void semantic_checks(ScenarioConfig& cfg, ConfigReport& rep) {
    try {
        cfg.model.validate();
        build_mode_grid(cfg.model);  // also needs >= 2 modes below the cutoff
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("model: ") + e.what());
    }
    try {
        cfg.clumps.left.validate();
        cfg.clumps.right.validate();
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("clumps: ") + e.what());
    }
    if (cfg.clumps.left.n_particles != cfg.clumps.right.n_particles ||
        cfg.clumps.left.sigma != cfg.clumps.right.sigma)
        rep.errors.push_back("clumps: profiles must share n_particles and sigma");
    if (!(cfg.times.t_final > 0)) rep.errors.push_back("times.t_final: must be positive");
    if (cfg.times.samples < 1) rep.errors.push_back("times.samples: must be >= 1");
    if (cfg.numerics.n_max < 0) rep.errors.push_back("numerics.n_max: must be >= 0");
    if (cfg.numerics.dt < 0) rep.errors.push_back("numerics.dt: must be >= 0");

    if (rep.errors.empty()) {
        if (narrow_width_warning(cfg.clumps.left, cfg.model.m) ||
            narrow_width_warning(cfg.clumps.right, cfg.model.m))
            rep.warnings.push_back(
                "clumps: sigma*m < 1, narrower than the wide-clump regime (width >> 1/m) the "
                "closed forms assume");
        if (cfg.times.stroboscopic && cfg.times.t_final < oscillation_period(cfg.model.m))
            rep.warnings.push_back(
                "times: t_final is below one oscillation period; no stroboscopic samples");
    }
}

}  // namespace

ConfigError::ConfigError(const ConfigReport& rep)
    : std::runtime_error(join_errors(rep)), report(rep) {}

const char* study_name(Study s) {
    switch (s) {
        case Study::decoherence: return "decoherence";
        case Study::production: return "production";
        case Study::kernel: return "kernel";
        case Study::field_exponent: return "field-exponent";
        case Study::oracle_check: return "oracle-check";
    }
    return "?";
}

std::optional<Study> study_from_name(const std::string& name) {
    for (Study s : {Study::decoherence, Study::production, Study::kernel, Study::field_exponent,
                    Study::oracle_check})
        if (name == study_name(s)) return s;
    return std::nullopt;
}

ConfigReport check_config(const std::string& path, ScenarioConfig* out) {
    ConfigReport rep;
    ScenarioConfig cfg;

    std::ifstream in(path);
    if (!in) {
        rep.errors.push_back("cannot open config file: " + path);
        return rep;
    }
    njson root;
    try {
        root = njson::parse(in);
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("json parse error: ") + e.what());
        return rep;
    }
    if (!root.is_object()) {
        rep.errors.push_back("config root: expected an object");
        return rep;
    }

    reject_unknown(root, {"model", "clumps", "times", "study", "numerics", "output"}, "", rep);

    if (const njson* jm = require_object(root, "model", "", rep)) {
        reject_unknown(*jm, {"mass", "lambda", "box_length", "k_max"}, "model", rep);
        read_double(*jm, "mass", "model", true, cfg.model.m, rep);
        read_double(*jm, "lambda", "model", true, cfg.model.lambda, rep);
        read_double(*jm, "box_length", "model", true, cfg.model.box_length, rep);
        read_double(*jm, "k_max", "model", true, cfg.model.k_max, rep);
    }

    if (const njson* jc = require_object(root, "clumps", "", rep)) parse_clumps(*jc, cfg, rep);

    if (const njson* jt = require_object(root, "times", "", rep)) {
        reject_unknown(*jt, {"t_final", "samples", "stroboscopic"}, "times", rep);
        read_double(*jt, "t_final", "times", true, cfg.times.t_final, rep);
        read_int(*jt, "samples", "times", true, cfg.times.samples, rep);
        read_bool(*jt, "stroboscopic", "times", cfg.times.stroboscopic, rep);
    }

    std::string study;
    if (read_string(root, "study", "", true, study, rep)) {
        if (auto s = study_from_name(study)) {
            cfg.study = *s;
        } else {
            rep.errors.push_back(
                "study: unknown study '" + study +
                "' (decoherence, production, kernel, field-exponent, oracle-check)");
        }
    }

    if (const njson* jn = member(root, "numerics")) {
        if (!jn->is_object()) {
            rep.errors.push_back("numerics: expected an object");
        } else {
            reject_unknown(*jn, {"n_max", "dt", "tolerances"}, "numerics", rep);
            read_int(*jn, "n_max", "numerics", false, cfg.numerics.n_max, rep);
            read_double(*jn, "dt", "numerics", false, cfg.numerics.dt, rep);
            if (const njson* jt = member(*jn, "tolerances")) {
                if (!jt->is_object())
                    rep.errors.push_back("numerics.tolerances: expected an object");
                else
                    parse_tolerances(*jt, cfg.numerics.tolerances, rep);
            }
        }
    }

    if (const njson* jo = member(root, "output")) {
        if (!jo->is_object())
            rep.errors.push_back("output: expected an object");
        else
            parse_output(*jo, cfg.output, rep);
    }

    if (rep.errors.empty()) semantic_checks(cfg, rep);
    if (rep.errors.empty() && out) *out = cfg;
    return rep;
}

ScenarioConfig load_config(const std::string& path) {
    ScenarioConfig cfg;
    ConfigReport rep = check_config(path, &cfg);
    if (!rep.ok()) throw ConfigError(rep);
    return cfg;
}

std::vector<std::pair<std::string, std::string>> config_echo_flat(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto num = [](double v) { return format_value(v); };
    auto add = [&kv](const char* key, std::string value) {
        kv.emplace_back(std::string("config.") + key, std::move(value));
    };
    add("model.mass", num(cfg.model.m));
    add("model.lambda", num(cfg.model.lambda));
    add("model.box_length", num(cfg.model.box_length));
    add("model.k_max", num(cfg.model.k_max));
    add("clumps.left.n_particles", num(cfg.clumps.left.n_particles));
    add("clumps.left.sigma", num(cfg.clumps.left.sigma));
    add("clumps.left.center", num(cfg.clumps.left.center));
    add("clumps.right.n_particles", num(cfg.clumps.right.n_particles));
    add("clumps.right.sigma", num(cfg.clumps.right.sigma));
    add("clumps.right.center", num(cfg.clumps.right.center));
    add("times.t_final", num(cfg.times.t_final));
    add("times.samples", std::to_string(cfg.times.samples));
    add("times.stroboscopic", cfg.times.stroboscopic ? "true" : "false");
    add("study", study_name(cfg.study));
    add("numerics.n_max", std::to_string(cfg.numerics.n_max));
    add("numerics.dt", num(cfg.numerics.dt));
    add("numerics.tolerances.element", num(cfg.numerics.tolerances.element));
    add("numerics.tolerances.moment", num(cfg.numerics.tolerances.moment));
    add("numerics.tolerances.residual", num(cfg.numerics.tolerances.residual));
    add("numerics.tolerances.trace", num(cfg.numerics.tolerances.trace));
    add("output.directory", cfg.output.directory);
    std::string formats;
    for (const auto& f : cfg.output.formats) {
        if (!formats.empty()) formats += ",";
        formats += f;
    }
    add("output.formats", formats);
    return kv;
}

}  // namespace csl::cli
