#include "matrixtx/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace matrixtx {

namespace {

using nlohmann::json;

double parse_number_with_unit(const std::string& text,
                              const std::vector<std::pair<std::string, double>>& units,
                              const char* kind) {
    std::istringstream in(text);
    double value = 0.0;
    in >> value;
    if (in.fail())
        throw ConfigError(std::string("cannot parse ") + kind + " value '" + text + "'");
    std::string unit;
    in >> unit;
    if (unit.empty())
        throw ConfigError(std::string(kind) + " value '" + text +
                          "' needs a unit suffix");
    for (const auto& [name, scale] : units)
        if (unit == name) return value * scale;
    throw ConfigError(std::string("unknown ") + kind + " unit '" + unit + "' in '" +
                      text + "'");
}

double quantity(const json& v, const char* kind,
                const std::vector<std::pair<std::string, double>>& units) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_number_with_unit(v.get<std::string>(), units, kind);
    throw ConfigError(std::string(kind) + " must be a number (SI) or a string with unit");
}

const std::vector<std::pair<std::string, double>> kLengthUnits = {
    {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
const std::vector<std::pair<std::string, double>> kTimeUnits = {
    {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
const std::vector<std::pair<std::string, double>> kDiffusivityUnits = {
    {"m^2/s", 1.0}, {"m2/s", 1.0}, {"um^2/s", 1e-12}, {"um2/s", 1e-12}};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

const std::set<std::string> kKnownModels = {
    "lee", "frenning", "crank", "fdm", "pbs", "point", "closed_form", "convolution"};

}  // namespace

double parse_length(const std::string& text) {
    return parse_number_with_unit(text, kLengthUnits, "length");
}
double parse_time(const std::string& text) {
    return parse_number_with_unit(text, kTimeUnits, "time");
}
double parse_diffusivity(const std::string& text) {
    return parse_number_with_unit(text, kDiffusivityUnits, "diffusivity");
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text,
                                              const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
    reject_unknown_keys(root, {"matrix", "geometry", "models", "time_grid", "pbs", "output"},
                        origin);

    ScenarioConfig cfg;

    if (!root.contains("matrix")) throw ConfigError(origin + ": missing 'matrix' section");
    {
        const json& m = root["matrix"];
        reject_unknown_keys(m, {"loading_ratio", "radius", "diffusivity", "molecules"},
                            "'matrix'");
        if (!m.contains("loading_ratio"))
            throw ConfigError("'matrix' needs 'loading_ratio'");
        if (m["loading_ratio"].is_array()) {
            for (const auto& v : m["loading_ratio"])
                cfg.loading_ratios.push_back(v.get<double>());
        } else {
            cfg.loading_ratios.push_back(m["loading_ratio"].get<double>());
        }
        if (m.contains("radius")) cfg.radius = quantity(m["radius"], "length", kLengthUnits);
        if (m.contains("diffusivity"))
            cfg.diffusivity = quantity(m["diffusivity"], "diffusivity", kDiffusivityUnits);
        if (m.contains("molecules")) cfg.molecules = m["molecules"].get<double>();
    }

    if (root.contains("geometry")) {
        const json& g = root["geometry"];
        reject_unknown_keys(g, {"rx_radius", "distance"}, "'geometry'");
        if (!g.contains("rx_radius") || !g.contains("distance"))
            throw ConfigError("'geometry' needs 'rx_radius' and 'distance'");
        cfg.rx_radius = quantity(g["rx_radius"], "length", kLengthUnits);
        cfg.distance = quantity(g["distance"], "length", kLengthUnits);
        cfg.has_geometry = true;
    }

    if (!root.contains("models")) throw ConfigError(origin + ": missing 'models' list");
    for (const auto& v : root["models"]) {
        const std::string name = v.get<std::string>();
        if (!kKnownModels.count(name))
            throw ConfigError("unknown model '" + name + "' in 'models'");
        cfg.models.push_back(name);
    }

    if (!root.contains("time_grid"))
        throw ConfigError(origin + ": missing 'time_grid' section");
    {
        const json& t = root["time_grid"];
        reject_unknown_keys(t, {"min", "max", "points", "spacing"}, "'time_grid'");
        if (!t.contains("max") || !t.contains("points"))
            throw ConfigError("'time_grid' needs 'max' and 'points'");
        if (t.contains("min")) cfg.grid.min = quantity(t["min"], "time", kTimeUnits);
        cfg.grid.max = quantity(t["max"], "time", kTimeUnits);
        cfg.grid.points = t["points"].get<int>();
        if (t.contains("spacing")) {
            const std::string s = t["spacing"].get<std::string>();
            if (s == "log")
                cfg.grid.log_spacing = true;
            else if (s == "linear")
                cfg.grid.log_spacing = false;
            else
                throw ConfigError("'time_grid.spacing' must be 'linear' or 'log'");
        }
    }

    if (root.contains("pbs")) {
        const json& p = root["pbs"];
        reject_unknown_keys(p, {"time_step", "realizations", "record_stride", "seed"},
                            "'pbs'");
        if (p.contains("time_step"))
            cfg.pbs.time_step = quantity(p["time_step"], "time", kTimeUnits);
        if (p.contains("realizations")) cfg.pbs.realizations = p["realizations"].get<int>();
        if (p.contains("record_stride"))
            cfg.pbs.record_stride = p["record_stride"].get<int>();
        if (p.contains("seed")) cfg.pbs.seed = p["seed"].get<std::uint64_t>();
    }

    if (root.contains("output")) cfg.output = root["output"].get<std::string>();

    cfg.validate_base();
    return cfg;
}

void ScenarioConfig::validate_base() const {
    if (models.empty()) throw ConfigError("'models' must select at least one model");
    if (loading_ratios.empty()) throw ConfigError("need at least one loading ratio");
    for (double r : loading_ratios)
        if (!(r >= 1.0)) throw ConfigError("loading ratios must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("matrix radius must be > 0");
    if (!(diffusivity > 0.0)) throw ConfigError("diffusivity must be > 0");
    if (molecules < 0.0) throw ConfigError("molecule count must be >= 0");
    if (grid.points < 2) throw ConfigError("time grid needs at least 2 points");
    if (!(grid.max > grid.min)) throw ConfigError("time grid max must exceed min");
    if (grid.min < 0.0) throw ConfigError("time grid min must be >= 0");
    if (grid.log_spacing && !(grid.min > 0.0))
        throw ConfigError("log-spaced time grid needs min > 0");
    if (pbs.time_step <= 0.0) throw ConfigError("pbs time_step must be > 0");
    if (pbs.realizations < 1) throw ConfigError("pbs realizations must be >= 1");
    if (pbs.record_stride < 1) throw ConfigError("pbs record_stride must be >= 1");
}

}  // namespace matrixtx
