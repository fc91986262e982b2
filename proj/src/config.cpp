/*
* Copyright (C) 2026 The ironspec authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "ironspec/config.hpp"

#include "ironspec/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ironspec
{

using nlohmann::json;

namespace
{

/// Scale factor 10^decade * seconds, kept apart so decimal prefixes round exactly.
struct UnitAtom {
    int decade;
    double seconds;
    Dimension dim;
};

const std::map<std::string, UnitAtom, std::less<>>& unit_atoms()
{
    static const std::map<std::string, UnitAtom, std::less<>> atoms = {
        {"1", {0, 1.0, {}}},
        {"mol", {0, 1.0, {1, 0, 0}}},
        {"mmol", {-3, 1.0, {1, 0, 0}}},
        {"umol", {-6, 1.0, {1, 0, 0}}},
        {"nmol", {-9, 1.0, {1, 0, 0}}},
        {"pmol", {-12, 1.0, {1, 0, 0}}},
        {"M", {0, 1.0, {1, -1, 0}}},
        {"mM", {-3, 1.0, {1, -1, 0}}},
        {"uM", {-6, 1.0, {1, -1, 0}}},
        {"nM", {-9, 1.0, {1, -1, 0}}},
        {"pM", {-12, 1.0, {1, -1, 0}}},
        {"L", {0, 1.0, {0, 1, 0}}},
        {"mL", {-3, 1.0, {0, 1, 0}}},
        {"s", {0, 1.0, {0, 0, 1}}},
        {"min", {0, 60.0, {0, 0, 1}}},
        {"h", {0, 3600.0, {0, 0, 1}}},
        {"d", {0, 86400.0, {0, 0, 1}}},
    };
    return atoms;
}

UnitAtom parse_unit(std::string_view unit)
{
    UnitAtom out{0, 1.0, {}};
    if (unit.empty()) {
        return out;
    }
    int sign         = 1;
    std::size_t pos  = 0;
    bool first       = true;
    while (pos <= unit.size()) {
        const auto next = unit.find_first_of("/*", pos);
        const auto tok  = unit.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        auto it         = unit_atoms().find(tok);
        if (it == unit_atoms().end()) {
            if (!(first && tok.empty() && next != std::string_view::npos && unit[next] == '/')) {
                throw ConfigError("unknown unit '" + std::string(tok) + "' in '" + std::string(unit) + "'");
            }
        }
        else {
            out.decade += sign * it->second.decade;
            out.seconds = sign > 0 ? out.seconds * it->second.seconds : out.seconds / it->second.seconds;
            out.dim.mol += sign * it->second.dim.mol;
            out.dim.litre += sign * it->second.dim.litre;
            out.dim.second += sign * it->second.dim.second;
        }
        first = false;
        if (next == std::string_view::npos) {
            break;
        }
        sign = unit[next] == '/' ? -1 : 1;
        pos  = next + 1;
    }
    return out;
}

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return std::string(s.substr(a, b - a));
}

std::string dimension_text(const Dimension& d)
{
    std::ostringstream os;
    os << "mol^" << d.mol << " L^" << d.litre << " s^" << d.second;
    return os.str();
}

} // namespace

Quantity parse_quantity(std::string_view text)
{
    const auto s   = trim(text);
    double value   = 0;
    const char* b  = s.data();
    const char* e  = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc{} || ptr == b) {
        throw ConfigError("expected a number with an optional unit, got '" + s + "'");
    }
    const auto unit = parse_unit(trim(std::string_view(ptr, static_cast<std::size_t>(e - ptr))));
    if (unit.decade != 0) {
        // Shift the decimal exponent of the literal so that "150 nM" and "0.15 uM" give the same double.
        std::string literal(b, ptr);
        int exponent   = 0;
        const auto pos = literal.find_first_of("eE");
        if (pos != std::string::npos) {
            exponent = std::stoi(literal.substr(pos + 1));
            literal.resize(pos);
        }
        literal += "e" + std::to_string(exponent + unit.decade);
        std::from_chars(literal.data(), literal.data() + literal.size(), value);
    }
    return {value * unit.seconds, unit.dim};
}

Dimension unit_dimension(std::string_view unit)
{
    return parse_unit(unit).dim;
}

InputSchedule ProjectConfig::schedule() const
{
    return InputSchedule(tf_sat, switches);
}

Experiment ProjectConfig::experiment() const
{
    Experiment exp;
    exp.tf_sat     = tf_sat;
    exp.horizon    = horizon;
    exp.simulation = simulation;
    exp.switches   = switches;
    if (switches.empty()) {
        exp.cutoff_time = horizon;
    }
    return exp;
}

std::string ProjectConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ProjectConfig::require_point() const
{
    for (const auto& info : parameter_table()) {
        if (info.model_parameter && info.name != "Tf_sat" && bounds.contains(info.name) &&
            !points.count(std::string(info.name))) {
            throw ConfigError("parameter '" + std::string(info.name) + "' is given as a range, not a value");
        }
    }
}

namespace
{

class Reader
{
public:
    explicit Reader(ProjectConfig& cfg)
        : m_cfg(cfg)
    {
    }

    /// Value of `j` in canonical units of `expected`; logs the conversion.
    double quantity(const json& j, std::string_view expected, const std::string& what)
    {
        if (j.is_number()) {
            return j.get<double>();
        }
        if (!j.is_string()) {
            throw ConfigError(what + ": expected a number or a \"value unit\" string");
        }
        const auto text = j.get<std::string>();
        const auto q    = parse_quantity(text);
        const auto want = unit_dimension(expected);
        if (!(q.dimension == want)) {
            throw ConfigError(what + ": unit of '" + text + "' has dimension " + dimension_text(q.dimension) +
                              ", expected " + std::string(expected));
        }
        std::ostringstream log;
        log.precision(17);
        log << what << ": " << text << " -> " << q.value << " " << expected;
        m_cfg.conversions.push_back(log.str());
        return q.value;
    }

    Interval range(const json& j, std::string_view unit, const std::string& what)
    {
        if (!j.is_array() || j.size() != 2) {
            throw ConfigError(what + ": expected [lo, hi]");
        }
        const double lo = quantity(j[0], unit, what + ".lo");
        const double hi = quantity(j[1], unit, what + ".hi");
        if (!(lo <= hi)) {
            throw ConfigError(what + ": lower bound exceeds upper bound");
        }
        return {lo, hi};
    }

private:
    ProjectConfig& m_cfg;
};

std::string parameter_unit(const std::string& name)
{
    for (const auto& info : parameter_table()) {
        if (info.name == name) {
            return std::string(info.unit);
        }
    }
    return "1";
}

std::string canonical_name(const std::string& key)
{
    auto name = canonical_parameter_name(key);
    if (!name) {
        throw ConfigError("unknown parameter '" + key + "'");
    }
    return *name;
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

std::filesystem::path resolve(const json& j, const std::filesystem::path& base, const std::string& what)
{
    if (!j.is_string()) {
        throw ConfigError(what + ": expected a path string");
    }
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative() && !base.empty()) {
        p = base / p;
    }
    p = p.lexically_normal();
    if (!std::filesystem::exists(p)) {
        throw ConfigError(what + ": file '" + p.string() + "' does not exist");
    }
    return p;
}

template <class T>
T integer(const json& j, const std::string& what)
{
    if (!j.is_number_integer() && !j.is_number_unsigned()) {
        throw ConfigError(what + ": expected a non-negative integer");
    }
    if (j.is_number_integer() && j.get<long long>() < 0) {
        throw ConfigError(what + ": expected a non-negative integer");
    }
    return j.get<T>();
}

json interval_json(const Interval& x)
{
    return json::array({x.lo, x.hi});
}

} // namespace

void ProjectConfig::update_canonical()
{
    // Every value in s and mol/L, paths absolute.
    json c;
    for (const auto& name : points) {
        c["parameters"][name] = *parameters.get(name);
    }
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        c["bounds"][bounds.name(i)] = interval_json(bounds[i]);
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        c["targets"][targets.name(i)] = interval_json(targets[i]);
    }
    c["input"]["tf_sat"]   = tf_sat;
    c["input"]["switches"] = json::array();
    for (const auto& sw : switches) {
        c["input"]["switches"].push_back({{"time", sw.time}, {"value", sw.value}});
    }
    c["simulation"] = {{"horizon", horizon},
                       {"rel_tol", simulation.rel_tol},
                       {"abs_tol", simulation.abs_tol},
                       {"report_interval", simulation.report_interval},
                       {"max_steps", simulation.max_steps}};
    if (!formula_file.empty()) {
        c["formula_file"] = std::filesystem::absolute(formula_file).string();
    }
    c["formula"]        = formula;
    c["plateau_factor"] = plateau_factor;
    if (!constraint_file.empty()) {
        c["constraint_file"] = std::filesystem::absolute(constraint_file).string();
    }
    if (!box_file.empty()) {
        c["box_file"] = std::filesystem::absolute(box_file).string();
    }
    const auto& e    = exploration;
    c["exploration"] = {{"seed", e.seed},
                        {"samples", e.samples},
                        {"final_samples", e.final_samples},
                        {"rounds", e.rounds},
                        {"window", {e.window_start, e.window_end}},
                        {"rel_step", e.rel_step},
                        {"initial_half_width", e.initial_half_width},
                        {"growth", e.growth},
                        {"max_half_width", e.max_half_width},
                        {"threads", e.threads}};
    canonical = c.dump();
}

ProjectConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(json_text);
    }
    catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    check_keys(root,
               {"parameters", "bounds", "targets", "input", "simulation", "formula_file", "formula",
                "plateau_factor", "constraint_file", "box_file", "exploration"},
               "config");

    ProjectConfig cfg;
    cfg.parameters = reference_parameters();
    Reader rd(cfg);

    if (root.contains("parameters") && !root["parameters"].is_object()) {
        throw ConfigError("parameters: expected an object");
    }
    const json parameters_obj = root.value("parameters", json::object());
    for (const auto& [key, value] : parameters_obj.items()) {
        const auto name = canonical_name(key);
        if (name == "Tf_sat") {
            throw ConfigError("parameters: Tf_sat is the model input; set it under input.tf_sat");
        }
        cfg.parameters.set(name, rd.quantity(value, parameter_unit(name), "parameters." + name));
        cfg.points.insert(name);
    }
    if (root.contains("bounds") && !root["bounds"].is_object()) {
        throw ConfigError("bounds: expected an object");
    }
    const json bounds_obj = root.value("bounds", json::object());
    for (const auto& [key, value] : bounds_obj.items()) {
        const auto name = canonical_name(key);
        if (cfg.points.count(name)) {
            throw ConfigError("parameter '" + name + "' is given both as a value and as a range");
        }
        cfg.bounds.set(name, rd.range(value, parameter_unit(name), "bounds." + name));
    }
    if (root.contains("targets") && !root["targets"].is_object()) {
        throw ConfigError("targets: expected an object");
    }
    const json targets_obj = root.value("targets", json::object());
    for (const auto& [key, value] : targets_obj.items()) {
        if (!species_from_name(key)) {
            throw ConfigError("targets: unknown variable '" + key + "'");
        }
        cfg.targets.set(key, rd.range(value, "mol/L", "targets." + key));
    }

    if (root.contains("input")) {
        const auto& in = root["input"];
        check_keys(in, {"tf_sat", "switches"}, "input");
        if (in.contains("tf_sat")) {
            cfg.tf_sat = rd.quantity(in["tf_sat"], "1", "input.tf_sat");
        }
        if (in.contains("switches")) {
            if (!in["switches"].is_array()) {
                throw ConfigError("input.switches: expected an array");
            }
            for (const auto& sw : in["switches"]) {
                check_keys(sw, {"time", "value"}, "input.switches[]");
                if (!sw.contains("time") || !sw.contains("value")) {
                    throw ConfigError("input.switches[]: needs time and value");
                }
                cfg.switches.push_back(
                    {rd.quantity(sw["time"], "s", "input.switches.time"), rd.quantity(sw["value"], "1", "input.switches.value")});
            }
        }
    }
    else {
        cfg.switches.push_back({6 * seconds_per_hour, 0.0});
    }
    try {
        (void)cfg.schedule();
    }
    catch (const DomainError& e) {
        throw ConfigError(std::string("input: ") + e.what());
    }
    cfg.parameters.Tf_sat = cfg.tf_sat;

    if (root.contains("simulation")) {
        const auto& sim = root["simulation"];
        check_keys(sim, {"horizon", "rel_tol", "abs_tol", "report_interval", "max_steps"}, "simulation");
        if (sim.contains("horizon")) {
            cfg.horizon = rd.quantity(sim["horizon"], "s", "simulation.horizon");
        }
        if (sim.contains("rel_tol")) {
            cfg.simulation.rel_tol = rd.quantity(sim["rel_tol"], "1", "simulation.rel_tol");
        }
        if (sim.contains("abs_tol")) {
            cfg.simulation.abs_tol = rd.quantity(sim["abs_tol"], "mol/L", "simulation.abs_tol");
        }
        if (sim.contains("report_interval")) {
            cfg.simulation.report_interval = rd.quantity(sim["report_interval"], "s", "simulation.report_interval");
        }
        if (sim.contains("max_steps")) {
            cfg.simulation.max_steps = integer<std::size_t>(sim["max_steps"], "simulation.max_steps");
        }
    }
    if (!(cfg.horizon >= 0) || !(cfg.simulation.rel_tol > 0) || !(cfg.simulation.abs_tol > 0) ||
        !(cfg.simulation.report_interval > 0)) {
        throw ConfigError("simulation: horizon must be >= 0 and tolerances and report interval > 0");
    }

    if (root.contains("formula_file")) {
        cfg.formula_file = resolve(root["formula_file"], base_dir, "formula_file");
    }
    if (root.contains("formula")) {
        if (!root["formula"].is_string()) {
            throw ConfigError("formula: expected a formula name");
        }
        cfg.formula = root["formula"].get<std::string>();
    }
    if (root.contains("plateau_factor")) {
        cfg.plateau_factor = rd.quantity(root["plateau_factor"], "1", "plateau_factor");
    }
    if (root.contains("constraint_file")) {
        cfg.constraint_file = resolve(root["constraint_file"], base_dir, "constraint_file");
    }
    if (root.contains("box_file")) {
        cfg.box_file = resolve(root["box_file"], base_dir, "box_file");
    }

    if (root.contains("exploration")) {
        const auto& ex = root["exploration"];
        check_keys(ex,
                   {"seed", "samples", "final_samples", "rounds", "window", "rel_step", "initial_half_width",
                    "growth", "max_half_width", "threads"},
                   "exploration");
        auto& e = cfg.exploration;
        if (ex.contains("seed")) {
            e.seed = integer<std::uint64_t>(ex["seed"], "exploration.seed");
        }
        if (ex.contains("samples")) {
            e.samples = integer<std::size_t>(ex["samples"], "exploration.samples");
        }
        if (ex.contains("final_samples")) {
            e.final_samples = integer<std::size_t>(ex["final_samples"], "exploration.final_samples");
        }
        if (ex.contains("rounds")) {
            e.rounds = integer<std::size_t>(ex["rounds"], "exploration.rounds");
        }
        if (ex.contains("threads")) {
            e.threads = integer<unsigned>(ex["threads"], "exploration.threads");
        }
        if (ex.contains("window")) {
            const auto w   = rd.range(ex["window"], "s", "exploration.window");
            e.window_start = w.lo;
            e.window_end   = w.hi;
        }
        if (ex.contains("rel_step")) {
            e.rel_step = rd.quantity(ex["rel_step"], "1", "exploration.rel_step");
        }
        if (ex.contains("initial_half_width")) {
            e.initial_half_width = rd.quantity(ex["initial_half_width"], "1", "exploration.initial_half_width");
        }
        if (ex.contains("growth")) {
            e.growth = rd.quantity(ex["growth"], "1", "exploration.growth");
        }
        if (ex.contains("max_half_width")) {
            e.max_half_width = rd.quantity(ex["max_half_width"], "1", "exploration.max_half_width");
        }
    }

    cfg.update_canonical();
    return cfg;
}

ProjectConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

ProjectConfig default_config()
{
    return parse_config("{}");
}

} // namespace ironspec
