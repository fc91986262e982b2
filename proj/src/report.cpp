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
#include "ironspec/report.hpp"

#include "ironspec/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

namespace ironspec
{

using ordered = nlohmann::ordered_json;

namespace
{

ordered number(double x)
{
    if (std::isfinite(x)) {
        return x;
    }
    if (std::isnan(x)) {
        return nullptr;
    }
    return x > 0 ? "inf" : "-inf";
}

ordered interval(const Interval& x)
{
    return ordered::array({number(x.lo), number(x.hi)});
}

ordered header(const ReportContext& ctx, ordered units)
{
    ordered h;
    h["tool"]        = "ironspec";
    h["command"]     = ctx.command;
    h["config_hash"] = ctx.config_hash;
    h["seed"]        = ctx.seed ? ordered(*ctx.seed) : ordered(nullptr);
    h["units"]       = std::move(units);
    return h;
}

ordered document(const ReportContext& ctx, ordered units)
{
    ordered doc;
    doc["header"] = header(ctx, std::move(units));
    if (!ctx.config.empty()) {
        doc["config"] = ordered::parse(ctx.config);
    }
    return doc;
}

ordered concentration_units()
{
    return {{"time", "s"}, {"concentration", "mol/L"}};
}

ordered parameter_units()
{
    ordered u;
    for (const auto& info : parameter_table()) {
        u[std::string(info.name)] = std::string(info.unit);
    }
    return u;
}

ordered state_json(const StateVector& s)
{
    ordered o;
    for (std::size_t i = 0; i < num_species; ++i) {
        o[std::string(species_names[i])] = number(s[i]);
    }
    return o;
}

ordered parameters_json(const ParameterSet& p)
{
    ordered o;
    for (const auto& info : parameter_table()) {
        o[std::string(info.name)] = number(p.*info.member);
    }
    return o;
}

ordered box_json(const Box& box)
{
    ordered o = ordered::object();
    for (std::size_t i = 0; i < box.size(); ++i) {
        o[box.name(i)] = interval(box[i]);
    }
    return o;
}

ordered validation_json(const ValidationReport& r)
{
    ordered o;
    o["samples"]            = r.samples;
    o["valid"]              = r.valid;
    o["satisfied_fraction"] = r.satisfied_fraction();
    o["seed"]               = r.seed;
    o["counterexamples"]    = ordered::array();
    for (const auto& c : r.counterexamples) {
        ordered cx;
        cx["index"]      = c.index;
        cx["failing"]    = c.failing;
        cx["robustness"] = number(c.robustness);
        if (!c.error.empty()) {
            cx["error"] = c.error;
        }
        cx["parameters"] = parameters_json(c.params);
        o["counterexamples"].push_back(std::move(cx));
    }
    return o;
}

} // namespace

std::string steady_report(const SteadyState& ss, const SignedDigraph& graph, const std::vector<Circuit>& circuits,
                          const ReportContext& ctx)
{
    auto units = concentration_units();
    units["jacobian"]    = "1/s";
    units["eigenvalues"] = "1/s";
    auto doc             = document(ctx, units);
    doc["state"]         = state_json(ss.state);
    ordered jac          = ordered::array();
    for (const auto& row : ss.jacobian) {
        ordered r = ordered::array();
        for (double x : row) {
            r.push_back(number(x));
        }
        jac.push_back(std::move(r));
    }
    doc["jacobian"]    = std::move(jac);
    doc["eigenvalues"] = ordered::array();
    for (double x : ss.eigenvalues) {
        doc["eigenvalues"].push_back(number(x));
    }
    doc["stable"]           = ss.stable;
    doc["regimeConsistent"] = ss.regime_consistent;
    ordered arcs            = ordered::array();
    for (const auto& a : graph.arcs) {
        arcs.push_back({{"from", graph.nodes[a.from]}, {"to", graph.nodes[a.to]}, {"sign", a.sign > 0 ? "+" : "-"}});
    }
    doc["interaction_graph"] = {{"nodes", graph.nodes}, {"arcs", std::move(arcs)}};
    ordered cs               = ordered::array();
    for (const auto& c : circuits) {
        cs.push_back({{"circuit", format_circuit(graph, c)},
                      {"length", c.nodes.size()},
                      {"sign", c.sign > 0 ? "positive" : "negative"}});
    }
    doc["circuits"] = std::move(cs);
    return doc.dump(2);
}

std::string monitor_report(const MonitorResult& result, const ReportContext& ctx)
{
    auto doc          = document(ctx, {{"time", "s"}, {"robustness", "unit of each predicate margin"}});
    doc["formula"]    = result.formula;
    doc["t"]          = result.time;
    doc["bool"]       = result.satisfied;
    doc["robustness"] = number(result.robustness);
    ordered per       = ordered::array();
    for (const auto& c : result.per_conjunct) {
        per.push_back({{"name", c.name}, {"bool", c.satisfied}, {"robustness", number(c.robustness)}, {"t", number(c.time)}});
    }
    doc["perConjunct"] = std::move(per);
    return doc.dump(2);
}

std::string simulation_report(const CutoffSummary& s, std::size_t rows, const ReportContext& ctx)
{
    auto doc                  = document(ctx, concentration_units());
    doc["rows"]               = rows;
    doc["cutoff_time"]        = number(s.cutoff_time);
    doc["reference_fe"]       = number(s.reference_fe);
    doc["max_fe"]             = number(s.max_fe);
    doc["plateau"]            = {{"start", number(s.plateau_start)},
                                 {"end", number(s.plateau_end)},
                                 {"duration", number(s.plateau_duration)},
                                 {"duration_hours", number(s.plateau_duration / seconds_per_hour)}};
    doc["exhaustion_fraction"] = exhaustion_fraction;
    doc["ft_exhaustion_time"] = number(s.ft_exhaustion_time);
    doc["fe_exhaustion_time"] = number(s.fe_exhaustion_time);
    doc["final_state"]        = state_json(s.final_state);
    return doc.dump(2);
}

std::string contraction_report(const Box& before, const Box& after, const std::vector<DeductionMatch>& matches,
                               std::size_t constraints, double seconds, const ReportContext& ctx)
{
    auto units       = parameter_units();
    units["Fe"]      = units["TfR1"] = units["FPN1a"] = units["Ft"] = units["IRP"] = "mol/L";
    units["seconds"] = "s";
    auto doc         = document(ctx, units);
    doc["constraints"] = constraints;
    doc["seconds"]     = seconds;
    ordered dims       = ordered::array();
    for (std::size_t i = 0; i < before.size(); ++i) {
        const auto& name = before.name(i);
        dims.push_back({{"name", name},
                        {"before", interval(before[i])},
                        {"after", after.contains(name) ? interval(after[name]) : ordered(nullptr)}});
    }
    doc["dimensions"] = std::move(dims);
    ordered ded       = ordered::array();
    std::size_t count = 0;
    for (const auto& m : matches) {
        count += m.matched ? 1 : 0;
        ded.push_back({{"name", m.deduction.name},
                       {"direction", m.deduction.lower ? ">=" : "<="},
                       {"published", m.deduction.value},
                       {"before", interval(m.before)},
                       {"after", interval(m.after)},
                       {"matched", m.matched}});
    }
    doc["deductions"]      = std::move(ded);
    doc["matched"]         = count;
    doc["deduction_count"] = matches.size();
    return doc.dump(2);
}

std::string sensitivity_report(const SensitivityReport& r, const ReportContext& ctx)
{
    auto doc            = document(ctx, {{"time", "s"}, {"sensitivity", "relative change per relative change"}});
    doc["window"]       = {r.window_start, r.window_end};
    doc["rel_step"]     = r.rel_step;
    doc["variables"]    = r.variables;
    doc["parameters"]   = r.parameters;
    auto matrix         = [](const std::vector<std::vector<double>>& m) {
        ordered a = ordered::array();
        for (const auto& row : m) {
            ordered b = ordered::array();
            for (double x : row) {
                b.push_back(number(x));
            }
            a.push_back(std::move(b));
        }
        return a;
    };
    doc["peak"]      = matrix(r.peak);
    doc["mean"]      = matrix(r.mean);
    ordered agg      = ordered::object();
    const auto value = r.aggregate();
    for (std::size_t k = 0; k < r.parameters.size(); ++k) {
        agg[r.parameters[k]] = number(value[k]);
    }
    doc["aggregate"] = std::move(agg);
    ordered failed   = ordered::array();
    for (std::size_t k = 0; k < r.parameters.size(); ++k) {
        if (r.failed[k]) {
            failed.push_back(r.parameters[k]);
        }
    }
    doc["failed"] = std::move(failed);
    return doc.dump(2);
}

std::string validation_report(const ValidationReport& report, const Box& box, const ReportContext& ctx)
{
    auto doc          = document(ctx, parameter_units());
    doc["box"]        = box_json(box);
    doc["validation"] = validation_json(report);
    return doc.dump(2);
}

std::string region_report(const RobustRegion& region, const ReportContext& ctx)
{
    auto doc      = document(ctx, parameter_units());
    doc["center"] = parameters_json(region.center);
    ordered hw    = ordered::object();
    ordered fr    = ordered::object();
    for (std::size_t k = 0; k < region.dimensions.size(); ++k) {
        hw[region.dimensions[k]] = region.half_widths[k];
        fr[region.dimensions[k]] = static_cast<bool>(region.frozen[k]);
    }
    doc["halfWidthsRel"]      = std::move(hw);
    doc["meanHalfWidthRel"]   = region.mean_half_width();
    doc["frozen"]             = std::move(fr);
    doc["rounds"]             = region.rounds;
    doc["box"]                = box_json(region.box);
    doc["validation"]         = validation_json(region.validation);
    return doc.dump(2);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!content.empty() && content.back() != '\n') {
            out << '\n';
        }
        if (!out) {
            throw ConfigError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

} // namespace ironspec
