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
#include "ironspec/explore.hpp"
#include "ironspec/interval.hpp"
#include "ironspec/report.hpp"
#include "ironspec/steady.hpp"
#include "ironspec/stl.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace ironspec;
namespace fs = std::filesystem;

namespace
{

enum ExitCode
{
    exit_ok         = 0,
    exit_config     = 2,
    exit_numeric    = 3,
    exit_falsified  = 4,
};

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::string out_dir;
    std::string formula;
    std::string formula_file;
};

struct Session {
    ProjectConfig cfg;
    fs::path out_dir;
};

Session open_session(const Common& c)
{
    Session s;
    s.cfg = c.config.empty() ? default_config() : load_config(c.config);
    for (const auto& line : s.cfg.conversions) {
        std::cerr << "config: " << line << "\n";
    }
    if (const char* env = std::getenv("IRONSPEC_SEED")) {
        try {
            s.cfg.exploration.seed = std::stoull(env);
        }
        catch (const std::exception&) {
            throw ConfigError(std::string("IRONSPEC_SEED is not an integer: ") + env);
        }
    }
    if (c.seed) {
        s.cfg.exploration.seed = *c.seed;
    }
    if (c.samples) {
        s.cfg.exploration.samples = *c.samples;
    }
    if (!c.formula.empty()) {
        s.cfg.formula = c.formula;
    }
    if (!c.formula_file.empty()) {
        if (!fs::exists(c.formula_file)) {
            throw ConfigError("formula file '" + c.formula_file + "' does not exist");
        }
        s.cfg.formula_file = fs::absolute(c.formula_file);
    }
    s.cfg.update_canonical();

    s.out_dir = ".";
    if (const char* env = std::getenv("IRONSPEC_OUT_DIR")) {
        s.out_dir = env;
    }
    if (!c.out_dir.empty()) {
        s.out_dir = c.out_dir;
    }
    fs::create_directories(s.out_dir);
    return s;
}

ReportContext context(const Session& s, const std::string& command, bool seeded = false)
{
    ReportContext ctx;
    ctx.command     = command;
    ctx.config_hash = s.cfg.hash();
    ctx.config      = s.cfg.canonical;
    if (seeded) {
        ctx.seed = s.cfg.exploration.seed;
    }
    return ctx;
}

FormulaLibrary formula_library(const ProjectConfig& cfg)
{
    if (!cfg.formula_file.empty()) {
        return FormulaLibrary::load(cfg.formula_file.string());
    }
    Box bounds = published_variable_bounds();
    for (std::size_t i = 0; i < cfg.targets.size(); ++i) {
        bounds.set(cfg.targets.name(i), cfg.targets[i]);
    }
    return build_iron_spec(bounds, {cfg.plateau_factor});
}

FormulaPtr spec_formula(const ProjectConfig& cfg)
{
    const auto lib = formula_library(cfg);
    if (!lib.contains(cfg.formula)) {
        throw ConfigError("formula '" + cfg.formula + "' is not defined");
    }
    return lib.get(cfg.formula);
}

void emit(const fs::path& path, const std::string& content)
{
    write_file_atomic(path, content);
    std::cout << "wrote " << path.string() << "\n";
}

int cmd_simulate(const Common& c, bool with_monitor)
{
    auto s = open_session(c);
    s.cfg.require_point();
    const auto& p = s.cfg.parameters;
    std::optional<FormulaPtr> spec;
    if (with_monitor) {
        spec = spec_formula(s.cfg);
    }
    const auto init  = steady_state(p, s.cfg.tf_sat).state;
    const auto trace = simulate(p, init, s.cfg.schedule(), s.cfg.horizon, s.cfg.simulation);

    std::ostringstream csv;
    trace.write_csv(csv);
    emit(s.out_dir / "trace.csv", csv.str());

    std::size_t rows = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        rows += trace.on_grid(i) ? 1 : 0;
    }
    double cutoff = s.cfg.horizon;
    for (const auto& sw : s.cfg.switches) {
        if (sw.value == 0.0) {
            cutoff = sw.time;
            break;
        }
    }
    const auto summary = summarize_cutoff(trace, cutoff, s.cfg.plateau_factor, ferritin_floor(p));
    emit(s.out_dir / "simulation.json", simulation_report(summary, rows, context(s, "simulate")));

    if (spec) {
        EvalEnvironment env(trace, parameter_bindings(p));
        const auto result = monitor(*spec, env, 0.0);
        emit(s.out_dir / "monitor.json", monitor_report(result, context(s, "simulate")));
        return result.satisfied ? exit_ok : exit_falsified;
    }
    return exit_ok;
}

int cmd_monitor(const Common& c)
{
    auto s = open_session(c);
    s.cfg.require_point();
    const auto spec  = spec_formula(s.cfg);
    const auto& p    = s.cfg.parameters;
    const auto init  = steady_state(p, s.cfg.tf_sat).state;
    const auto trace = simulate(p, init, s.cfg.schedule(), s.cfg.horizon, s.cfg.simulation);
    EvalEnvironment env(trace, parameter_bindings(p));
    const auto result = monitor(spec, env, 0.0);
    emit(s.out_dir / "monitor.json", monitor_report(result, context(s, "monitor")));
    std::cout << s.cfg.formula << ": " << (result.satisfied ? "true" : "false") << ", robustness "
              << format_number(result.robustness) << "\n";
    for (const auto& name : result.failing()) {
        std::cout << "  failing: " << name << "\n";
    }
    return result.satisfied ? exit_ok : exit_falsified;
}

int cmd_steady(const Common& c)
{
    auto s = open_session(c);
    s.cfg.require_point();
    const auto ss       = steady_state(s.cfg.parameters, s.cfg.tf_sat);
    const auto graph    = interaction_graph(s.cfg.parameters);
    const auto circuits = enumerate_circuits(graph);
    emit(s.out_dir / "steady.json", steady_report(ss, graph, circuits, context(s, "steady")));
    std::ostringstream dot;
    graph.write_dot(dot);
    emit(s.out_dir / "interaction_graph.dot", dot.str());
    std::cout << "stable: " << (ss.stable ? "true" : "false")
              << ", regime consistent: " << (ss.regime_consistent ? "true" : "false") << "\n";
    return exit_ok;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_contract(const Common& c)
{
    auto s     = open_session(c);
    auto model = build_iron_constraints(s.cfg.tf_sat);
    if (!s.cfg.constraint_file.empty()) {
        model.constraints = parse_constraints(read_text(s.cfg.constraint_file));
    }
    if (!s.cfg.box_file.empty()) {
        model.box = parse_box(read_text(s.cfg.box_file));
    }
    const auto t0    = std::chrono::steady_clock::now();
    const auto after = propagate(model.constraints, model.box);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto match = match_deductions(model.box, after);
    emit(s.out_dir / "contract.json",
         contraction_report(model.box, after, match, model.constraints.size(), sec, context(s, "contract")));
    std::size_t n = 0;
    for (const auto& m : match) {
        n += m.matched ? 1 : 0;
    }
    std::cout << "deductions matched: " << n << " of " << match.size() << "\n";
    return exit_ok;
}

SensitivityOptions sensitivity_options(const ProjectConfig& cfg)
{
    SensitivityOptions o;
    o.window_start = cfg.exploration.window_start;
    o.window_end   = cfg.exploration.window_end;
    o.rel_step     = cfg.exploration.rel_step;
    o.experiment   = cfg.experiment();
    return o;
}

int cmd_sensitivity(const Common& c)
{
    auto s = open_session(c);
    s.cfg.require_point();
    const auto rep = sensitivity(s.cfg.parameters, sensitivity_options(s.cfg));
    std::ostringstream csv;
    rep.write_csv(csv);
    emit(s.out_dir / "sensitivity.csv", csv.str());
    emit(s.out_dir / "sensitivity.json", sensitivity_report(rep, context(s, "sensitivity")));
    return exit_ok;
}

int cmd_explore(const Common& c, std::optional<std::size_t> rounds, std::optional<std::size_t> final_samples)
{
    auto s = open_session(c);
    if (rounds) {
        s.cfg.exploration.rounds = *rounds;
    }
    if (final_samples) {
        s.cfg.exploration.final_samples = *final_samples;
    }
    s.cfg.update_canonical();
    s.cfg.require_point();
    const auto spec       = spec_formula(s.cfg);
    const auto experiment = s.cfg.experiment();
    const auto center     = check_point(s.cfg.parameters, spec, experiment);
    if (!center.satisfied) {
        std::cerr << "the centre point does not satisfy " << s.cfg.formula << "\n";
        return exit_falsified;
    }
    const auto sens = sensitivity(s.cfg.parameters, sensitivity_options(s.cfg));

    const auto& e = s.cfg.exploration;
    ExpansionOptions o;
    o.samples_per_round  = e.samples;
    o.final_samples      = e.final_samples;
    o.max_rounds         = e.rounds;
    o.seed               = e.seed;
    o.initial_half_width = e.initial_half_width;
    o.growth             = e.growth;
    o.max_half_width     = e.max_half_width;
    o.threads            = e.threads;
    o.experiment         = experiment;
    const auto region    = expand_box(s.cfg.parameters, spec, sens, o);
    emit(s.out_dir / "region.json", region_report(region, context(s, "explore", true)));
    std::cout << "rounds: " << region.rounds << ", mean half-width: " << region.mean_half_width()
              << ", satisfied fraction: " << region.validation.satisfied_fraction() << " of "
              << region.validation.samples << " samples\n";
    return region.validation.valid == region.validation.samples ? exit_ok : exit_falsified;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Random seed (overrides IRONSPEC_SEED and the config)");
    app->add_option("--samples", c.samples, "Samples per validation round");
    app->add_option("--out-dir", c.out_dir, "Output directory (overrides IRONSPEC_OUT_DIR)");
    app->add_option("--formula", c.formula, "Name of the formula to check");
    app->add_option("--formula-file", c.formula_file, "Formula library file");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Iron homeostasis model: simulation, monitoring, contraction and exploration"};
    app.require_subcommand(1);

    Common common;
    bool with_monitor = false;
    std::optional<std::size_t> rounds, final_samples;

    auto* sim = app.add_subcommand("simulate", "Simulate the configured experiment; writes trace.csv and simulation.json");
    add_common(sim, common);
    sim->add_flag("--monitor", with_monitor, "Also monitor the configured formula");
    auto* mon = app.add_subcommand("monitor", "Monitor a formula on the simulated trace; writes monitor.json");
    add_common(mon, common);
    auto* std_ = app.add_subcommand("steady", "Closed-form steady state, stability and interaction graph");
    add_common(std_, common);
    auto* con = app.add_subcommand("contract", "Interval propagation over the steady-state constraints");
    add_common(con, common);
    auto* sen = app.add_subcommand("sensitivity", "Normalized parameter sensitivities; writes sensitivity.csv/json");
    add_common(sen, common);
    auto* exp = app.add_subcommand("explore", "Expand and validate a robust parameter box; writes region.json");
    add_common(exp, common);
    exp->add_option("--rounds", rounds, "Maximum expansion rounds");
    exp->add_option("--final-samples", final_samples, "Samples of the confirmation run");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*sim) {
            return cmd_simulate(common, with_monitor);
        }
        if (*mon) {
            return cmd_monitor(common);
        }
        if (*std_) {
            return cmd_steady(common);
        }
        if (*con) {
            return cmd_contract(common);
        }
        if (*sen) {
            return cmd_sensitivity(common);
        }
        if (*exp) {
            return cmd_explore(common, rounds, final_samples);
        }
    }
    catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const UnboundNameError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return exit_numeric;
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_ok;
}
