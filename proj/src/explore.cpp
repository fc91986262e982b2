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
#include "ironspec/explore.hpp"

#include "ironspec/errors.hpp"
#include "ironspec/steady.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iterator>
#include <limits>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace ironspec
{

ParameterSet pin_parameters(ParameterSet p)
{
    p.k_IRP_Ft = 0.97 * p.k_Ft_prod;
    if (p.k_FPN1a_prod < p.k_IRP_FPN1a) {
        std::swap(p.k_FPN1a_prod, p.k_IRP_FPN1a);
    }
    return p;
}

std::vector<std::string> free_parameters()
{
    std::vector<std::string> out;
    for (auto name : kinetic_parameter_names()) {
        if (name != "k_IRP_Ft") {
            out.emplace_back(name);
        }
    }
    return out;
}

InputSchedule Experiment::schedule() const
{
    if (!switches.empty()) {
        return InputSchedule(tf_sat, switches);
    }
    std::vector<InputSchedule::Switch> cut;
    if (cutoff_time < horizon) {
        cut.push_back({cutoff_time, 0.0});
    }
    return InputSchedule(tf_sat, cut);
}

Trace run_experiment(const ParameterSet& params, const Experiment& experiment)
{
    const auto ss = steady_state(params, experiment.tf_sat);
    return simulate(params, ss.state, experiment.schedule(), experiment.horizon, experiment.simulation);
}

double ferritin_floor(const ParameterSet& params)
{
    return params.k_Ft_deg > 0 ? std::max(0.0, params.k_Ft_prod - params.k_IRP_Ft) / params.k_Ft_deg : 0.0;
}

CutoffSummary summarize_cutoff(const Trace& trace, double cutoff_time, double plateau_factor, double ft_floor)
{
    const auto fe = index(Species::Fe);
    const auto ft = index(Species::Ft);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CutoffSummary s;
    s.cutoff_time        = cutoff_time;
    s.reference_fe       = trace.value_at(fe, std::min(4 * seconds_per_hour, trace.times().back()));
    s.plateau_start      = s.plateau_end = nan;
    s.ft_exhaustion_time = s.fe_exhaustion_time = nan;
    const double floor   = plateau_factor * s.reference_fe;
    const double fe_cut  = trace.value_at(fe, std::min(cutoff_time, trace.times().back()));
    const double ft_cut  = trace.value_at(ft, std::min(cutoff_time, trace.times().back()));

    double run_start = nan;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double t = trace.times()[i];
        const double x = trace.values(fe)[i];
        s.max_fe       = std::max(s.max_fe, x);
        if (t < cutoff_time) {
            continue;
        }
        if (std::isnan(s.ft_exhaustion_time) &&
            trace.values(ft)[i] - ft_floor < exhaustion_fraction * (ft_cut - ft_floor)) {
            s.ft_exhaustion_time = t;
        }
        if (std::isnan(s.fe_exhaustion_time) && x < exhaustion_fraction * fe_cut) {
            s.fe_exhaustion_time = t;
        }
        const bool steady = x > floor && std::fabs(trace.derivatives(fe)[i]) < 1e-4 * x;
        if (steady && std::isnan(run_start)) {
            run_start = t;
        }
        if (!steady) {
            run_start = nan;
        }
        if (steady && !(t - run_start <= s.plateau_duration)) {
            s.plateau_start    = run_start;
            s.plateau_end      = t;
            s.plateau_duration = t - run_start;
        }
    }
    s.final_state = trace.state(trace.size() - 1);
    return s;
}

namespace
{

double get(const ParameterSet& p, std::string_view name)
{
    auto v = p.get(name);
    if (!v) {
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }
    return *v;
}

void put(ParameterSet& p, std::string_view name, double value)
{
    if (!p.set(name, value)) {
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }
}

double steady_value(const ParameterSet& p, Species v, double tf_sat)
{
    try {
        return steady_state(p, tf_sat).state[v];
    }
    catch (const DegenerateParametersError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

bool spans_decades(double lo, double hi)
{
    return lo > 0 && hi / lo > 10.0;
}

/// Point at fractional position `frac` of [lo, hi], log-spaced when the range spans decades.
double position(double lo, double hi, double frac)
{
    if (spans_decades(lo, hi)) {
        return std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)));
    }
    return lo + frac * (hi - lo);
}

double distance(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return std::numeric_limits<double>::infinity();
    }
    if (a > 0 && b > 0) {
        return std::fabs(std::log(a / b));
    }
    return std::fabs(a - b);
}

} // namespace

std::vector<std::string> tuning_group(Species v)
{
    switch (v) {
    case Species::IRP: return {"k_IRP_prod", "k_IRP_deg", "k_Fe_IRP"};
    case Species::TfR1: return {"k_IRP_TfR1", "k_TfR1_prod", "k_TfR1_deg"};
    case Species::FPN1a: return {"k_FPN1a_prod", "k_FPN1a_deg"};
    case Species::Fe: return {"k_Fe_cons", "k_Fe_export", "k_Fe_input"};
    case Species::Ft: return {"k_Ft_prod", "k_Ft_deg"};
    }
    return {};
}

namespace
{

class OrderedSearch
{
public:
    OrderedSearch(const Box& bounds, const Box& targets, const SearchOptions& options)
        : m_bounds(bounds)
        , m_targets(targets)
        , m_options(options)
    {
        std::set<Species> seen(options.order.begin(), options.order.end());
        if (options.order.size() != num_species || seen.size() != num_species) {
            throw DomainError("tuning order must list each of the five variables once");
        }
        for (auto v : options.order) {
            m_target.push_back(targets[species_names[index(v)]]);
        }
    }

    ParameterSet run(const ParameterSet& seed)
    {
        m_point = seed;
        if (!search(0)) {
            throw NoValidPointError("no parameter set places every steady-state variable in its target range",
                                    m_trace);
        }
        return m_point;
    }

private:
    double value(Species v) const
    {
        return steady_value(m_point, v, m_options.tf_sat);
    }

    bool placed(std::size_t upto) const
    {
        for (std::size_t k = 0; k <= upto; ++k) {
            if (!m_target[k].contains(value(m_options.order[k]))) {
                return false;
            }
        }
        return true;
    }

    /// Moves the group parameters one after another toward `aim`.
    void place(Species v, double aim)
    {
        for (const auto& name : tuning_group(v)) {
            if (!m_bounds.contains(name)) {
                continue;
            }
            auto range = m_bounds[name];
            double lo  = range.lo > 0 ? range.lo : range.hi * 1e-12;
            double hi  = range.hi;
            if (!(hi > 0) || lo > hi) {
                continue;
            }
            auto at = [&](double s) {
                put(m_point, name, s);
                return value(v);
            };
            const double f_lo = at(lo), f_hi = at(hi);
            if (std::isfinite(f_lo) && std::isfinite(f_hi) && (f_lo - aim) * (f_hi - aim) <= 0) {
                const bool log_scale = spans_decades(lo, hi);
                double a = lo, b = hi;
                const bool increasing = f_hi >= f_lo;
                for (int it = 0; it < 200 && a < b; ++it) {
                    const double m = log_scale ? std::sqrt(a * b) : 0.5 * (a + b);
                    if (m <= a || m >= b) {
                        break;
                    }
                    if ((at(m) < aim) == increasing) {
                        a = m;
                    }
                    else {
                        b = m;
                    }
                }
                at(distance(at(a), aim) <= distance(at(b), aim) ? a : b);
                return;
            }
            at(distance(f_lo, aim) <= distance(f_hi, aim) ? lo : hi);
        }
    }

    bool fix_thresholds()
    {
        const auto ss = steady_state(m_point, m_options.tf_sat).state;
        auto range    = [&](const char* name) {
            return m_bounds.contains(name) ? m_bounds[name] : Interval::point(get(m_point, name));
        };
        if (!(ss[Species::Fe] > m_point.theta_Fe_IRP)) {
            auto r   = range("theta_Fe_IRP");
            double t = std::min(r.hi, 0.5 * ss[Species::Fe]);
            if (t < r.lo) {
                return false;
            }
            m_point.theta_Fe_IRP = t;
        }
        for (const char* name : {"theta_IRP_Ft", "theta_IRP_FPN1a"}) {
            if (!(ss[Species::IRP] < get(m_point, name))) {
                auto r   = range(name);
                double t = std::max(r.lo, 2.0 * ss[Species::IRP]);
                if (t > r.hi) {
                    return false;
                }
                put(m_point, name, t);
            }
        }
        return true;
    }

    bool search(std::size_t k)
    {
        if (k == m_options.order.size()) {
            if (fix_thresholds()) {
                return true;
            }
            m_trace.push_back("regime thresholds cannot be met inside their bounds");
            return false;
        }
        const auto v          = m_options.order[k];
        const std::string var(species_names[index(v)]);
        const auto target     = m_target[k];
        const ParameterSet saved = m_point;
        // First option keeps the current point; the rest aim at positions inside the target.
        const double aims[] = {-1.0, 0.5, 0.25, 0.75, 0.1, 0.9};
        for (double frac : aims) {
            if (++m_attempts > m_options.max_attempts) {
                m_trace.push_back("attempt budget exhausted");
                throw NoValidPointError("ordered tuning exhausted its attempt budget", m_trace);
            }
            m_point = saved;
            if (frac >= 0) {
                place(v, position(target.lo, target.hi, frac));
            }
            std::ostringstream line;
            line << var << " = " << format_number(value(v));
            if (!placed(k)) {
                line << " outside target";
                m_trace.push_back(line.str());
                continue;
            }
            m_trace.push_back(line.str() + " placed");
            if (search(k + 1)) {
                return true;
            }
        }
        m_point = saved;
        m_trace.push_back("step back from " + var);
        return false;
    }

    const Box& m_bounds;
    const Box& m_targets;
    SearchOptions m_options;
    std::vector<Interval> m_target;
    ParameterSet m_point;
    std::vector<std::string> m_trace;
    std::size_t m_attempts = 0;
};

} // namespace

ParameterSet find_initial_params(const Box& bounds, const Box& targets, const ParameterSet& seed,
                                 const SearchOptions& options)
{
    OrderedSearch search(bounds, targets, options);
    return search.run(seed);
}

ParameterSet find_initial_params(const Box& bounds, const Box& targets, const SearchOptions& options)
{
    ParameterSet seed = reference_parameters();
    for (const auto& info : parameter_table()) {
        if (bounds.contains(info.name)) {
            auto r = bounds[info.name];
            seed.*info.member = position(r.lo, r.hi, 0.5);
        }
    }
    seed.Tf_sat = options.tf_sat;
    return find_initial_params(bounds, targets, seed, options);
}

// ---------------------------------------------------------------------------

namespace
{

std::size_t find_index(const std::vector<std::string>& names, std::string_view name)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw UnboundNameError(std::string(name));
    }
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace

double SensitivityReport::entry(std::string_view variable, std::string_view parameter) const
{
    return peak[find_index(variables, variable)][find_index(parameters, parameter)];
}

double SensitivityReport::mean_entry(std::string_view variable, std::string_view parameter) const
{
    return mean[find_index(variables, variable)][find_index(parameters, parameter)];
}

std::vector<double> SensitivityReport::aggregate() const
{
    std::vector<double> out(parameters.size(), 0.0);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
        for (const auto& row : peak) {
            out[k] = std::isnan(row[k]) ? row[k] : std::max(out[k], row[k]);
            if (std::isnan(out[k])) {
                break;
            }
        }
    }
    return out;
}

void SensitivityReport::write_csv(std::ostream& os) const
{
    os << "variable";
    for (const auto& p : parameters) {
        os << "," << p;
    }
    os << "\n";
    char buf[64];
    for (std::size_t v = 0; v < variables.size(); ++v) {
        os << variables[v];
        for (double x : peak[v]) {
            std::snprintf(buf, sizeof buf, "%.15e", x);
            os << "," << buf;
        }
        os << "\n";
    }
}

SensitivityReport sensitivity(const ParameterSet& params, const SensitivityOptions& options)
{
    if (!(options.rel_step > 0)) {
        throw DomainError("sensitivity: rel_step must be positive");
    }
    if (!(options.window_start <= options.window_end)) {
        throw DomainError("sensitivity: empty time window");
    }
    SensitivityReport rep;
    rep.window_start = options.window_start;
    rep.window_end   = options.window_end;
    rep.rel_step     = options.rel_step;
    rep.parameters   = options.parameters;
    if (rep.parameters.empty()) {
        for (auto n : kinetic_parameter_names()) {
            rep.parameters.emplace_back(n);
        }
    }
    const auto base = run_experiment(params, options.experiment);
    rep.variables   = base.variables();
    const auto nv   = rep.variables.size();
    const auto np   = rep.parameters.size();
    rep.peak.assign(nv, std::vector<double>(np, 0.0));
    rep.mean.assign(nv, std::vector<double>(np, 0.0));
    rep.failed.assign(np, false);

    std::vector<std::size_t> grid;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double t = base.times()[i];
        if (base.on_grid(i) && t >= options.window_start && t <= options.window_end) {
            grid.push_back(i);
        }
    }

    for (std::size_t k = 0; k < np; ++k) {
        ParameterSet q   = params;
        const double val = get(params, rep.parameters[k]);
        put(q, rep.parameters[k], val * (1.0 + options.rel_step));
        Trace pert;
        try {
            pert = run_experiment(q, options.experiment);
        }
        catch (const Error&) {
            rep.failed[k] = true;
            for (std::size_t v = 0; v < nv; ++v) {
                rep.peak[v][k] = rep.mean[v][k] = std::numeric_limits<double>::quiet_NaN();
            }
            continue;
        }
        for (std::size_t v = 0; v < nv; ++v) {
            double peak = 0, sum = 0;
            for (auto i : grid) {
                const double t  = base.times()[i];
                const double b  = base.values(v)[i];
                const double p  = pert.value_at(v, t);
                const double s  = std::fabs(p - b) / std::max(std::fabs(b), 1e-300) / options.rel_step;
                peak            = std::max(peak, s);
                sum            += s;
            }
            rep.peak[v][k] = peak;
            rep.mean[v][k] = grid.empty() ? 0.0 : sum / static_cast<double>(grid.size());
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

SampleOutcome check_point(const ParameterSet& params, const FormulaPtr& spec, const Experiment& experiment)
{
    SampleOutcome out;
    const auto p = pin_parameters(params);
    Trace trace;
    try {
        trace = run_experiment(p, experiment);
    }
    catch (const Error& e) {
        out.error      = e.what();
        out.robustness = -huge_robustness;
        out.failing    = {"simulation"};
        return out;
    }
    EvalEnvironment env(trace, parameter_bindings(p));
    const auto result = monitor(spec, env, 0.0);
    out.satisfied     = result.satisfied;
    out.robustness    = result.robustness;
    if (!out.satisfied) {
        out.failing = result.failing();
    }
    return out;
}

namespace
{

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next()
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z               = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z               = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform()
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream)
{
    SplitMix64 g{seed ^ (stream * 0xD1B54A32D192ED03ULL)};
    return g.next();
}

ParameterSet raw_sample(const Box& box, const ParameterSet& center, std::uint64_t seed, std::size_t index)
{
    SplitMix64 rng{mix(seed, index)};
    ParameterSet p = center;
    for (std::size_t d = 0; d < box.size(); ++d) {
        const auto& x = box[d];
        const double u = rng.uniform();
        put(p, box.name(d), x.lo == x.hi ? x.lo : x.lo + u * (x.hi - x.lo));
    }
    return p;
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body)
{
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers          = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

ParameterSet sample_point(const Box& box, const ParameterSet& center, std::uint64_t seed, std::size_t index)
{
    return pin_parameters(raw_sample(box, center, seed, index));
}

ValidationReport validate_box(const Box& box, const ParameterSet& center, const FormulaPtr& spec,
                              const ValidationOptions& options)
{
    for (const auto& name : box.names()) {
        if (name == "k_IRP_Ft") {
            throw DomainError("validate_box: k_IRP_Ft is pinned and cannot be a box dimension");
        }
        if (!center.get(name)) {
            throw ConfigError("validate_box: unknown parameter '" + name + "'");
        }
    }
    ValidationReport rep;
    rep.samples = options.samples;
    rep.seed    = options.seed;

    bool degenerate = true;
    for (std::size_t d = 0; d < box.size(); ++d) {
        degenerate = degenerate && box[d].lo == box[d].hi;
    }
    std::vector<SampleOutcome> outcomes(options.samples);
    if (degenerate && options.samples > 0) {
        const auto o = check_point(sample_point(box, center, options.seed, 0), spec, options.experiment);
        std::fill(outcomes.begin(), outcomes.end(), o);
    }
    else {
        parallel_for(options.samples, options.threads, [&](std::size_t i) {
            outcomes[i] = check_point(sample_point(box, center, options.seed, i), spec, options.experiment);
        });
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (o.satisfied) {
            ++rep.valid;
        }
        else if (rep.counterexamples.size() < options.max_counterexamples) {
            rep.counterexamples.push_back(
                {i, sample_point(box, center, options.seed, i), o.failing, o.robustness, o.error});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

double RobustRegion::mean_half_width() const
{
    if (half_widths.empty()) {
        return 0.0;
    }
    double s = 0;
    for (double w : half_widths) {
        s += w;
    }
    return s / static_cast<double>(half_widths.size());
}

Box relative_box(const ParameterSet& center, const std::vector<std::string>& dimensions,
                 const std::vector<double>& half_widths)
{
    Box box;
    for (std::size_t k = 0; k < dimensions.size(); ++k) {
        const double c = get(center, dimensions[k]);
        const double a = c * (1.0 - half_widths[k]);
        const double b = c * (1.0 + half_widths[k]);
        box.set(dimensions[k], {std::min(a, b), std::max(a, b)});
    }
    return box;
}

namespace
{

const std::map<std::string, std::vector<std::string>>& steady_dependencies()
{
    static const std::map<std::string, std::vector<std::string>> deps = {
        {"IRP", {"k_IRP_prod", "k_IRP_deg", "k_Fe_IRP"}},
        {"TfR1", {"k_IRP_prod", "k_IRP_deg", "k_Fe_IRP", "k_IRP_TfR1", "k_TfR1_prod", "k_TfR1_deg"}},
        {"FPN1a", {"k_FPN1a_prod", "k_FPN1a_deg"}},
        {"Ft", {"k_Ft_prod", "k_Ft_deg"}},
        {"Fe",
         {"k_IRP_prod", "k_IRP_deg", "k_Fe_IRP", "k_IRP_TfR1", "k_TfR1_prod", "k_TfR1_deg", "k_FPN1a_prod",
          "k_FPN1a_deg", "k_Fe_cons", "k_Fe_export", "k_Fe_input"}},
    };
    return deps;
}

void scan(const Expr& e, std::set<std::string>& params, std::set<std::string>& vars, bool& dynamic)
{
    switch (e.kind) {
    case ExprKind::Name:
        params.insert(e.name);
        break;
    case ExprKind::Signal:
        vars.insert(e.name);
        break;
    case ExprKind::Derivative:
        dynamic = true;
        break;
    default:
        break;
    }
    if (e.lhs) {
        scan(*e.lhs, params, vars, dynamic);
    }
    if (e.rhs) {
        scan(*e.rhs, params, vars, dynamic);
    }
}

void scan(const StlFormula& f, std::set<std::string>& params, std::set<std::string>& vars, bool& dynamic)
{
    if (f.kind == StlKind::Predicate) {
        scan(*f.lhs, params, vars, dynamic);
        scan(*f.rhs, params, vars, dynamic);
        return;
    }
    if (f.left) {
        scan(*f.left, params, vars, dynamic);
    }
    if (f.right) {
        scan(*f.right, params, vars, dynamic);
    }
}

} // namespace

std::vector<std::string> related_parameters(const StlFormula& conjunct)
{
    std::set<std::string> params, vars;
    bool dynamic = false;
    scan(conjunct, params, vars, dynamic);
    if (dynamic) {
        return {}; // transient behaviour depends on every parameter
    }
    std::set<std::string> out;
    for (const auto& p : params) {
        out.insert(p == "k_IRP_Ft" ? "k_Ft_prod" : p);
    }
    for (const auto& v : vars) {
        auto it = steady_dependencies().find(v);
        if (it != steady_dependencies().end()) {
            out.insert(it->second.begin(), it->second.end());
        }
    }
    return {out.begin(), out.end()};
}

namespace
{

/// Dimensions a failing conjunct of `cx` depends on; nullopt if any dimension may matter.
std::optional<std::set<std::size_t>> related_dimensions(const std::vector<std::string>& dims,
                                                        const std::map<std::string, FormulaPtr>& by_name,
                                                        const Counterexample& cx)
{
    std::set<std::size_t> out;
    if (cx.failing.empty()) {
        return std::nullopt;
    }
    for (const auto& name : cx.failing) {
        auto it = by_name.find(name);
        const auto params = it == by_name.end() ? std::vector<std::string>{} : related_parameters(*it->second);
        if (params.empty()) {
            return std::nullopt;
        }
        for (const auto& p : params) {
            auto d = std::find(dims.begin(), dims.end(), p);
            if (d != dims.end()) {
                out.insert(static_cast<std::size_t>(d - dims.begin()));
            }
        }
    }
    return out;
}

/// Candidates whose reset to the centre value alone makes `raw` satisfy `spec`.
std::set<std::size_t> repairing_dimensions(const RobustRegion& region, const ParameterSet& raw,
                                           const std::vector<std::size_t>& candidates, const FormulaPtr& spec,
                                           const Experiment& experiment)
{
    std::set<std::size_t> out;
    for (auto k : candidates) {
        const auto& name = region.dimensions[k];
        auto trial       = raw;
        trial.set(name, get(region.center, name));
        if (check_point(trial, spec, experiment).satisfied) {
            out.insert(k);
        }
    }
    return out;
}

/**
 * Dimensions to shrink for one confirmation counterexample: related
 * dimensions whose reset to the centre repairs it; if none, related
 * dimensions in the outer half of their range; if none, every dimension with
 * a nonzero width.
 */
std::set<std::size_t> confirmation_blame(const RobustRegion& region, const FormulaPtr& spec,
                                         const std::map<std::string, FormulaPtr>& by_name,
                                         const std::vector<double>& widths, std::uint64_t seed,
                                         const Counterexample& cx, const Experiment& experiment)
{
    const auto& dims   = region.dimensions;
    const auto related = related_dimensions(dims, by_name, cx);
    const auto raw     = raw_sample(region.box, region.center, seed, cx.index);
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (widths[k] > 0 && (!related || related->count(k))) {
            candidates.push_back(k);
        }
    }
    auto blamed = repairing_dimensions(region, raw, candidates, spec, experiment);
    if (blamed.empty()) {
        for (auto k : candidates) {
            const double c = get(region.center, dims[k]);
            if (std::fabs(get(raw, dims[k]) / c - 1.0) > 0.5 * widths[k]) {
                blamed.insert(k);
            }
        }
    }
    if (blamed.empty()) {
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (widths[k] > 0) {
                blamed.insert(k);
            }
        }
    }
    return blamed;
}

} // namespace

RobustRegion expand_box(const ParameterSet& center_in, const FormulaPtr& spec, const SensitivityReport& sens,
                        const ExpansionOptions& options)
{
    RobustRegion region;
    region.center     = pin_parameters(center_in);
    region.dimensions = options.parameters.empty() ? free_parameters() : options.parameters;
    const auto& dims  = region.dimensions;
    const auto n      = dims.size();

    const auto at_center = check_point(region.center, spec, options.experiment);
    if (!at_center.satisfied) {
        throw DomainError("expand_box: the centre does not satisfy the specification");
    }

    // Growth factor per dimension from the normalized aggregate sensitivity.
    const auto agg = sens.aggregate();
    std::vector<double> s(n, 0.0);
    double s_max = 0;
    for (std::size_t k = 0; k < n; ++k) {
        auto it = std::find(sens.parameters.begin(), sens.parameters.end(), dims[k]);
        s[k]    = it == sens.parameters.end() ? std::numeric_limits<double>::quiet_NaN()
                                              : agg[static_cast<std::size_t>(it - sens.parameters.begin())];
        if (std::isfinite(s[k])) {
            s_max = std::max(s_max, s[k]);
        }
    }
    std::vector<double> growth(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double shat = std::isfinite(s[k]) ? (s_max > 0 ? s[k] / s_max : 0.0) : 1.0;
        growth[k]         = 1.0 + options.growth / (1.0 + shat);
    }

    std::vector<double> widths(n, 0.0);
    region.frozen.assign(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        region.frozen[k] = get(region.center, dims[k]) == 0.0;
    }

    std::map<std::string, FormulaPtr> by_name;
    for (const auto& c : conjuncts(spec)) {
        by_name.emplace(c.name, c.formula);
    }

    ValidationOptions vopt;
    vopt.samples    = options.samples_per_round;
    vopt.threads    = options.threads;
    vopt.experiment = options.experiment;

    for (std::size_t round = 0; round < options.max_rounds; ++round) {
        std::vector<double> proposal = widths;
        bool any                     = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (region.frozen[k] || widths[k] >= options.max_half_width) {
                continue;
            }
            proposal[k] = widths[k] == 0 ? options.initial_half_width
                                         : std::min(options.max_half_width, widths[k] * growth[k]);
            any         = true;
        }
        if (!any) {
            break;
        }
        ++region.rounds;
        vopt.seed       = mix(options.seed, round + 1);
        const auto box  = relative_box(region.center, dims, proposal);
        const auto rep  = validate_box(box, region.center, spec, vopt);
        if (rep.valid == rep.samples) {
            widths = proposal;
            continue;
        }
        // Blame grown dimensions of a failing conjunct whose reset repairs the
        // sample; otherwise those that left the last valid box.
        const auto prev_box = relative_box(region.center, dims, widths);
        RobustRegion trial  = region;
        trial.box           = box;
        std::set<std::size_t> offending;
        for (const auto& cx : rep.counterexamples) {
            const auto raw     = raw_sample(box, region.center, vopt.seed, cx.index);
            const auto related = related_dimensions(dims, by_name, cx);
            std::vector<std::size_t> grown;
            std::set<std::size_t> outside;
            for (std::size_t k = 0; k < n; ++k) {
                if (proposal[k] != widths[k] && (!related || related->count(k))) {
                    grown.push_back(k);
                }
                if (!prev_box[k].contains(get(raw, dims[k])) && (!related || related->count(k))) {
                    outside.insert(k);
                }
            }
            auto blamed = repairing_dimensions(trial, raw, grown, spec, options.experiment);
            if (blamed.empty()) {
                blamed = outside;
            }
            if (blamed.empty()) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (!prev_box[k].contains(get(raw, dims[k]))) {
                        blamed.insert(k);
                    }
                }
            }
            if (blamed.empty()) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (proposal[k] != widths[k]) {
                        blamed.insert(k);
                    }
                }
            }
            offending.insert(blamed.begin(), blamed.end());
        }
        for (auto k : offending) {
            region.frozen[k] = true;
        }
    }

    // Confirmation run. Each counterexample blames the dimensions whose reset
    // to the centre repairs it; those shrink by one growth step until the run
    // passes. A box that only just passes keeps a residual failure rate of the
    // order of 1/final_samples, so shrunk dimensions then give up one more step
    // as a margin and the run is repeated.
    ValidationOptions fopt = vopt;
    fopt.samples           = options.final_samples ? options.final_samples : options.samples_per_round;
    fopt.seed              = mix(options.seed, 0);
    std::set<std::size_t> shrunk;
    bool margin_applied = false;
    for (std::size_t attempt = 0;; ++attempt) {
        region.box        = relative_box(region.center, dims, widths);
        region.validation = validate_box(region.box, region.center, spec, fopt);
        if (region.validation.valid == region.validation.samples) {
            if (shrunk.empty() || margin_applied) {
                break;
            }
            for (auto k : shrunk) {
                widths[k] /= growth[k];
            }
            margin_applied = true;
            continue;
        }
        if (attempt >= options.max_rounds) {
            std::fill(widths.begin(), widths.end(), 0.0);
            continue;
        }
        std::set<std::size_t> blamed;
        for (const auto& cx : region.validation.counterexamples) {
            const auto sample = confirmation_blame(region, spec, by_name, widths, fopt.seed, cx, options.experiment);
            blamed.insert(sample.begin(), sample.end());
        }
        for (auto k : blamed) {
            widths[k] /= growth[k];
            region.frozen[k] = true;
            shrunk.insert(k);
        }
    }
    region.half_widths = widths;
    return region;
}

} // namespace ironspec
