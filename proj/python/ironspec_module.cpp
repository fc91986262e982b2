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
// Python bindings: parameter sets travel as dicts keyed by canonical name.

#include "ironspec/errors.hpp"
#include "ironspec/explore.hpp"
#include "ironspec/interval.hpp"
#include "ironspec/odesim.hpp"
#include "ironspec/steady.hpp"
#include "ironspec/stl.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace ironspec;

namespace
{

using ParamDict = std::map<std::string, double>;

ParamDict to_dict(const ParameterSet& p)
{
    ParamDict out;
    for (const auto& info : parameter_table()) {
        out[std::string(info.name)] = p.*info.member;
    }
    return out;
}

/// Missing names keep their reference value.
ParameterSet from_dict(const ParamDict& d)
{
    auto p = reference_parameters();
    for (const auto& [name, value] : d) {
        const auto canonical = canonical_parameter_name(name);
        if (!canonical || !p.set(*canonical, value)) {
            throw py::key_error("unknown parameter: " + name);
        }
    }
    return p;
}

py::dict state_dict(const StateVector& s)
{
    py::dict out;
    for (std::size_t i = 0; i < num_species; ++i) {
        out[py::str(std::string(species_names[i]))] = s[i];
    }
    return out;
}

py::dict trace_dict(const Trace& tr)
{
    py::dict out;
    out["t"] = tr.times();
    for (std::size_t v = 0; v < tr.variables().size(); ++v) {
        out[py::str(tr.variables()[v])] = tr.values(v);
    }
    return out;
}

py::dict steady(const ParamDict& params, double tf_sat)
{
    const auto ss = steady_state(from_dict(params), tf_sat);
    py::dict out;
    out["state"] = state_dict(ss.state);
    out["eigenvalues"] = ss.eigenvalues;
    out["stable"] = ss.stable;
    out["regime_consistent"] = ss.regime_consistent;
    return out;
}

py::dict experiment(const ParamDict& params, double cutoff_hours, double horizon_hours, bool pin)
{
    auto p = from_dict(params);
    if (pin) {
        p = pin_parameters(p);
    }
    Experiment e;
    e.cutoff_time = cutoff_hours * seconds_per_hour;
    e.horizon     = horizon_hours * seconds_per_hour;
    const auto tr = run_experiment(p, e);
    const auto s  = summarize_cutoff(tr, e.cutoff_time, 0.01, ferritin_floor(p));
    py::dict out  = trace_dict(tr);
    out["plateau_duration"]   = s.plateau_duration;
    out["ft_exhaustion_time"] = s.ft_exhaustion_time;
    out["fe_exhaustion_time"] = s.fe_exhaustion_time;
    return out;
}

py::dict check(const ParamDict& params, const std::string& formula)
{
    const auto p   = pin_parameters(from_dict(params));
    const auto lib = build_iron_spec(published_variable_bounds());
    const auto f   = lib.contains(formula) ? lib.get(formula) : parse_formula(formula, &lib);
    const auto tr  = run_experiment(p);
    EvalEnvironment env(tr, parameter_bindings(p));
    const auto r = monitor(f, env, 0.0);
    py::dict out;
    out["satisfied"]  = r.satisfied;
    out["robustness"] = r.robustness;
    py::dict per;
    for (const auto& c : r.per_conjunct) {
        per[py::str(c.name)] = py::make_tuple(c.satisfied, c.robustness, c.time);
    }
    out["conjuncts"] = per;
    return out;
}

std::map<std::string, std::pair<double, double>> propagate_text(const std::string& constraints,
                                                                 const std::map<std::string, std::pair<double, double>>& box)
{
    Box b;
    for (const auto& [name, bounds] : box) {
        b.set(name, Interval{bounds.first, bounds.second});
    }
    const auto r = propagate(parse_constraints(constraints), b);
    std::map<std::string, std::pair<double, double>> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        out[r.name(i)] = {r[i].lo, r[i].hi};
    }
    return out;
}

py::list contract(double tf_sat)
{
    const auto sys = build_iron_constraints(tf_sat);
    const auto r   = propagate(sys.constraints, sys.box);
    py::list out;
    for (const auto& m : match_deductions(sys.box, r)) {
        py::dict d;
        d["name"]    = m.deduction.name;
        d["lower"]   = m.deduction.lower;
        d["before"]  = py::make_tuple(m.before.lo, m.before.hi);
        d["after"]   = py::make_tuple(m.after.lo, m.after.hi);
        d["matched"] = m.matched;
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_ironspec, m)
{
    m.doc() = "Iron homeostasis model: simulation, STL monitoring and interval contraction";

    py::register_exception<Error>(m, "IronspecError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("reference_parameters", [] { return to_dict(reference_parameters()); },
          "Published parameter set as a dict (SI units).");
    m.def("pin_parameters", [](const ParamDict& p) { return to_dict(pin_parameters(from_dict(p))); },
          py::arg("params"));
    m.def("steady_state", &steady, py::arg("params"), py::arg("tf_sat") = 0.3,
          "Closed-form iron-replete equilibrium with its eigenvalues.");
    m.def("run_experiment", &experiment, py::arg("params"), py::arg("cutoff_hours") = 6.0,
          py::arg("horizon_hours") = 48.0, py::arg("pin") = true,
          "Iron cutoff simulation; returns the trace and its plateau/exhaustion summary.");
    m.def("monitor", &check, py::arg("params"), py::arg("formula") = "phi_all",
          "Monitors a named or inline formula on the cutoff experiment.");
    m.def("propagate", &propagate_text, py::arg("constraints"), py::arg("box"),
          "Contracts a box under newline-separated constraints.");
    m.def("contract", &contract, py::arg("tf_sat") = 0.3,
          "Propagates the iron steady-state system and matches the published deductions.");
}
