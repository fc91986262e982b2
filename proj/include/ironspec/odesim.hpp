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
#pragma once

#include "ironspec/parameters.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ironspec
{

/**
 * Hill-type activation x^n / (x^n + theta^n).
 *
 * Evaluated through r = x/theta as r^n/(1+r^n), switching to 1/(1+r^-n)
 * for r > 1 so that steep sigmoids (n = 30) never overflow. Negative x is
 * clamped to zero. Throws DomainError for theta <= 0.
 */
double sig_plus(double x, double theta, double n);

/// Right-hand side of the five-species iron model. dFt/dt is substituted into the iron balance.
StateVector rhs(const StateVector& state, const ParameterSet& params, double tf_sat);

/// Piecewise-constant input: `initial` on [0, first switch), then each switch value from its time on.
class InputSchedule
{
public:
    struct Switch {
        double time;
        double value;
    };

    explicit InputSchedule(double initial = 0.0, std::vector<Switch> switches = {});

    /// Iron-replete input that is cut to zero at `cutoff_time`.
    static InputSchedule cutoff(double replete_value, double cutoff_time);

    double initial() const
    {
        return m_initial;
    }
    const std::vector<Switch>& switches() const
    {
        return m_switches;
    }

    /// Right-continuous value at t.
    double value_at(double t) const;

private:
    double m_initial;
    std::vector<Switch> m_switches;
};

/// Generic autonomous-with-input ODE model y' = f(y, u).
class OdeModel
{
public:
    virtual ~OdeModel() = default;

    virtual std::vector<std::string> variable_names() const = 0;
    virtual std::string input_name() const
    {
        return "u";
    }
    virtual void rhs(std::span<const double> y, double input, std::span<double> dydt) const = 0;
};

class IronModel final : public OdeModel
{
public:
    explicit IronModel(ParameterSet params)
        : m_params(params)
    {
    }

    std::vector<std::string> variable_names() const override;
    std::string input_name() const override
    {
        return "TfSat";
    }
    void rhs(std::span<const double> y, double input, std::span<double> dydt) const override;

    const ParameterSet& params() const
    {
        return m_params;
    }

private:
    ParameterSet m_params;
};

/**
 * Time-ordered multivariate signal. Every sample carries the state, the
 * right-hand-side derivative and the input value. Immutable once built.
 */
class Trace
{
public:
    /// Derivative left and right limits at an input switch time.
    struct SwitchLimits {
        double time;
        std::vector<double> left;
        std::vector<double> right;
    };

    Trace() = default;

    /**
     * @param values      values[var][sample]
     * @param derivatives derivatives[var][sample]; empty means "all zero"
     * @param on_grid     marks reporting-grid samples; empty means "all"
     */
    Trace(std::vector<std::string> variables, std::vector<double> times, std::vector<std::vector<double>> values,
          std::vector<std::vector<double>> derivatives = {}, std::vector<double> input = {},
          std::string input_name = "u", std::vector<bool> on_grid = {}, std::vector<SwitchLimits> switches = {});

    std::size_t size() const
    {
        return m_times.size();
    }
    bool empty() const
    {
        return m_times.empty();
    }
    double start_time() const
    {
        return m_times.front();
    }
    double end_time() const
    {
        return m_times.back();
    }

    const std::vector<std::string>& variables() const
    {
        return m_variables;
    }
    const std::vector<double>& times() const
    {
        return m_times;
    }
    const std::vector<double>& values(std::size_t var) const
    {
        return m_values[var];
    }
    const std::vector<double>& derivatives(std::size_t var) const
    {
        return m_derivatives[var];
    }
    const std::vector<double>& input() const
    {
        return m_input;
    }
    const std::string& input_name() const
    {
        return m_input_name;
    }
    bool on_grid(std::size_t i) const
    {
        return m_on_grid[i];
    }
    const std::vector<SwitchLimits>& switches() const
    {
        return m_switches;
    }

    /// Index of a variable, or -1.
    int find_variable(std::string_view name) const;

    /// Linear interpolation of a variable at time t (clamped to the domain).
    double value_at(std::size_t var, double t) const;

    /// Iron state at sample i; only valid for traces of the iron model.
    StateVector state(std::size_t i) const;
    StateVector derivative(std::size_t i) const;

    /// Reporting-grid rows as CSV: t, variables, d<variable>, input.
    void write_csv(std::ostream& os) const;

private:
    std::vector<std::string> m_variables;
    std::vector<double> m_times;
    std::vector<std::vector<double>> m_values;
    std::vector<std::vector<double>> m_derivatives;
    std::vector<double> m_input;
    std::string m_input_name;
    std::vector<bool> m_on_grid;
    std::vector<SwitchLimits> m_switches;
};

struct SimulationOptions {
    double rel_tol         = 1e-8;
    double abs_tol         = 1e-16;
    double report_interval = 60.0;
    /// Add every accepted integrator step to the trace, not only the reporting grid.
    bool keep_internal_steps = true;
    std::size_t max_steps    = 5'000'000;
};

/**
 * Integrates `model` from `init` with an embedded Dormand-Prince 5(4) pair.
 * Integration restarts exactly at every input switch time. Throws
 * IntegrationError on step-size underflow, step budget exhaustion or a
 * state component dropping below -abs_tol.
 */
Trace simulate(const OdeModel& model, std::span<const double> init, const InputSchedule& schedule, double horizon,
               const SimulationOptions& options = {});

Trace simulate(const ParameterSet& params, const StateVector& init, const InputSchedule& schedule, double horizon,
               const SimulationOptions& options = {});

inline constexpr double seconds_per_hour = 3600.0;

} // namespace ironspec
