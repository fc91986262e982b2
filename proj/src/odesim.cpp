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
#include "ironspec/odesim.hpp"

#include "ironspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ironspec
{

double sig_plus(double x, double theta, double n)
{
    if (!(theta > 0)) {
        throw DomainError("sig_plus: threshold must be positive");
    }
    double r = std::max(x, 0.0) / theta;
    if (r > 1.0) {
        return 1.0 / (1.0 + std::pow(r, -n));
    }
    double rn = std::pow(r, n);
    return rn / (1.0 + rn);
}

StateVector rhs(const StateVector& s, const ParameterSet& p, double tf_sat)
{
    const double fe    = s[Species::Fe];
    const double tfr1  = s[Species::TfR1];
    const double fpn1a = s[Species::FPN1a];
    const double ft    = s[Species::Ft];
    const double irp   = s[Species::IRP];

    StateVector d;
    d[Species::Ft] = p.k_Ft_prod - p.k_IRP_Ft * sig_plus(irp, p.theta_IRP_Ft, p.n) - p.k_Ft_deg * ft;
    d[Species::Fe] = p.k_Fe_input * tfr1 * tf_sat - p.n_Ft * d[Species::Ft] - p.k_Fe_export * fe * fpn1a -
                     p.k_Fe_cons * fe;
    d[Species::IRP] = p.k_IRP_prod - p.k_Fe_IRP * sig_plus(fe, p.theta_Fe_IRP, p.n) * irp - p.k_IRP_deg * irp;
    d[Species::FPN1a] =
        p.k_FPN1a_prod - p.k_IRP_FPN1a * sig_plus(irp, p.theta_IRP_FPN1a, p.n) - p.k_FPN1a_deg * fpn1a;
    d[Species::TfR1] = p.k_TfR1_prod + p.k_IRP_TfR1 * irp - p.k_TfR1_deg * tfr1;
    return d;
}

// ---------------------------------------------------------------------------

InputSchedule::InputSchedule(double initial, std::vector<Switch> switches)
    : m_initial(initial)
    , m_switches(std::move(switches))
{
    auto check_value = [](double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("input schedule values must lie in [0, 1]");
        }
    };
    check_value(m_initial);
    double last = 0.0;
    for (const auto& s : m_switches) {
        check_value(s.value);
        if (!(s.time > last)) {
            throw DomainError("input schedule switch times must be positive and strictly increasing");
        }
        last = s.time;
    }
}

InputSchedule InputSchedule::cutoff(double replete_value, double cutoff_time)
{
    return InputSchedule(replete_value, {{cutoff_time, 0.0}});
}

double InputSchedule::value_at(double t) const
{
    double v = m_initial;
    for (const auto& s : m_switches) {
        if (t >= s.time) {
            v = s.value;
        }
        else {
            break;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------

std::vector<std::string> IronModel::variable_names() const
{
    return {species_names.begin(), species_names.end()};
}

void IronModel::rhs(std::span<const double> y, double input, std::span<double> dydt) const
{
    StateVector s;
    std::copy(y.begin(), y.end(), s.begin());
    auto d = ironspec::rhs(s, m_params, input);
    std::copy(d.begin(), d.end(), dydt.begin());
}

// ---------------------------------------------------------------------------

Trace::Trace(std::vector<std::string> variables, std::vector<double> times, std::vector<std::vector<double>> values,
             std::vector<std::vector<double>> derivatives, std::vector<double> input, std::string input_name,
             std::vector<bool> on_grid, std::vector<SwitchLimits> switches)
    : m_variables(std::move(variables))
    , m_times(std::move(times))
    , m_values(std::move(values))
    , m_derivatives(std::move(derivatives))
    , m_input(std::move(input))
    , m_input_name(std::move(input_name))
    , m_on_grid(std::move(on_grid))
    , m_switches(std::move(switches))
{
    const auto n = m_times.size();
    if (n == 0) {
        throw DomainError("trace must contain at least one sample");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(m_times[i] > m_times[i - 1])) {
            throw DomainError("trace times must be strictly increasing");
        }
    }
    if (m_values.size() != m_variables.size()) {
        throw DomainError("trace: one value series per variable required");
    }
    if (m_derivatives.empty()) {
        m_derivatives.assign(m_variables.size(), std::vector<double>(n, 0.0));
    }
    if (m_derivatives.size() != m_variables.size()) {
        throw DomainError("trace: one derivative series per variable required");
    }
    for (std::size_t v = 0; v < m_variables.size(); ++v) {
        if (m_values[v].size() != n || m_derivatives[v].size() != n) {
            throw DomainError("trace: series length does not match time axis");
        }
    }
    if (m_input.empty()) {
        m_input.assign(n, 0.0);
    }
    if (m_on_grid.empty()) {
        m_on_grid.assign(n, true);
    }
    if (m_input.size() != n || m_on_grid.size() != n) {
        throw DomainError("trace: input/grid length does not match time axis");
    }
}

int Trace::find_variable(std::string_view name) const
{
    for (std::size_t i = 0; i < m_variables.size(); ++i) {
        if (m_variables[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

double Trace::value_at(std::size_t var, double t) const
{
    const auto& v = m_values[var];
    if (t <= m_times.front()) {
        return v.front();
    }
    if (t >= m_times.back()) {
        return v.back();
    }
    auto it     = std::upper_bound(m_times.begin(), m_times.end(), t);
    auto i      = static_cast<std::size_t>(it - m_times.begin());
    double t0   = m_times[i - 1];
    double t1   = m_times[i];
    double frac = (t - t0) / (t1 - t0);
    return v[i - 1] + frac * (v[i] - v[i - 1]);
}

StateVector Trace::state(std::size_t i) const
{
    StateVector s;
    for (std::size_t v = 0; v < num_species; ++v) {
        s[v] = m_values[v][i];
    }
    return s;
}

StateVector Trace::derivative(std::size_t i) const
{
    StateVector s;
    for (std::size_t v = 0; v < num_species; ++v) {
        s[v] = m_derivatives[v][i];
    }
    return s;
}

void Trace::write_csv(std::ostream& os) const
{
    os << "t";
    for (const auto& v : m_variables) {
        os << ',' << v;
    }
    for (const auto& v : m_variables) {
        os << ",d" << v;
    }
    os << ',' << m_input_name << '\n';

    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.15e", x);
        os << buf;
    };
    for (std::size_t i = 0; i < size(); ++i) {
        if (!m_on_grid[i]) {
            continue;
        }
        put(m_times[i]);
        for (const auto& series : m_values) {
            os << ',';
            put(series[i]);
        }
        for (const auto& series : m_derivatives) {
            os << ',';
            put(series[i]);
        }
        os << ',';
        put(m_input[i]);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with Hairer's continuous extension.

namespace
{

namespace dp
{
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace dp

using Vec = std::vector<double>;

struct Sample {
    double t;
    Vec y;
    bool grid;
};

class Integrator
{
public:
    Integrator(const OdeModel& model, std::size_t dim, const SimulationOptions& opt)
        : m_model(model)
        , m_opt(opt)
        , m_dim(dim)
        , k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), y1(dim), err(dim)
    {
    }

    // Integrates [t0, t1] with constant input, appending samples at grid points
    // (multiples of report_interval, plus `horizon`) and accepted steps.
    void segment(double t0, double t1, Vec& y, double input, double horizon, std::vector<Sample>& out)
    {
        if (t1 <= t0) {
            return;
        }
        m_input = input;
        f(y, k1);
        double h = initial_step(t0, t1, y);
        double t = t0;
        bool rejected = false;
        std::size_t steps = 0;
        const double tiny = 4 * std::numeric_limits<double>::epsilon();

        while (t < t1) {
            if (++steps > m_opt.max_steps) {
                throw IntegrationError("step budget exhausted", t);
            }
            bool last = false;
            if (t + h >= t1 - tiny * std::abs(t1)) {
                h    = t1 - t;
                last = true;
            }
            if (h <= tiny * std::max(1.0, std::abs(t))) {
                throw IntegrationError("step size underflow (problem may be stiff)", t);
            }
            double e = attempt(y, h);
            if (!std::isfinite(e)) {
                e = 1e10;
            }
            bool negative = false;
            for (std::size_t i = 0; i < m_dim; ++i) {
                negative = negative || y1[i] < -m_opt.abs_tol;
            }
            if (e <= 1.0 && negative) {
                // Retry with a smaller step; failing that, the underflow check reports it.
                if (h <= 1e-9 * std::max(1.0, std::abs(t))) {
                    throw IntegrationError("state component became negative", t);
                }
                h *= 0.5;
                rejected = true;
                continue;
            }
            if (e <= 1.0) {
                double tn = last ? t1 : t + h;
                emit_dense(t, tn, h, y, horizon, out);
                if (m_opt.keep_internal_steps || last) {
                    push(out, tn, y1, is_grid(tn, horizon));
                }
                t = tn;
                y.swap(y1);
                k1.swap(k7);
                double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                if (rejected) {
                    fac = std::min(fac, 1.0);
                }
                h *= fac;
                rejected = false;
            }
            else {
                h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
                rejected = true;
            }
        }
    }

    void f(const Vec& y, Vec& dy) const
    {
        m_model.rhs(y, m_input, dy);
    }

    bool is_grid(double t, double horizon) const
    {
        if (t == horizon) {
            return true;
        }
        double k = std::round(t / m_opt.report_interval);
        return k * m_opt.report_interval == t;
    }

private:
    double norm(const Vec& v, const Vec& y) const
    {
        double s = 0;
        for (std::size_t i = 0; i < m_dim; ++i) {
            double sc = m_opt.abs_tol + m_opt.rel_tol * std::abs(y[i]);
            s += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(s / static_cast<double>(m_dim));
    }

    double initial_step(double t0, double t1, const Vec& y)
    {
        double d0 = norm(y, y);
        double d1 = norm(k1, y);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0        = std::min(h0, t1 - t0);
        for (std::size_t i = 0; i < m_dim; ++i) {
            tmp[i] = y[i] + h0 * k1[i];
        }
        f(tmp, k2);
        for (std::size_t i = 0; i < m_dim; ++i) {
            err[i] = k2[i] - k1[i];
        }
        double d2 = norm(err, y) / h0;
        double m  = std::max(d1, d2);
        double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        return std::min({100 * h0, h1, t1 - t0});
    }

    double attempt(const Vec& y, double h)
    {
        using namespace dp;
        const auto n = m_dim;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        f(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(y1, k7);

        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double e  = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = m_opt.abs_tol + m_opt.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            s += (e / sc) * (e / sc);
        }
        return std::sqrt(s / static_cast<double>(n));
    }

    void emit_dense(double t, double tn, double h, const Vec& y, double horizon, std::vector<Sample>& out)
    {
        const double dt = m_opt.report_interval;
        auto g          = static_cast<long long>(std::floor(t / dt)) + 1;
        bool prepared   = false;
        for (;; ++g) {
            double tg = static_cast<double>(g) * dt;
            if (tg >= tn || tg > horizon) {
                break;
            }
            if (tg <= t) {
                continue;
            }
            if (!prepared) {
                prepare_dense(h, y);
                prepared = true;
            }
            double theta = (tg - t) / h;
            double th1   = 1.0 - theta;
            Vec yg(m_dim);
            for (std::size_t i = 0; i < m_dim; ++i) {
                yg[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
                // Both step ends passed the negativity check; keep the interpolant within the same bound.
                yg[i] = std::max(yg[i], -m_opt.abs_tol);
            }
            push(out, tg, std::move(yg), true);
        }
    }

    void prepare_dense(double h, const Vec& y)
    {
        using namespace dp;
        r1.resize(m_dim), r2.resize(m_dim), r3.resize(m_dim), r4.resize(m_dim), r5.resize(m_dim);
        for (std::size_t i = 0; i < m_dim; ++i) {
            double ydiff = y1[i] - y[i];
            double bspl  = h * k1[i] - ydiff;
            r1[i]        = y[i];
            r2[i]        = ydiff;
            r3[i]        = bspl;
            r4[i]        = ydiff - h * k7[i] - bspl;
            r5[i]        = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
    }

    static void push(std::vector<Sample>& out, double t, Vec y, bool grid)
    {
        if (!out.empty() && out.back().t >= t) {
            if (out.back().t == t) {
                out.back().grid = out.back().grid || grid;
            }
            return;
        }
        out.push_back({t, std::move(y), grid});
    }

    const OdeModel& m_model;
    const SimulationOptions& m_opt;
    std::size_t m_dim;
    double m_input = 0;
    Vec k1, k2, k3, k4, k5, k6, k7, tmp, y1, err;
    Vec r1, r2, r3, r4, r5;
};

} // namespace

Trace simulate(const OdeModel& model, std::span<const double> init, const InputSchedule& schedule, double horizon,
               const SimulationOptions& options)
{
    if (!(horizon >= 0)) {
        throw DomainError("simulate: horizon must be non-negative");
    }
    if (!(options.rel_tol > 0) || !(options.abs_tol > 0) || !(options.report_interval > 0)) {
        throw DomainError("simulate: tolerances and reporting interval must be positive");
    }
    auto names     = model.variable_names();
    const auto dim = names.size();
    if (init.size() != dim) {
        throw DomainError("simulate: initial state has wrong dimension");
    }

    Integrator integrator(model, dim, options);
    std::vector<Sample> samples;
    Vec y(init.begin(), init.end());
    samples.push_back({0.0, y, true});

    std::vector<Trace::SwitchLimits> limits;
    double t = 0.0;
    double u = schedule.initial();
    for (const auto& sw : schedule.switches()) {
        if (sw.time >= horizon) {
            break;
        }
        integrator.segment(t, sw.time, y, u, horizon, samples);
        Trace::SwitchLimits lim{sw.time, Vec(dim), Vec(dim)};
        model.rhs(y, u, lim.left);
        model.rhs(y, sw.value, lim.right);
        limits.push_back(std::move(lim));
        t = sw.time;
        u = sw.value;
    }
    integrator.segment(t, horizon, y, u, horizon, samples);

    const auto n = samples.size();
    std::vector<double> times(n), input(n);
    std::vector<std::vector<double>> values(dim, std::vector<double>(n)), derivs(dim, std::vector<double>(n));
    std::vector<bool> grid(n);
    Vec dy(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        times[i]      = s.t;
        input[i]      = schedule.value_at(s.t);
        grid[i]       = s.grid;
        model.rhs(s.y, input[i], dy);
        for (std::size_t v = 0; v < dim; ++v) {
            values[v][i] = s.y[v];
            derivs[v][i] = dy[v];
        }
    }
    return Trace(std::move(names), std::move(times), std::move(values), std::move(derivs), std::move(input), model.input_name(),
                 std::move(grid), std::move(limits));
}

Trace simulate(const ParameterSet& params, const StateVector& init, const InputSchedule& schedule, double horizon,
               const SimulationOptions& options)
{
    return simulate(IronModel(params), init, schedule, horizon, options);
}

} // namespace ironspec
