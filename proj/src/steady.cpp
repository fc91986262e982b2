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
#include "ironspec/steady.hpp"

#include "ironspec/errors.hpp"
#include "ironspec/odesim.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

namespace ironspec
{

namespace
{

double checked_div(double num, double den, const char* what)
{
    if (den == 0.0) {
        throw DegenerateParametersError(std::string("steady_state: zero denominator in ") + what);
    }
    return num / den;
}

// d/dx of x^n/(x^n+theta^n), written as n*s*(1-s)/x.
double sig_plus_slope(double x, double theta, double n)
{
    if (x <= 0.0) {
        return 0.0;
    }
    double s = sig_plus(x, theta, n);
    return n * s * (1.0 - s) / x;
}

constexpr auto Fe    = index(Species::Fe);
constexpr auto TfR1  = index(Species::TfR1);
constexpr auto FPN1a = index(Species::FPN1a);
constexpr auto Ft    = index(Species::Ft);
constexpr auto IRP   = index(Species::IRP);

} // namespace

SteadyState steady_state(const ParameterSet& p, double tf_sat)
{
    const double irp_loss = p.k_IRP_deg + p.k_Fe_IRP;
    const double tfr1_num = irp_loss * p.k_TfR1_prod + p.k_IRP_TfR1 * p.k_IRP_prod;

    SteadyState ss;
    auto& x = ss.state;
    x[Ft]   = checked_div(p.k_Ft_prod, p.k_Ft_deg, "Ft");
    x[FPN1a] = checked_div(p.k_FPN1a_prod, p.k_FPN1a_deg, "FPN1a");
    x[IRP]  = checked_div(p.k_IRP_prod, irp_loss, "IRP");
    x[TfR1] = checked_div(tfr1_num, irp_loss * p.k_TfR1_deg, "TfR1");
    x[Fe]   = checked_div(tf_sat * p.k_FPN1a_deg * p.k_Fe_input * tfr1_num,
                          (p.k_Fe_export * p.k_FPN1a_prod + p.k_Fe_cons * p.k_FPN1a_deg) * irp_loss * p.k_TfR1_deg,
                          "Fe");

    ParameterSet with_input = p;
    with_input.Tf_sat       = tf_sat;
    ss.jacobian             = jacobian_at(with_input, x);
    ss.stable               = true;
    for (std::size_t i = 0; i < num_species; ++i) {
        ss.eigenvalues[i] = ss.jacobian[i][i];
        ss.stable         = ss.stable && ss.eigenvalues[i] < 0.0;
    }
    ss.regime_consistent = x[Fe] > p.theta_Fe_IRP && x[IRP] < p.theta_IRP_Ft && x[IRP] < p.theta_IRP_FPN1a;
    return ss;
}

Matrix5 jacobian_at(const ParameterSet& p, const StateVector& x)
{
    Matrix5 j{};
    j[Fe][Fe]       = -x[FPN1a] * p.k_Fe_export - p.k_Fe_cons;
    j[Fe][TfR1]     = p.Tf_sat * p.k_Fe_input;
    j[Fe][FPN1a]    = -x[Fe] * p.k_Fe_export;
    j[Fe][Ft]       = p.k_Ft_deg * p.n_Ft;
    j[TfR1][TfR1]   = -p.k_TfR1_deg;
    j[TfR1][IRP]    = p.k_IRP_TfR1;
    j[FPN1a][FPN1a] = -p.k_FPN1a_deg;
    j[Ft][Ft]       = -p.k_Ft_deg;
    j[IRP][IRP]     = -p.k_IRP_deg - p.k_Fe_IRP;
    return j;
}

Matrix5 jacobian_full(const ParameterSet& p, const StateVector& x)
{
    const double dsig_ft    = sig_plus_slope(x[IRP], p.theta_IRP_Ft, p.n);
    const double dsig_fpn   = sig_plus_slope(x[IRP], p.theta_IRP_FPN1a, p.n);
    const double sig_fe     = sig_plus(x[Fe], p.theta_Fe_IRP, p.n);
    const double dsig_fe    = sig_plus_slope(x[Fe], p.theta_Fe_IRP, p.n);
    const double dft_dirp   = -p.k_IRP_Ft * dsig_ft;

    Matrix5 j{};
    j[Ft][Ft]       = -p.k_Ft_deg;
    j[Ft][IRP]      = dft_dirp;
    j[Fe][Fe]       = -x[FPN1a] * p.k_Fe_export - p.k_Fe_cons;
    j[Fe][TfR1]     = p.Tf_sat * p.k_Fe_input;
    j[Fe][FPN1a]    = -x[Fe] * p.k_Fe_export;
    j[Fe][Ft]       = p.k_Ft_deg * p.n_Ft;
    j[Fe][IRP]      = -p.n_Ft * dft_dirp;
    j[IRP][Fe]      = -p.k_Fe_IRP * dsig_fe * x[IRP];
    j[IRP][IRP]     = -p.k_Fe_IRP * sig_fe - p.k_IRP_deg;
    j[FPN1a][FPN1a] = -p.k_FPN1a_deg;
    j[FPN1a][IRP]   = -p.k_IRP_FPN1a * dsig_fpn;
    j[TfR1][TfR1]   = -p.k_TfR1_deg;
    j[TfR1][IRP]    = p.k_IRP_TfR1;
    return j;
}

StabilityReport stability(const ParameterSet& params)
{
    auto ss = steady_state(params, params.Tf_sat);
    return {ss.stable, ss.eigenvalues};
}

SignedDigraph interaction_graph(const ParameterSet& p)
{
    struct Term {
        std::size_t from, to;
        int sign;
        double coefficient; // structural gate: arc exists iff nonzero
    };
    // Each entry mirrors one term of jacobian_full; signs follow from the
    // term structure for nonnegative parameters and states.
    const Term terms[] = {
        {Fe, Fe, -1, p.k_Fe_export + p.k_Fe_cons},
        {TfR1, Fe, +1, p.k_Fe_input * p.Tf_sat},
        {FPN1a, Fe, -1, p.k_Fe_export},
        {Ft, Fe, +1, p.n_Ft * p.k_Ft_deg},
        {IRP, Fe, +1, p.n_Ft * p.k_IRP_Ft},
        {TfR1, TfR1, -1, p.k_TfR1_deg},
        {IRP, TfR1, +1, p.k_IRP_TfR1},
        {FPN1a, FPN1a, -1, p.k_FPN1a_deg},
        {IRP, FPN1a, -1, p.k_IRP_FPN1a},
        {Ft, Ft, -1, p.k_Ft_deg},
        {IRP, Ft, -1, p.k_IRP_Ft},
        {Fe, IRP, -1, p.k_Fe_IRP},
        {IRP, IRP, -1, p.k_IRP_deg + p.k_Fe_IRP},
    };
    SignedDigraph g;
    g.nodes.assign(species_names.begin(), species_names.end());
    for (const auto& t : terms) {
        if (t.coefficient != 0.0) {
            g.arcs.push_back({t.from, t.to, t.sign});
        }
    }
    return g;
}

void SignedDigraph::write_dot(std::ostream& os) const
{
    os << "digraph interaction {\n";
    for (const auto& n : nodes) {
        os << "  \"" << n << "\";\n";
    }
    for (const auto& a : arcs) {
        os << "  \"" << nodes[a.from] << "\" -> \"" << nodes[a.to] << "\" [sign=\"" << (a.sign > 0 ? '+' : '-')
           << "\"];\n";
    }
    os << "}\n";
}

std::vector<Circuit> enumerate_circuits(const SignedDigraph& g)
{
    const auto n = g.nodes.size();
    std::vector<std::vector<const SignedArc*>> out(n);
    for (const auto& a : g.arcs) {
        out[a.from].push_back(&a);
    }

    // Each elementary circuit is reported once, rooted at its smallest node.
    std::vector<Circuit> circuits;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);
    std::function<void(std::size_t, std::size_t, int)> dfs = [&](std::size_t root, std::size_t v, int sign) {
        for (const auto* a : out[v]) {
            if (a->to == root) {
                circuits.push_back({path, sign * a->sign});
            }
            else if (a->to > root && !on_path[a->to]) {
                on_path[a->to] = true;
                path.push_back(a->to);
                dfs(root, a->to, sign * a->sign);
                path.pop_back();
                on_path[a->to] = false;
            }
        }
    };
    for (std::size_t root = 0; root < n; ++root) {
        path       = {root};
        on_path[root] = true;
        dfs(root, root, 1);
        on_path[root] = false;
    }
    return circuits;
}

std::string format_circuit(const SignedDigraph& g, const Circuit& c)
{
    std::string s;
    for (auto v : c.nodes) {
        s += g.nodes[v] + "->";
    }
    s += g.nodes[c.nodes.front()];
    s += c.sign > 0 ? " (+)" : " (-)";
    return s;
}

} // namespace ironspec
