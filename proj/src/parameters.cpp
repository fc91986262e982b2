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
#include "ironspec/parameters.hpp"

#include <algorithm>
#include <array>

namespace ironspec
{

namespace
{

constexpr std::array<ParameterInfo, 21> table = {{
    {"k_TfR1_prod", &ParameterSet::k_TfR1_prod, "mol/L/s", true},
    {"k_IRP_prod", &ParameterSet::k_IRP_prod, "mol/L/s", true},
    {"k_Ft_prod", &ParameterSet::k_Ft_prod, "mol/L/s", true},
    {"k_FPN1a_prod", &ParameterSet::k_FPN1a_prod, "mol/L/s", true},
    {"k_IRP_Ft", &ParameterSet::k_IRP_Ft, "mol/L/s", true},
    {"k_IRP_FPN1a", &ParameterSet::k_IRP_FPN1a, "mol/L/s", true},
    {"k_TfR1_deg", &ParameterSet::k_TfR1_deg, "1/s", true},
    {"k_IRP_deg", &ParameterSet::k_IRP_deg, "1/s", true},
    {"k_Ft_deg", &ParameterSet::k_Ft_deg, "1/s", true},
    {"k_FPN1a_deg", &ParameterSet::k_FPN1a_deg, "1/s", true},
    {"k_Fe_input", &ParameterSet::k_Fe_input, "1/s", true},
    {"k_Fe_cons", &ParameterSet::k_Fe_cons, "1/s", true},
    {"k_Fe_IRP", &ParameterSet::k_Fe_IRP, "1/s", true},
    {"k_IRP_TfR1", &ParameterSet::k_IRP_TfR1, "1/s", true},
    {"k_Fe_export", &ParameterSet::k_Fe_export, "L/mol/s", true},
    {"n_Ft", &ParameterSet::n_Ft, "1", true},
    {"theta_Fe_IRP", &ParameterSet::theta_Fe_IRP, "mol/L", true},
    {"theta_IRP_Ft", &ParameterSet::theta_IRP_Ft, "mol/L", true},
    {"theta_IRP_FPN1a", &ParameterSet::theta_IRP_FPN1a, "mol/L", true},
    {"n", &ParameterSet::n, "1", false},
    {"Tf_sat", &ParameterSet::Tf_sat, "1", true},
}};

constexpr std::array<std::string_view, 19> kinetic_names = {
    "k_TfR1_prod", "k_IRP_prod",   "k_Ft_prod",   "k_FPN1a_prod", "k_IRP_Ft",   "k_IRP_FPN1a", "k_TfR1_deg",
    "k_IRP_deg",   "k_Ft_deg",     "k_FPN1a_deg", "k_Fe_input",   "k_Fe_cons",  "k_Fe_IRP",    "k_IRP_TfR1",
    "k_Fe_export", "n_Ft",         "theta_Fe_IRP", "theta_IRP_Ft", "theta_IRP_FPN1a"};

const ParameterInfo* find(std::string_view name)
{
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& p) {
        return p.name == name;
    });
    return it == table.end() ? nullptr : &*it;
}

// Drops underscores so that "kFe_cons" and "k_Fe_cons" compare equal.
std::string squash(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (c != '_') {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::optional<Species> species_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < num_species; ++i) {
        if (species_names[i] == name) {
            return static_cast<Species>(i);
        }
    }
    return std::nullopt;
}

std::optional<double> ParameterSet::get(std::string_view name) const
{
    if (auto p = find(name)) {
        return this->*(p->member);
    }
    return std::nullopt;
}

bool ParameterSet::set(std::string_view name, double value)
{
    if (auto p = find(name)) {
        this->*(p->member) = value;
        return true;
    }
    return false;
}

std::span<const ParameterInfo> parameter_table()
{
    return table;
}

std::span<const std::string_view> kinetic_parameter_names()
{
    return kinetic_names;
}

std::optional<std::string> canonical_parameter_name(std::string_view name)
{
    if (find(name)) {
        return std::string(name);
    }
    auto key = squash(name);
    if (key == "TfSat" || key == "Tfsat") {
        return "Tf_sat";
    }
    for (const auto& p : table) {
        if (squash(p.name) == key) {
            return std::string(p.name);
        }
    }
    return std::nullopt;
}

ParameterSet reference_parameters()
{
    ParameterSet p;
    p.k_TfR1_prod     = 1.7e-13;
    p.k_TfR1_deg      = 2.4e-5;
    p.n_Ft            = 400;
    p.k_IRP_prod      = 8.0e-12;
    p.k_Fe_export     = 300;
    p.theta_IRP_FPN1a = 3.0e-8;
    p.k_IRP_FPN1a     = 5.0e-13;
    p.k_IRP_TfR1      = 1.4e-4;
    p.k_Fe_cons       = 3.0e-4;
    p.k_IRP_Ft        = 7e-11;
    p.k_FPN1a_deg     = 5.0e-6;
    p.k_Fe_input      = 3.0e-2;
    p.k_Ft_prod       = 7e-11;
    p.k_Ft_deg        = 5.0e-3;
    p.k_Fe_IRP        = 1.0e-3;
    p.theta_Fe_IRP    = 1.5e-7;
    p.k_IRP_deg       = 1.4e-5;
    p.k_FPN1a_prod    = 2.5e-12;
    p.theta_IRP_Ft    = 3.0e-8;
    p.n               = 30;
    p.Tf_sat          = 0.3;
    return p;
}

} // namespace ironspec
