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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ironspec
{

/// Species of the iron model, in the row/column order used by Jacobians and traces.
enum class Species : std::size_t
{
    Fe = 0,
    TfR1,
    FPN1a,
    Ft,
    IRP,
};

inline constexpr std::size_t num_species = 5;

inline constexpr std::array<std::string_view, num_species> species_names = {"Fe", "TfR1", "FPN1a", "Ft", "IRP"};

inline constexpr std::size_t index(Species s)
{
    return static_cast<std::size_t>(s);
}

std::optional<Species> species_from_name(std::string_view name);

/// Concentrations (mol/L) of the five species.
struct StateVector : std::array<double, num_species> {
    using std::array<double, num_species>::operator[];

    double& operator[](Species s)
    {
        return (*this)[index(s)];
    }
    double operator[](Species s) const
    {
        return (*this)[index(s)];
    }
};

/**
 * Parameters of the iron homeostasis model in SI-derived units
 * (seconds, mol/L). Field names match the names used in formula
 * and constraint files.
 */
struct ParameterSet {
    // mol/L/s
    double k_TfR1_prod     = 0;
    double k_IRP_prod      = 0;
    double k_Ft_prod       = 0;
    double k_FPN1a_prod    = 0;
    double k_IRP_Ft        = 0;
    double k_IRP_FPN1a     = 0;
    // 1/s
    double k_TfR1_deg      = 0;
    double k_IRP_deg       = 0;
    double k_Ft_deg        = 0;
    double k_FPN1a_deg     = 0;
    double k_Fe_input      = 0;
    double k_Fe_cons       = 0;
    double k_Fe_IRP        = 0;
    double k_IRP_TfR1      = 0;
    // L/mol/s
    double k_Fe_export     = 0;
    // iron atoms per ferritin
    double n_Ft            = 0;
    // mol/L
    double theta_Fe_IRP    = 0;
    double theta_IRP_Ft    = 0;
    double theta_IRP_FPN1a = 0;
    // sigmoid steepness
    double n               = 30;
    // transferrin saturation, the model input
    double Tf_sat          = 0;

    /// Value by canonical name; std::nullopt for unknown names.
    std::optional<double> get(std::string_view name) const;
    /// Returns false for unknown names.
    bool set(std::string_view name, double value);

    bool operator==(const ParameterSet&) const = default;
};

struct ParameterInfo {
    std::string_view name;
    double ParameterSet::*member;
    std::string_view unit;
    /// One of the twenty model parameters (excludes the steepness n).
    bool model_parameter;
};

/// All fields of ParameterSet, in declaration order.
std::span<const ParameterInfo> parameter_table();

/// The nineteen rate/threshold/stoichiometry parameters, excluding Tf_sat and n.
std::span<const std::string_view> kinetic_parameter_names();

/**
 * Maps accepted spellings ("kFe_cons", "k_Fe_cons", "thetaFe_IRP", "nFt",
 * "TfSat", ...) to the canonical field name.
 */
std::optional<std::string> canonical_parameter_name(std::string_view name);

/// The published valid parameter set with Tf_sat = 0.3 (iron-replete input).
ParameterSet reference_parameters();

} // namespace ironspec
