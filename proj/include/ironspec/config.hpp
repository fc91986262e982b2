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

#include "ironspec/explore.hpp"
#include "ironspec/interval.hpp"
#include "ironspec/odesim.hpp"
#include "ironspec/parameters.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ironspec
{

/// Exponents of (mol, L, s) carried by a unit.
struct Dimension {
    int mol    = 0;
    int litre  = 0;
    int second = 0;

    bool operator==(const Dimension&) const = default;
};

struct Quantity {
    double value = 0; // in mol, L, s
    Dimension dimension;
};

/**
 * Parses "7e-6 nmol/L/h", "6 h", "0.3" and similar. Units are products and
 * quotients of mol, mmol, umol, nmol, pmol, M, mM, uM, nM, pM, L, mL, s, min,
 * h, d and the literal 1. Throws ConfigError on unknown units.
 */
Quantity parse_quantity(std::string_view text);

/// Dimension of the canonical unit string used in ParameterSet ("mol/L/s", "1/s", ...).
Dimension unit_dimension(std::string_view unit);

struct ExplorationSettings {
    std::uint64_t seed         = 1;
    std::size_t samples        = 500;
    std::size_t final_samples  = 0;
    std::size_t rounds         = 40;
    double window_start        = 3 * seconds_per_hour;
    double window_end          = 20 * seconds_per_hour;
    double rel_step            = 0.01;
    double initial_half_width  = 0.05;
    double growth              = 0.1;
    double max_half_width      = 0.95;
    unsigned threads           = 0;
};

struct ProjectConfig {
    /// Point values; `points` names the parameters that were given one.
    ParameterSet parameters;
    std::set<std::string> points;
    /// Intervals of parameters given as a range instead of a value.
    Box bounds;
    /// Optional steady-state target intervals for the ordered tuning.
    Box targets;

    double tf_sat = 0.3;
    std::vector<InputSchedule::Switch> switches;
    double horizon = 48 * seconds_per_hour;
    SimulationOptions simulation{};

    std::filesystem::path formula_file;
    std::string formula = "phi_all";
    double plateau_factor = 0.01;
    std::filesystem::path constraint_file;
    std::filesystem::path box_file;

    ExplorationSettings exploration{};

    /// Canonical JSON text of the configuration after unit conversion.
    std::string canonical;
    /// One line per converted unit string.
    std::vector<std::string> conversions;

    InputSchedule schedule() const;
    Experiment experiment() const;
    /// FNV-1a of `canonical`, as 16 hex digits.
    std::string hash() const;
    /// Recomputes `canonical` after fields were changed in code.
    void update_canonical();
    /// Throws ConfigError naming the first model parameter that has no point value.
    void require_point() const;
};

/**
 * Reads a JSON configuration. Relative file paths resolve against
 * `base_dir`. Parameters missing from both "parameters" and "bounds" keep
 * their reference values.
 */
ProjectConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ProjectConfig load_config(const std::filesystem::path& path);

/// The reference parameter set with the iron-cutoff experiment.
ProjectConfig default_config();

} // namespace ironspec
