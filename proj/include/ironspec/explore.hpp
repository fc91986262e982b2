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

#include "ironspec/interval.hpp"
#include "ironspec/odesim.hpp"
#include "ironspec/parameters.hpp"
#include "ironspec/stl.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ironspec
{

/// Sets k_IRP_Ft to 0.97 k_Ft_prod and orders k_IRP_FPN1a <= k_FPN1a_prod by swapping.
ParameterSet pin_parameters(ParameterSet params);

/// Kinetic parameters that are sampled and expanded; k_IRP_Ft is derived by pinning.
std::vector<std::string> free_parameters();

/// Iron-cutoff experiment: start at the closed-form steady state, drop Tf_sat at `cutoff_time`.
struct Experiment {
    double tf_sat      = 0.3;
    double cutoff_time = 6 * seconds_per_hour;
    double horizon     = 48 * seconds_per_hour;
    SimulationOptions simulation{};
    /// When non-empty, replaces the single cutoff switch.
    std::vector<InputSchedule::Switch> switches;

    InputSchedule schedule() const;
};

Trace run_experiment(const ParameterSet& params, const Experiment& experiment = {});

/// A variable counts as exhausted below this fraction of its level at the cutoff.
inline constexpr double exhaustion_fraction = 1e-3;

struct CutoffSummary {
    double cutoff_time    = 0;
    /// Fe at 4 h; the plateau must stay above plateau_factor times this level.
    double reference_fe   = 0;
    double max_fe         = 0;
    /// Longest run after the cutoff with |dFe/dt| / Fe < 1e-4 /s above the floor; NaN bounds if none.
    double plateau_start    = 0;
    double plateau_end      = 0;
    double plateau_duration = 0;
    /// First time after the cutoff within exhaustion_fraction of the depleted level; NaN if never.
    double ft_exhaustion_time = 0;
    double fe_exhaustion_time = 0;
    StateVector final_state{};
};

/// Ft level under full IRP repression, where ferritin turnover no longer releases iron.
double ferritin_floor(const ParameterSet& params);

/**
 * Plateau and exhaustion times of a cutoff trace. Fe is exhausted near zero,
 * Ft near `ft_floor` (see ferritin_floor), both measured against the drop
 * from their level at the cutoff.
 */
CutoffSummary summarize_cutoff(const Trace& trace, double cutoff_time, double plateau_factor = 0.01,
                               double ft_floor = 0.0);

// --------------------------------------------------------------------------

struct SearchOptions {
    std::vector<Species> order{Species::IRP, Species::TfR1, Species::FPN1a, Species::Fe, Species::Ft};
    double tf_sat              = 0.3;
    std::size_t max_attempts   = 200;
};

/// Parameters adjusted to place one steady-state variable in its target range.
std::vector<std::string> tuning_group(Species variable);

/**
 * Ordered tuning of the closed-form steady state. Variables are placed in
 * `options.order` by moving only their own parameter group inside `bounds`;
 * when a variable cannot be placed the search steps back and retries the
 * previous one with a different aim point. Starts from `seed`; a seed whose
 * steady state already meets every target is returned unchanged. Throws
 * NoValidPointError with the search trace if the attempt budget runs out.
 */
ParameterSet find_initial_params(const Box& bounds, const Box& targets, const ParameterSet& seed,
                                 const SearchOptions& options = {});

/// Same, seeded with the centre of `bounds` (geometric for ranges spanning decades).
ParameterSet find_initial_params(const Box& bounds, const Box& targets, const SearchOptions& options = {});

// --------------------------------------------------------------------------

struct SensitivityOptions {
    double window_start = 3 * seconds_per_hour;
    double window_end   = 20 * seconds_per_hour;
    double rel_step     = 0.01;
    /// Empty means every kinetic parameter.
    std::vector<std::string> parameters;
    Experiment experiment{};
};

/**
 * Normalized finite-difference sensitivities |dv/v| / rel_step on the
 * reporting grid inside the window. `peak` holds the maximum over time,
 * `mean` the time average.
 */
struct SensitivityReport {
    std::vector<std::string> variables;
    std::vector<std::string> parameters;
    std::vector<std::vector<double>> peak; // [variable][parameter]
    std::vector<std::vector<double>> mean; // [variable][parameter]
    /// Parameters whose perturbed simulation failed; their entries are NaN.
    std::vector<bool> failed;
    double window_start = 0;
    double window_end   = 0;
    double rel_step     = 0;

    double entry(std::string_view variable, std::string_view parameter) const;
    double mean_entry(std::string_view variable, std::string_view parameter) const;
    /// Per parameter: the largest peak sensitivity over the five variables.
    std::vector<double> aggregate() const;

    /// CSV with one row per variable and one column per parameter.
    void write_csv(std::ostream& os) const;
};

SensitivityReport sensitivity(const ParameterSet& params, const SensitivityOptions& options = {});

// --------------------------------------------------------------------------

struct SampleOutcome {
    bool satisfied = false;
    double robustness = 0;
    std::vector<std::string> failing;
    /// Non-empty when the steady state or the simulation failed.
    std::string error;
};

/// Pins `params`, simulates the experiment and monitors `spec` at t = 0.
SampleOutcome check_point(const ParameterSet& params, const FormulaPtr& spec, const Experiment& experiment = {});

struct Counterexample {
    std::size_t index = 0;
    ParameterSet params;
    std::vector<std::string> failing;
    double robustness = 0;
    std::string error;
};

struct ValidationReport {
    std::size_t samples = 0;
    std::size_t valid   = 0;
    std::uint64_t seed  = 0;
    std::vector<Counterexample> counterexamples;

    double satisfied_fraction() const
    {
        return samples == 0 ? 1.0 : static_cast<double>(valid) / static_cast<double>(samples);
    }
};

struct ValidationOptions {
    std::size_t samples = 500;
    std::uint64_t seed  = 1;
    std::size_t max_counterexamples = 25;
    /// 0 uses std::thread::hardware_concurrency().
    unsigned threads = 0;
    Experiment experiment{};
};

/// Sample `index` of a validation run: uniform in `box`, centre values elsewhere, then pinned.
ParameterSet sample_point(const Box& box, const ParameterSet& center, std::uint64_t seed, std::size_t index);

/**
 * Monte-Carlo check of `spec` over `box`. Every sample draws from its own
 * generator derived from (seed, index), so results do not depend on the
 * thread count.
 */
ValidationReport validate_box(const Box& box, const ParameterSet& center, const FormulaPtr& spec,
                              const ValidationOptions& options = {});

// --------------------------------------------------------------------------

struct ExpansionOptions {
    std::size_t samples_per_round = 500;
    /// Sample count of the confirmation run on the final box; 0 reuses samples_per_round.
    std::size_t final_samples = 0;
    std::size_t max_rounds    = 40;
    std::uint64_t seed        = 1;
    double initial_half_width = 0.05;
    /// Growth factor per round is 1 + growth / (1 + normalized sensitivity).
    double growth          = 0.1;
    double max_half_width  = 0.95;
    unsigned threads       = 0;
    std::vector<std::string> parameters; // empty: free_parameters()
    Experiment experiment{};
};

struct RobustRegion {
    ParameterSet center;
    std::vector<std::string> dimensions;
    std::vector<double> half_widths; // relative to the centre value
    std::vector<bool> frozen;
    Box box;
    ValidationReport validation;
    std::size_t rounds = 0;

    double mean_half_width() const;
};

/// Relative box around `center` with the given half-widths.
Box relative_box(const ParameterSet& center, const std::vector<std::string>& dimensions,
                 const std::vector<double>& half_widths);

/// Parameters that can move the named conjunct of the iron specification.
std::vector<std::string> related_parameters(const StlFormula& conjunct);

/**
 * Grows a box around `center` while every sampled parameter set satisfies
 * `spec`. Dimensions grow faster when their sensitivity is low. A failed
 * round restores the last valid box and freezes the dimensions blamed for
 * the counterexamples: grown dimensions of a failing conjunct whose reset to
 * the centre repairs the sample. A confirmation run with final_samples
 * follows; while it finds counterexamples, blamed dimensions shrink by a
 * growth step. Once it passes, the shrunk dimensions give up one more step
 * as a margin. The returned box has passed the last confirmation run.
 */
RobustRegion expand_box(const ParameterSet& center, const FormulaPtr& spec, const SensitivityReport& sens,
                        const ExpansionOptions& options = {});

} // namespace ironspec
