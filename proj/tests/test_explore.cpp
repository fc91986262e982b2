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
#include "ironspec/errors.hpp"
#include "ironspec/explore.hpp"
#include "ironspec/steady.hpp"
#include "ironspec/stl.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace ironspec;

namespace
{

const FormulaLibrary& iron_spec()
{
    static const auto lib = build_iron_spec(published_variable_bounds());
    return lib;
}

FormulaPtr phi_all()
{
    return iron_spec().get("phi_all");
}

bool contains(const std::vector<std::string>& names, const std::string& name)
{
    return std::find(names.begin(), names.end(), name) != names.end();
}

/// Parameter-only formulas need a trace to evaluate against; any will do.
Trace constant_trace()
{
    return Trace({"Fe", "TfR1", "FPN1a", "Ft", "IRP"}, {0.0, 1.0}, {{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}});
}

} // namespace

TEST(Pinning, DerivedFerritinRepression)
{
    auto p      = reference_parameters();
    p.k_Ft_prod = 7e-11;
    EXPECT_NEAR(pin_parameters(p).k_IRP_Ft, 6.79e-11, 1e-24);
}

TEST(Pinning, SwapsFerroportinRates)
{
    auto p         = reference_parameters();
    p.k_FPN1a_prod = 1e-13;
    p.k_IRP_FPN1a  = 5e-13;
    const auto q   = pin_parameters(p);
    EXPECT_EQ(q.k_FPN1a_prod, 5e-13);
    EXPECT_EQ(q.k_IRP_FPN1a, 1e-13);
}

TEST(Pinning, IdempotentAndSatisfiesOrderingConjuncts)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> decade(-1, 1);
    const auto trace = constant_trace();
    for (int n = 0; n < 200; ++n) {
        auto p = reference_parameters();
        for (const char* name : {"k_Ft_prod", "k_FPN1a_prod", "k_IRP_FPN1a", "k_IRP_Ft"}) {
            p.set(name, *p.get(name) * std::pow(10.0, decade(rng)));
        }
        const auto q = pin_parameters(p);
        EXPECT_EQ(pin_parameters(q), q);
        EvalEnvironment env(trace, parameter_bindings(q));
        for (const char* name : {"phi_P1", "phi_P2", "phi_P3"}) {
            EXPECT_TRUE(eval_bool(*iron_spec().get(name), env)) << name;
        }
    }
}

TEST(Pinning, FreeParametersExcludeDerivedRate)
{
    const auto free = free_parameters();
    EXPECT_FALSE(contains(free, "k_IRP_Ft"));
    EXPECT_TRUE(contains(free, "k_Fe_cons"));
}

TEST(CutoffExperiment, PlateauThenFerritinExhaustsFirst)
{
    const auto p  = pin_parameters(reference_parameters());
    const auto tr = run_experiment(p);
    const auto s  = summarize_cutoff(tr, 6 * seconds_per_hour, 0.01, ferritin_floor(p));
    EXPECT_GE(s.plateau_duration, 10 * seconds_per_hour);
    EXPECT_GT(s.plateau_start, 6 * seconds_per_hour);
    ASSERT_FALSE(std::isnan(s.ft_exhaustion_time));
    ASSERT_FALSE(std::isnan(s.fe_exhaustion_time));
    EXPECT_LT(s.ft_exhaustion_time, s.fe_exhaustion_time);
    EXPECT_LT(s.final_state[Species::Fe], s.reference_fe);
}

TEST(CutoffExperiment, FerritinFloor)
{
    auto p = reference_parameters();
    EXPECT_EQ(ferritin_floor(p), 0.0);
    p = pin_parameters(p);
    EXPECT_NEAR(ferritin_floor(p), 0.03 * 7e-11 / 5e-3, 1e-22);
}

TEST(InitialSearch, SatisfiedSeedIsReturnedUnchanged)
{
    const auto sys = build_iron_constraints(0.3);
    const auto p0  = reference_parameters();
    EXPECT_EQ(find_initial_params(sys.box, published_variable_bounds(), p0), p0);
}

TEST(InitialSearch, FindsSteadyStateInsideTargets)
{
    const auto sys     = build_iron_constraints(0.3);
    const auto targets = published_variable_bounds();
    const auto p       = find_initial_params(sys.box, targets);
    const auto ss      = steady_state(p, 0.3);
    EXPECT_TRUE(ss.regime_consistent);
    for (std::size_t i = 0; i < num_species; ++i) {
        EXPECT_TRUE(targets[species_names[i]].contains(ss.state[i])) << species_names[i];
    }
    for (const auto& info : parameter_table()) {
        if (sys.box.contains(info.name)) {
            EXPECT_TRUE(sys.box[info.name].contains(p.*info.member)) << info.name;
        }
    }
}

TEST(InitialSearch, UnreachableTargetIsReported)
{
    // IRP = k_IRP_prod / (k_IRP_deg + k_Fe_IRP) stays far below 3e-9 with this production ceiling.
    auto bounds = build_iron_constraints(0.3).box;
    bounds.set("k_IRP_prod", {1e-18, 1e-17});
    SearchOptions opt;
    opt.max_attempts = 50;
    try {
        find_initial_params(bounds, published_variable_bounds(), opt);
        FAIL() << "expected NoValidPointError";
    }
    catch (const NoValidPointError& e) {
        EXPECT_FALSE(e.search_trace.empty());
    }
}

TEST(Sensitivity, EntriesAndStepInvariance)
{
    SensitivityOptions opt;
    opt.parameters = {"k_Fe_cons", "k_IRP_TfR1"};
    const auto p0  = reference_parameters();
    const auto rep = sensitivity(p0, opt);
    ASSERT_EQ(rep.variables.size(), num_species);
    ASSERT_EQ(rep.parameters.size(), 2u);
    for (std::size_t v = 0; v < rep.variables.size(); ++v) {
        for (std::size_t k = 0; k < rep.parameters.size(); ++k) {
            EXPECT_TRUE(std::isfinite(rep.peak[v][k]));
            EXPECT_GE(rep.peak[v][k], 0.0);
            EXPECT_LE(rep.mean[v][k], rep.peak[v][k]);
        }
    }
    // No structural path from k_IRP_TfR1 to FPN1a.
    EXPECT_LT(rep.entry("FPN1a", "k_IRP_TfR1"), 0.01);
    opt.rel_step    = 0.005;
    const auto half = sensitivity(p0, opt);
    const double a = rep.entry("Fe", "k_Fe_cons"), b = half.entry("Fe", "k_Fe_cons");
    EXPECT_NEAR(b / a, 1.0, 0.2);
    const auto agg = rep.aggregate();
    EXPECT_GE(agg[0], a);
    std::ostringstream os;
    rep.write_csv(os);
    EXPECT_NE(os.str().find("k_Fe_cons"), std::string::npos);
}

TEST(Validation, DegenerateBoxAtReference)
{
    const auto p0 = pin_parameters(reference_parameters());
    const auto box = relative_box(p0, free_parameters(), std::vector<double>(free_parameters().size(), 0.0));
    ValidationOptions opt;
    opt.samples = 20;
    const auto rep = validate_box(box, p0, phi_all(), opt);
    EXPECT_EQ(rep.samples, 20u);
    EXPECT_EQ(rep.satisfied_fraction(), 1.0);
}

TEST(Validation, SamplesAreDeterministicAndPinned)
{
    const auto p0  = reference_parameters();
    const auto box = relative_box(p0, {"k_Ft_prod", "k_FPN1a_prod", "k_IRP_FPN1a"}, {0.5, 0.5, 0.9});
    for (std::size_t i = 0; i < 50; ++i) {
        const auto a = sample_point(box, p0, 7, i);
        EXPECT_EQ(a, sample_point(box, p0, 7, i));
        EXPECT_EQ(a, pin_parameters(a));
        EXPECT_TRUE(box["k_Ft_prod"].contains(a.k_Ft_prod));
        EXPECT_EQ(a.k_Fe_cons, p0.k_Fe_cons);
    }
    EXPECT_NE(sample_point(box, p0, 7, 0), sample_point(box, p0, 8, 0));
}

TEST(Validation, ThreadCountDoesNotChangeResults)
{
    const auto p0  = reference_parameters();
    const auto box = relative_box(p0, {"k_Fe_export", "k_Fe_cons"}, {0.8, 0.3});
    ValidationOptions opt;
    opt.samples = 24;
    opt.seed    = 5;
    opt.threads = 1;
    const auto a = validate_box(box, p0, phi_all(), opt);
    opt.threads  = 4;
    const auto b = validate_box(box, p0, phi_all(), opt);
    EXPECT_EQ(a.valid, b.valid);
    ASSERT_EQ(a.counterexamples.size(), b.counterexamples.size());
    for (std::size_t i = 0; i < a.counterexamples.size(); ++i) {
        EXPECT_EQ(a.counterexamples[i].index, b.counterexamples[i].index);
        EXPECT_EQ(a.counterexamples[i].params, b.counterexamples[i].params);
        EXPECT_EQ(a.counterexamples[i].failing, b.counterexamples[i].failing);
        EXPECT_EQ(a.counterexamples[i].robustness, b.counterexamples[i].robustness);
    }
}

TEST(Validation, ExportBeyondConsumptionNamesTheRateConjunct)
{
    // k_Fe_cons = 3e-4 and FPN1a = 5e-7: the rate ordering breaks for k_Fe_export > 600.
    const auto p0 = reference_parameters();
    Box box;
    box.set("k_Fe_export", {300, 2400});
    ValidationOptions opt;
    opt.samples = 30;
    opt.seed    = 3;
    const auto rep = validate_box(box, p0, phi_all(), opt);
    EXPECT_LT(rep.satisfied_fraction(), 1.0);
    ASSERT_FALSE(rep.counterexamples.empty());
    bool named = false;
    for (const auto& ce : rep.counterexamples) {
        named = named || contains(ce.failing, "phi_S14");
        // Replay: the standalone check fails the same conjuncts.
        const auto again = check_point(ce.params, phi_all());
        EXPECT_FALSE(again.satisfied);
        EXPECT_EQ(again.failing, ce.failing);
        EXPECT_EQ(again.robustness, ce.robustness);
    }
    EXPECT_TRUE(named);
}

TEST(Validation, RejectsPinnedAndUnknownDimensions)
{
    const auto p0 = reference_parameters();
    Box pinned;
    pinned.set("k_IRP_Ft", {1e-11, 1e-10});
    EXPECT_THROW(validate_box(pinned, p0, phi_all()), DomainError);
    Box unknown;
    unknown.set("k_bogus", {0, 1});
    EXPECT_THROW(validate_box(unknown, p0, phi_all()), ConfigError);
}

TEST(Expansion, RelatedParametersOfRateConjunct)
{
    const auto related = related_parameters(*iron_spec().get("phi_S14"));
    EXPECT_TRUE(contains(related, "k_Fe_export"));
    EXPECT_TRUE(contains(related, "k_Fe_cons"));
    EXPECT_TRUE(contains(related, "k_FPN1a_prod"));
    EXPECT_FALSE(contains(related, "k_TfR1_prod"));
    EXPECT_TRUE(related_parameters(*iron_spec().get("phi_S1")).empty());
}

TEST(Expansion, ZeroRoundsGiveTheCentre)
{
    const auto p0 = reference_parameters();
    SensitivityReport sens;
    ExpansionOptions opt;
    opt.max_rounds        = 0;
    opt.samples_per_round = 8;
    const auto region     = expand_box(p0, phi_all(), sens, opt);
    EXPECT_EQ(region.rounds, 0u);
    EXPECT_EQ(region.mean_half_width(), 0.0);
    for (std::size_t i = 0; i < region.box.size(); ++i) {
        EXPECT_EQ(region.box[i].width(), 0.0) << region.box.name(i);
    }
    EXPECT_EQ(region.validation.satisfied_fraction(), 1.0);
}

TEST(Expansion, FailingCentreIsRejected)
{
    auto p       = reference_parameters();
    p.k_Fe_input = 0;
    EXPECT_THROW(expand_box(p, phi_all(), SensitivityReport{}), DomainError);
}

TEST(Expansion, ShortRunIsSoundAndContainsCentre)
{
    const auto p0 = pin_parameters(reference_parameters());
    ExpansionOptions opt;
    opt.max_rounds        = 3;
    opt.samples_per_round = 16;
    opt.growth            = 2.0;
    opt.seed              = 9;
    const auto region     = expand_box(p0, phi_all(), SensitivityReport{}, opt);
    EXPECT_EQ(region.validation.satisfied_fraction(), 1.0);
    EXPECT_EQ(region.validation.samples, 16u);
    for (std::size_t i = 0; i < region.dimensions.size(); ++i) {
        const auto& name = region.dimensions[i];
        EXPECT_TRUE(region.box[name].contains(*p0.get(name))) << name;
        EXPECT_GE(region.half_widths[i], 0.0);
        EXPECT_LE(region.half_widths[i], opt.max_half_width);
    }
}

TEST(Expansion, ConfirmationShrinksTheBlamedDimension)
{
    // One sample per round lets the box outgrow the region where consumption
    // exceeds export (k_Fe_cons above half its centre value); the confirmation
    // run must pull k_Fe_cons back inside it.
    const auto p0 = pin_parameters(reference_parameters());
    ExpansionOptions opt;
    opt.parameters        = {"k_Fe_cons", "k_Ft_deg"};
    opt.max_rounds        = 3;
    opt.samples_per_round = 1;
    opt.final_samples     = 32;
    opt.growth            = 30.0;
    opt.seed              = 4;
    const auto region     = expand_box(p0, phi_all(), SensitivityReport{}, opt);
    EXPECT_EQ(region.validation.satisfied_fraction(), 1.0);
    EXPECT_EQ(region.validation.samples, 32u);
    EXPECT_LT(region.half_widths[0], 0.5);
    EXPECT_TRUE(region.frozen[0]);
    const auto check = validate_box(region.box, p0, phi_all(), {64, 5});
    EXPECT_EQ(check.satisfied_fraction(), 1.0);
}
