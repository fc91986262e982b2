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
#include "interval_random.hpp"

#include "ironspec/errors.hpp"
#include "ironspec/interval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace ironspec;

namespace
{

Box box2(Interval x, Interval y)
{
    Box b;
    b.set("x", x);
    b.set("y", y);
    return b;
}

} // namespace

TEST(IntervalArithmetic, BasicOperations)
{
    const Interval a{1, 2}, b{3, 4}, c{-1, 2};
    EXPECT_TRUE((a + b).contains(Interval{4, 6}));
    EXPECT_TRUE((a - b).contains(Interval{-3, -1}));
    EXPECT_TRUE((a * c).contains(Interval{-2, 4}));
    EXPECT_TRUE((b / a).contains(Interval{1.5, 4}));
    EXPECT_TRUE((-c).contains(Interval{-2, 1}));
    EXPECT_EQ(abs(c), (Interval{0, 2}));
    EXPECT_EQ(intersect(a, b), Interval::empty());
    EXPECT_EQ(hull(a, b), (Interval{1, 4}));
    // Division by an interval containing zero loses all information.
    const auto q = Interval{1, 2} / Interval{-1, 1};
    EXPECT_TRUE(std::isinf(q.lo) && std::isinf(q.hi));
}

TEST(IntervalArithmetic, OutwardRounding)
{
    // 0.1 + 0.2 is not representable; the enclosure must straddle the rounded sum.
    const auto s = Interval::point(0.1) + Interval::point(0.2);
    EXPECT_LE(s.lo, 0.1 + 0.2);
    EXPECT_GE(s.hi, 0.1 + 0.2);
    EXPECT_LT(s.lo, s.hi);
    const auto p = Interval::point(1.0 / 3.0) * Interval::point(3.0);
    EXPECT_TRUE(p.contains(1.0));
    // Exact operations stay degenerate.
    EXPECT_EQ(Interval::point(2.0) * Interval::point(4.0), Interval::point(8.0));
}

TEST(IntervalArithmetic, InclusionOnRandomPoints)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int n = 0; n < 2000; ++n) {
        double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
        const Interval a{std::min(a0, a1), std::max(a0, a1)}, b{std::min(b0, b1), std::max(b0, b1)};
        const double x = std::uniform_real_distribution<double>(a.lo, a.hi)(rng);
        const double y = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
        EXPECT_TRUE((a + b).contains(x + y));
        EXPECT_TRUE((a - b).contains(x - y));
        EXPECT_TRUE((a * b).contains(x * y));
        if (y != 0) {
            EXPECT_TRUE((a / b).contains(x / y));
        }
        EXPECT_TRUE(abs(a).contains(std::fabs(x)));
    }
}

TEST(Constraints, ParseAndPrint)
{
    const auto cs = parse_constraints("# header\nx + y = 2\n\nx*y <= 3*z\nabs(x - 1) >= 0.5\n");
    ASSERT_EQ(cs.size(), 3u);
    EXPECT_EQ(cs[1].relation, Relation::Le);
    for (const auto& c : cs) {
        const auto again = parse_constraint(to_string(c));
        EXPECT_EQ(to_string(again), to_string(c));
    }
    EXPECT_THROW(parse_constraints("x + = 2"), ParseError);
    EXPECT_THROW(parse_constraints("x[t] > 2"), ParseError);
}

TEST(Constraints, BoxFileRoundTrip)
{
    const auto b = parse_box("# box\nx 0 1\ny -inf 2.5\nz 1e-13 inf\n");
    ASSERT_EQ(b.size(), 3u);
    EXPECT_TRUE(std::isinf(b["y"].lo));
    EXPECT_TRUE(std::isinf(b["z"].hi));
    std::ostringstream os;
    write_box(os, b);
    const auto again = parse_box(os.str());
    for (std::size_t i = 0; i < b.size(); ++i) {
        EXPECT_EQ(again[i], b[i]) << b.name(i);
    }
    EXPECT_THROW(parse_box("x 2 1\n"), ParseError);
    EXPECT_THROW(parse_box("x 1\n"), ParseError);
}

TEST(Hc4, LinearProjectionIsExact)
{
    // x + y = 2 over [0, 3] x [0, 5]: exact projections are [0, 2] for both.
    const auto c = parse_constraint("x + y = 2");
    const auto r = propagate({c}, box2({0, 3}, {0, 5}));
    EXPECT_NEAR(r["x"].lo, 0.0, 1e-15);
    EXPECT_NEAR(r["x"].hi, 2.0, 1e-15);
    EXPECT_NEAR(r["y"].lo, 0.0, 1e-15);
    EXPECT_NEAR(r["y"].hi, 2.0, 1e-15);
}

TEST(Hc4, GridOracleOnProductCurve)
{
    // x * y = 1 over [0.25, 3] x [0.5, 5]: the curve projects to x in [0.25, 2], y in [0.5, 4].
    const auto c = parse_constraint("x*y = 1");
    const auto r = propagate({c}, box2({0.25, 3}, {0.5, 5}));
    const auto h = interval_random::grid_hull({c}, box2({0.25, 3}, {0.5, 5}), 400);
    EXPECT_TRUE(interval_random::contains_with_slack(r, h, 1e-12));
    EXPECT_NEAR(r["x"].hi, 2.0, 1e-12);
    EXPECT_NEAR(r["y"].hi, 4.0, 1e-12);
    EXPECT_NEAR(r["x"].lo, 0.25, 1e-12);
    EXPECT_NEAR(r["y"].lo, 0.5, 1e-12);
}

TEST(Hc4, CoupledSystemConvergesToSolution)
{
    // x + y = 2 and x * y = 1 meet only at (1, 1).
    const auto cs = parse_constraints("x + y = 2\nx*y = 1\n");
    const auto r  = propagate(cs, box2({0.5, 3}, {0, 5}), {1e-9});
    EXPECT_TRUE(r["x"].contains(1.0));
    EXPECT_TRUE(r["y"].contains(1.0));
    EXPECT_LT(r["x"].width(), 0.6);
}

TEST(Hc4, ContradictionEmptiesTheBox)
{
    EXPECT_THROW(propagate(parse_constraints("1 = 0\n"), box2({0, 1}, {0, 1})), InfeasibleError);
    EXPECT_THROW(propagate(parse_constraints("x + y >= 10\n"), box2({0, 1}, {0, 1})), InfeasibleError);
}

TEST(Propagation, RandomSystemsAgainstGridOracle)
{
    std::mt19937_64 rng(17);
    for (int n = 0; n < 200; ++n) {
        const auto sys = interval_random::random_inequality_system(rng);
        Box out;
        const auto hull = interval_random::grid_hull(sys.constraints, sys.box, 120);
        try {
            out = propagate(sys.constraints, sys.box);
        }
        catch (const InfeasibleError&) {
            EXPECT_TRUE(hull.is_empty()) << interval_random::describe(sys);
            continue;
        }
        EXPECT_TRUE(sys.box.contains_box(out));
        if (!hull.is_empty()) {
            EXPECT_TRUE(interval_random::contains_with_slack(out, hull, 1e-12)) << interval_random::describe(sys);
        }
    }
}

TEST(Propagation, FeasiblePointsAreNeverExcluded)
{
    std::mt19937_64 rng(23);
    int checked = 0;
    for (int n = 0; n < 100; ++n) {
        const auto sys    = interval_random::random_system_through_points(rng, 10);
        const auto result = propagate(sys.constraints, sys.box);
        EXPECT_TRUE(sys.box.contains_box(result));
        for (const auto& p : sys.points) {
            EXPECT_TRUE(result.contains_point(p)) << interval_random::describe(sys);
            ++checked;
        }
    }
    EXPECT_GE(checked, 1000);
}

TEST(Propagation, MonotoneInTheBox)
{
    std::mt19937_64 rng(31);
    for (int n = 0; n < 100; ++n) {
        const auto sys   = interval_random::random_system_through_points(rng, 1);
        const auto inner = interval_random::random_sub_box(rng, sys.box);
        Box big, small;
        bool small_empty = false;
        big = propagate(sys.constraints, sys.box);
        try {
            small = propagate(sys.constraints, inner);
        }
        catch (const InfeasibleError&) {
            small_empty = true;
        }
        if (!small_empty) {
            EXPECT_TRUE(big.contains_box(small)) << interval_random::describe(sys);
        }
    }
}

TEST(Propagation, IdempotentAtFixpoint)
{
    std::mt19937_64 rng(41);
    const PropagationOptions opt;
    for (int n = 0; n < 100; ++n) {
        const auto sys  = interval_random::random_system_through_points(rng, 1);
        const auto once = propagate(sys.constraints, sys.box, opt);
        const auto twice = propagate(sys.constraints, once, opt);
        for (std::size_t i = 0; i < once.size(); ++i) {
            EXPECT_GE(twice[i].width(), (1 - opt.eps_improve) * once[i].width()) << once.name(i);
        }
    }
}

TEST(IronSystem, PublishedRangesAndPins)
{
    const auto sys = build_iron_constraints(0.3);
    EXPECT_EQ(sys.box["k_TfR1_prod"], (Interval{1e-13, 2e-13}));
    EXPECT_EQ(sys.box["n_Ft"], (Interval{0, 4500}));
    EXPECT_EQ(sys.box["Tf_sat"], Interval::point(0.3));
    EXPECT_EQ(sys.box["k_Ft_prod"], (Interval{1e-18, 1e-10}));
}

TEST(IronSystem, SampledSteadyStatesSurviveContraction)
{
    const auto sys = build_iron_constraints(0.3);
    const auto out = propagate(sys.constraints, sys.box);
    EXPECT_TRUE(sys.box.contains_box(out));
    std::mt19937_64 rng(3);
    const auto points = interval_random::iron_feasible_points(rng, sys, 1000);
    ASSERT_EQ(points.size(), 1000u);
    for (const auto& p : points) {
        ASSERT_TRUE(out.contains_point(p));
    }
    EXPECT_TRUE(out.contains_point(interval_random::iron_point(reference_parameters())));
}

TEST(IronSystem, PublishedDeductions)
{
    const auto sys   = build_iron_constraints(0.3);
    const auto out   = propagate(sys.constraints, sys.box);
    const auto match = match_deductions(sys.box, out);
    ASSERT_EQ(match.size(), 8u);
    int matched = 0;
    for (const auto& m : match) {
        matched += m.matched ? 1 : 0;
    }
    EXPECT_GE(matched, 6);
}
