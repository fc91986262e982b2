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

#include "ironspec/expr.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ironspec
{

/// Closed interval over the extended reals. The empty interval has lo = +inf, hi = -inf.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    Interval() = default;
    Interval(double lo, double hi)
        : lo(lo)
        , hi(hi)
    {
    }

    static Interval empty()
    {
        return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    static Interval whole()
    {
        return {};
    }
    static Interval point(double v)
    {
        return {v, v};
    }

    bool is_empty() const
    {
        return !(lo <= hi);
    }
    bool contains(double x) const
    {
        return lo <= x && x <= hi;
    }
    bool contains(const Interval& other) const
    {
        return other.is_empty() || (lo <= other.lo && other.hi <= hi);
    }
    double width() const
    {
        return is_empty() ? 0.0 : hi - lo;
    }
    double mid() const;

    bool operator==(const Interval& o) const
    {
        return (is_empty() && o.is_empty()) || (lo == o.lo && hi == o.hi);
    }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// A divisor containing zero yields the hull of both half quotients, usually the whole line.
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval abs(const Interval& a);
Interval intersect(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);

std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Named axis-aligned box. Dimension order is insertion order.
class Box
{
public:
    Box() = default;

    /// Adds a dimension or overwrites an existing one; returns its index.
    std::size_t set(const std::string& name, Interval x);

    bool contains(std::string_view name) const
    {
        return index_of(name).has_value();
    }
    std::optional<std::size_t> index_of(std::string_view name) const;

    const Interval& operator[](std::string_view name) const;
    const Interval& operator[](std::size_t i) const
    {
        return m_intervals[i];
    }
    Interval& operator[](std::size_t i)
    {
        return m_intervals[i];
    }

    std::size_t size() const
    {
        return m_names.size();
    }
    const std::string& name(std::size_t i) const
    {
        return m_names[i];
    }
    const std::vector<std::string>& names() const
    {
        return m_names;
    }

    bool is_empty() const;
    /// Dimensionwise inclusion; dimensions missing from `other` are unconstrained.
    bool contains_box(const Box& other) const;
    bool contains_point(const std::unordered_map<std::string, double>& point) const;

private:
    std::vector<std::string> m_names;
    std::vector<Interval> m_intervals;
    std::unordered_map<std::string, std::size_t> m_index;
};

/// Parses `name lo hi` lines (blank lines and `#` comments ignored; `inf`, `-inf` accepted).
Box parse_box(std::string_view text);
void write_box(std::ostream& os, const Box& box);

enum class Relation
{
    Eq,
    Le,
    Ge,
};

struct Constraint {
    ExprPtr lhs;
    Relation relation = Relation::Eq;
    ExprPtr rhs;
};

Constraint parse_constraint(std::string_view text, int line = 1);
/// One constraint per line; blank lines and `#` comments ignored.
std::vector<Constraint> parse_constraints(std::string_view text);
std::string to_string(const Constraint& c);

/// Natural interval extension of an expression over the box.
Interval evaluate(const Expr& e, const Box& box);

/**
 * Forward evaluation and backward projection of one constraint. The result
 * is a sub-box that keeps every point of `box` satisfying `c`; an empty
 * dimension means `c` has no solution in `box`.
 */
Box hc4_revise(const Constraint& c, const Box& box);

struct PropagationOptions {
    double eps_improve = 1e-3;
    /// Optional shaving depth: each bound is probed by bisection up to this depth.
    int shave_depth                = 0;
    std::size_t max_revisions      = 2'000'000;
};

/// AC-3 worklist fixpoint of hc4_revise. Throws InfeasibleError if the box empties.
Box propagate(const std::vector<Constraint>& constraints, const Box& box, const PropagationOptions& options = {});

struct ConstraintSystem {
    std::vector<Constraint> constraints;
    Box box;
};

/**
 * Steady-state equations of the iron model and literature ranges, as
 * constraints over the kinetic parameters, Tf_sat and the five
 * steady-state concentrations.
 */
ConstraintSystem build_iron_constraints(double tf_sat = 0.3);

/// A published bound deduced by propagation on the iron system.
struct Deduction {
    std::string name;
    bool lower; // true: lower bound raised, false: upper bound lowered
    double value;
};

const std::vector<Deduction>& published_deductions();

struct DeductionMatch {
    Deduction deduction;
    Interval before;
    Interval after;
    /// Moved in the stated direction and within one decade of the published value.
    bool matched = false;
};

std::vector<DeductionMatch> match_deductions(const Box& before, const Box& after);

} // namespace ironspec
