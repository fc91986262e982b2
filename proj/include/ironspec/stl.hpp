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
#include "ironspec/interval.hpp"
#include "ironspec/odesim.hpp"
#include "ironspec/parameters.hpp"

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ironspec
{

enum class StlKind
{
    Predicate,
    And,
    Or,
    Not,
    Ev,
    Alw,
};

enum class Comparison
{
    Lt,
    Le,
    Gt,
    Ge,
};

struct StlFormula;
using FormulaPtr = std::shared_ptr<const StlFormula>;

struct StlFormula {
    StlKind kind = StlKind::Predicate;

    // Predicate
    ExprPtr lhs;
    Comparison cmp = Comparison::Lt;
    ExprPtr rhs;

    // Operands: `left` for Not/Ev/Alw, both for And/Or.
    FormulaPtr left;
    FormulaPtr right;

    // Ev/Alw window
    double lo = 0;
    double hi = std::numeric_limits<double>::infinity();

    /// Name of the library formula this node was substituted from, if any.
    std::string label;

    static FormulaPtr predicate(ExprPtr lhs, Comparison cmp, ExprPtr rhs);
    static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr negation(FormulaPtr f);
    static FormulaPtr eventually(double lo, double hi, FormulaPtr f);
    static FormulaPtr always(double lo, double hi, FormulaPtr f);
    static FormulaPtr labeled(const FormulaPtr& f, std::string label);
};

class FormulaLibrary;

/// Parses one formula. Identifiers naming formulas of `library` are substituted.
FormulaPtr parse_formula(std::string_view text, const FormulaLibrary* library = nullptr, int first_line = 1);

/// Fully parenthesized text that parses back to a structurally equal formula.
std::string to_string(const StlFormula& f);

/// Structural equality ignoring labels.
bool structurally_equal(const StlFormula& a, const StlFormula& b);

/// Time beyond the evaluation point that the formula inspects (infinite for unbounded windows).
double horizon(const StlFormula& f);

/// Named formulas in definition order; later definitions may reference earlier ones.
class FormulaLibrary
{
public:
    /// Parses `text` and stores it under `name`; redefinition is an error.
    void define(const std::string& name, const std::string& text, int line = 1);

    bool contains(std::string_view name) const;
    FormulaPtr get(std::string_view name) const;
    const std::string& text(std::string_view name) const;
    const std::vector<std::string>& names() const
    {
        return m_order;
    }

    /// Reads `name := formula` lines; `#` starts a comment line.
    static FormulaLibrary parse(std::string_view src);
    static FormulaLibrary load(const std::string& path);
    std::string to_text() const;

private:
    struct Entry {
        std::string text;
        FormulaPtr formula;
    };
    std::map<std::string, Entry, std::less<>> m_entries;
    std::vector<std::string> m_order;
};

enum class WindowMode
{
    /// Windows are cut at the end of the trace.
    Truncate,
    /// Evaluation fails if a bounded window reaches past the end of the trace.
    Strict,
};

struct EvalEnvironment {
    const Trace* trace = nullptr;
    std::map<std::string, double, std::less<>> parameters;
    WindowMode window_mode = WindowMode::Truncate;

    EvalEnvironment() = default;
    explicit EvalEnvironment(const Trace& trace, std::map<std::string, double, std::less<>> parameters = {},
                             WindowMode mode = WindowMode::Truncate)
        : trace(&trace)
        , parameters(std::move(parameters))
        , window_mode(mode)
    {
    }
};

/// Name -> value map of the canonical parameter names, for use in formulas.
std::map<std::string, double, std::less<>> parameter_bindings(const ParameterSet& params);

/// Robustness values are clamped to +-huge_robustness; NaN margins count as -huge_robustness.
inline constexpr double huge_robustness = 1e300;

bool eval_bool(const StlFormula& f, const EvalEnvironment& env, double t = 0.0);
double robustness(const StlFormula& f, const EvalEnvironment& env, double t = 0.0);

/// Piecewise-linear robustness signal over [t0, t1].
struct RobustnessSignal {
    std::vector<double> times;
    std::vector<double> values;
    double at(double t) const;
};
RobustnessSignal robustness_signal(const StlFormula& f, const EvalEnvironment& env, double t0, double t1);

struct TimeInterval {
    double lo = 0;
    double hi = 0;
    bool lo_closed = true;
    bool hi_closed = true;

    bool contains(double t) const
    {
        return (lo < t || (lo == t && lo_closed)) && (t < hi || (t == hi && hi_closed));
    }
};

/// Satisfaction set over [t0, t1] as disjoint, ordered intervals.
std::vector<TimeInterval> satisfaction_set(const StlFormula& f, const EvalEnvironment& env, double t0, double t1);

struct Conjunct {
    std::string name;
    FormulaPtr formula;
};

/**
 * Splits a formula into named conjuncts. Conjunctions are flattened; temporal
 * operators are pushed onto the conjuncts of their body when every conjunct
 * there is a named formula, so a suite such as ev(alw(A and B)) reports A and
 * B separately (each a necessary condition of the whole).
 */
std::vector<Conjunct> conjuncts(const FormulaPtr& f);

struct ConjunctResult {
    std::string name;
    bool satisfied;
    double robustness;
    /// Evaluation time; differs from the monitor time under an eventually.
    double time = 0;
};

struct MonitorResult {
    std::string formula;
    double time = 0;
    bool satisfied = false;
    double robustness = 0;
    std::vector<ConjunctResult> per_conjunct;

    std::vector<std::string> failing() const;
};

/**
 * Evaluates `f` and its conjuncts at `t`. Conjuncts under an always are
 * evaluated as always-wrapped formulas; conjuncts under an eventually are
 * evaluated at a single witness time in its window, so a false formula always
 * has at least one failing conjunct.
 */
MonitorResult monitor(const FormulaPtr& f, const EvalEnvironment& env, double t = 0.0);

struct IronSpecOptions {
    /// Plateau floor relative to the Fe level at 4 h.
    double plateau_factor = 0.01;
};

/// Steady-state variable intervals used in the published formula suite.
Box published_variable_bounds();

/**
 * The iron behavioural specification: phi_S1..phi_S14, phi_P1..phi_P3,
 * phi_B1, phi_B2 and the compositions phi_Sall, phi_BPall, phi_all. The
 * variable ranges in phi_S6..phi_S10 and the Fe ceiling of phi_B2 come from
 * `bounds`.
 */
FormulaLibrary build_iron_spec(const Box& bounds, const IronSpecOptions& options = {});

} // namespace ironspec
