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

#include <memory>
#include <optional>
#include <set>
#include <string>

namespace ironspec
{

enum class ExprKind
{
    Number,
    Name,       // parameter (formulas) or box variable (constraints)
    Signal,     // var[t] or var[c]
    Derivative, // ddt{var}[t] or ddt{var}[c]
    Neg,
    Abs,
    Add,
    Sub,
    Mul,
    Div,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable arithmetic expression node shared by STL predicates and interval constraints.
struct Expr {
    ExprKind kind = ExprKind::Number;
    double number = 0;
    std::string name;
    /// Frozen evaluation time for Signal/Derivative; empty means the current time t.
    std::optional<double> at;
    ExprPtr lhs;
    ExprPtr rhs;

    static ExprPtr make_number(double v);
    static ExprPtr make_name(std::string name);
    static ExprPtr make_signal(std::string var, std::optional<double> at = std::nullopt);
    static ExprPtr make_derivative(std::string var, std::optional<double> at = std::nullopt);
    static ExprPtr make_unary(ExprKind kind, ExprPtr operand);
    static ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs);
};

/// Shortest text that parses back to exactly the same double.
std::string format_number(double v);

std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Names referenced by Name nodes.
void collect_names(const Expr& e, std::set<std::string>& out);

/// True if the expression contains Signal or Derivative nodes.
bool depends_on_time(const Expr& e);

} // namespace ironspec
