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
#include "ironspec/interval.hpp"

#include "ironspec/errors.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <deque>
#include <ostream>
#include <sstream>

namespace ironspec
{

namespace
{

constexpr double inf = std::numeric_limits<double>::infinity();

double down(double x)
{
    return std::nextafter(x, -inf);
}

double up(double x)
{
    return std::nextafter(x, inf);
}

// Directed rounding through error-free transformations: the exact result is
// s + err, so s is moved one ulp only when it was rounded the wrong way.

double add_dir(double a, double b, bool round_up)
{
    const double s = a + b;
    if (!std::isfinite(s)) {
        if (std::isfinite(a) && std::isfinite(b)) {
            return s > 0 ? (round_up ? s : DBL_MAX) : (round_up ? -DBL_MAX : s);
        }
        return s;
    }
    const double bb  = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    if (round_up) {
        return err > 0 ? up(s) : s;
    }
    return err < 0 ? down(s) : s;
}

double mul_dir(double a, double b, bool round_up)
{
    if (a == 0 || b == 0) {
        return 0.0;
    }
    const double p = a * b;
    if (!std::isfinite(p)) {
        if (std::isfinite(a) && std::isfinite(b)) {
            return p > 0 ? (round_up ? p : DBL_MAX) : (round_up ? -DBL_MAX : p);
        }
        return p;
    }
    if (std::fabs(p) < 1e-290) {
        return round_up ? up(p) : down(p);
    }
    const double err = std::fma(a, b, -p);
    if (round_up) {
        return err > 0 ? up(p) : p;
    }
    return err < 0 ? down(p) : p;
}

double div_dir(double a, double b, bool round_up)
{
    if (a == 0) {
        return 0.0;
    }
    const double q = a / b;
    if (!std::isfinite(q)) {
        if (std::isfinite(a) && std::isfinite(b)) {
            return q > 0 ? (round_up ? q : DBL_MAX) : (round_up ? -DBL_MAX : q);
        }
        return q;
    }
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return q;
    }
    if (std::fabs(q) < 1e-290) {
        return round_up ? up(q) : down(q);
    }
    // a - q*b is exact; the true quotient is q + r/b.
    const double r   = std::fma(-q, b, a);
    const double dir = (r > 0) == (b > 0) ? 1.0 : -1.0;
    if (r == 0) {
        return q;
    }
    if (round_up) {
        return dir > 0 ? up(q) : q;
    }
    return dir < 0 ? down(q) : q;
}

} // namespace

double Interval::mid() const
{
    if (is_empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isinf(lo) && std::isinf(hi)) {
        return 0.0;
    }
    if (std::isinf(lo)) {
        return -DBL_MAX;
    }
    if (std::isinf(hi)) {
        return DBL_MAX;
    }
    return lo + 0.5 * (hi - lo);
}

Interval operator+(const Interval& a, const Interval& b)
{
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    return {add_dir(a.lo, b.lo, false), add_dir(a.hi, b.hi, true)};
}

Interval operator-(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    return {-a.hi, -a.lo};
}

Interval operator-(const Interval& a, const Interval& b)
{
    return a + (-b);
}

Interval operator*(const Interval& a, const Interval& b)
{
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    const double xs[] = {a.lo, a.hi};
    const double ys[] = {b.lo, b.hi};
    double lo = inf, hi = -inf;
    for (double x : xs) {
        for (double y : ys) {
            lo = std::min(lo, mul_dir(x, y, false));
            hi = std::max(hi, mul_dir(x, y, true));
        }
    }
    return {lo, hi};
}

Interval operator/(const Interval& a, const Interval& b)
{
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    const bool b_has_zero = b.contains(0.0);
    if (b_has_zero) {
        if (a.contains(0.0)) {
            return Interval::whole();
        }
        if (b.lo == 0 && b.hi == 0) {
            return Interval::empty();
        }
        if (b.lo < 0 && b.hi > 0) {
            return Interval::whole();
        }
        if (b.lo == 0) { // b = [0, h], h > 0
            if (a.lo > 0) {
                return {div_dir(a.lo, b.hi, false), inf};
            }
            return {-inf, div_dir(a.hi, b.hi, true)};
        }
        // b = [l, 0], l < 0
        if (a.lo > 0) {
            return {-inf, div_dir(a.lo, b.lo, true)};
        }
        return {div_dir(a.hi, b.lo, false), inf};
    }
    const double xs[] = {a.lo, a.hi};
    const double ys[] = {b.lo, b.hi};
    double lo = inf, hi = -inf;
    for (double x : xs) {
        for (double y : ys) {
            lo = std::min(lo, div_dir(x, y, false));
            hi = std::max(hi, div_dir(x, y, true));
        }
    }
    return {lo, hi};
}

Interval abs(const Interval& a)
{
    if (a.is_empty()) {
        return a;
    }
    if (a.lo >= 0) {
        return a;
    }
    if (a.hi <= 0) {
        return -a;
    }
    return {0.0, std::max(-a.lo, a.hi)};
}

Interval intersect(const Interval& a, const Interval& b)
{
    Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    return r.is_empty() ? Interval::empty() : r;
}

Interval hull(const Interval& a, const Interval& b)
{
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

std::ostream& operator<<(std::ostream& os, const Interval& x)
{
    if (x.is_empty()) {
        return os << "[empty]";
    }
    return os << "[" << format_number(x.lo) << ", " << format_number(x.hi) << "]";
}

// ---------------------------------------------------------------------------

std::size_t Box::set(const std::string& name, Interval x)
{
    if (auto i = index_of(name)) {
        m_intervals[*i] = x;
        return *i;
    }
    m_index.emplace(name, m_names.size());
    m_names.push_back(name);
    m_intervals.push_back(x);
    return m_names.size() - 1;
}

std::optional<std::size_t> Box::index_of(std::string_view name) const
{
    auto it = m_index.find(std::string(name));
    if (it == m_index.end()) {
        return std::nullopt;
    }
    return it->second;
}

const Interval& Box::operator[](std::string_view name) const
{
    auto i = index_of(name);
    if (!i) {
        throw UnboundNameError(std::string(name));
    }
    return m_intervals[*i];
}

bool Box::is_empty() const
{
    return std::any_of(m_intervals.begin(), m_intervals.end(), [](const Interval& x) { return x.is_empty(); });
}

bool Box::contains_box(const Box& other) const
{
    for (std::size_t i = 0; i < size(); ++i) {
        if (auto j = other.index_of(m_names[i])) {
            if (!m_intervals[i].contains(other[*j])) {
                return false;
            }
        }
    }
    return true;
}

bool Box::contains_point(const std::unordered_map<std::string, double>& point) const
{
    for (std::size_t i = 0; i < size(); ++i) {
        auto it = point.find(m_names[i]);
        if (it != point.end() && !m_intervals[i].contains(it->second)) {
            return false;
        }
    }
    return true;
}

Box parse_box(std::string_view text)
{
    Box box;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ls(line);
        std::string name, lo_s, hi_s, extra;
        if (!(ls >> name)) {
            continue;
        }
        if (!(ls >> lo_s >> hi_s) || (ls >> extra)) {
            throw ParseError("expected 'name lo hi'", line_no, 1);
        }
        auto num = [&](const std::string& s) {
            if (s == "inf" || s == "+inf") {
                return inf;
            }
            if (s == "-inf") {
                return -inf;
            }
            std::size_t used = 0;
            double v         = 0;
            try {
                v = std::stod(s, &used);
            }
            catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size()) {
                throw ParseError("malformed number '" + s + "'", line_no, 1);
            }
            return v;
        };
        Interval x{num(lo_s), num(hi_s)};
        if (x.lo > x.hi) {
            throw ParseError("lower bound exceeds upper bound for '" + name + "'", line_no, 1);
        }
        box.set(name, x);
    }
    return box;
}

void write_box(std::ostream& os, const Box& box)
{
    for (std::size_t i = 0; i < box.size(); ++i) {
        os << box.name(i) << " " << format_number(box[i].lo) << " " << format_number(box[i].hi) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Constraints

Constraint parse_constraint(std::string_view text, int line)
{
    using detail::Tok;
    struct Parser : detail::ExprParser {
        using ExprParser::ExprParser;
        Constraint run()
        {
            Constraint c;
            c.lhs = parse_expr();
            switch (peek().kind) {
            case Tok::Eq: c.relation = Relation::Eq; break;
            case Tok::Le:
            case Tok::Lt: c.relation = Relation::Le; break;
            case Tok::Ge:
            case Tok::Gt: c.relation = Relation::Ge; break;
            default:
                fail(std::string("expected a relation, found ") +
                         (at(Tok::End) ? "end of input" : "'" + peek().text + "'"),
                     {"'='", "'<='", "'>='"});
            }
            take();
            c.rhs = parse_expr();
            if (!at(Tok::End)) {
                fail("unexpected '" + peek().text + "'", {"end of input"});
            }
            return c;
        }
    };
    Parser p(detail::tokenize(text, line), false);
    return p.run();
}

std::vector<Constraint> parse_constraints(std::string_view text)
{
    std::vector<Constraint> out;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl   = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        out.push_back(parse_constraint(line, line_no));
    }
    return out;
}

std::string to_string(const Constraint& c)
{
    const char* rel = c.relation == Relation::Eq ? " = " : c.relation == Relation::Le ? " <= " : " >= ";
    return to_string(*c.lhs) + rel + to_string(*c.rhs);
}

namespace
{

Interval apply(ExprKind kind, const Interval& a, const Interval& b)
{
    switch (kind) {
    case ExprKind::Add: return a + b;
    case ExprKind::Sub: return a - b;
    case ExprKind::Mul: return a * b;
    case ExprKind::Div: return a / b;
    case ExprKind::Neg: return -a;
    case ExprKind::Abs: return abs(a);
    default: return Interval::whole();
    }
}

/// Constraint flattened to post-order with variables resolved to box indices.
struct Compiled {
    struct Node {
        ExprKind kind;
        double number = 0;
        std::size_t var = 0;
        int a = -1, b = -1;
    };
    std::vector<Node> nodes;
    int lhs = -1, rhs = -1;
    Relation relation = Relation::Eq;
    std::vector<std::size_t> vars;

    int add(const Expr& e, const Box& box)
    {
        Node n{e.kind};
        switch (e.kind) {
        case ExprKind::Number:
            n.number = e.number;
            break;
        case ExprKind::Name: {
            auto i = box.index_of(e.name);
            if (!i) {
                throw UnboundNameError(e.name);
            }
            n.var = *i;
            if (std::find(vars.begin(), vars.end(), *i) == vars.end()) {
                vars.push_back(*i);
            }
            break;
        }
        case ExprKind::Signal:
        case ExprKind::Derivative:
            throw DomainError("signal references are not allowed in constraints");
        case ExprKind::Neg:
        case ExprKind::Abs:
            n.a = add(*e.lhs, box);
            break;
        default:
            n.a = add(*e.lhs, box);
            n.b = add(*e.rhs, box);
            break;
        }
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }

    Compiled(const Constraint& c, const Box& box)
        : relation(c.relation)
    {
        lhs = add(*c.lhs, box);
        rhs = add(*c.rhs, box);
    }

    /// Returns false if the constraint has no solution in the box (box is then emptied in some dimension).
    bool revise(Box& box, std::vector<Interval>& val) const
    {
        const auto n = nodes.size();
        val.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& nd = nodes[k];
            switch (nd.kind) {
            case ExprKind::Number: val[k] = Interval::point(nd.number); break;
            case ExprKind::Name: val[k] = box[nd.var]; break;
            case ExprKind::Neg:
            case ExprKind::Abs: val[k] = apply(nd.kind, val[nd.a], {}); break;
            default: val[k] = apply(nd.kind, val[nd.a], val[nd.b]); break;
            }
        }
        auto& l = val[lhs];
        auto& r = val[rhs];
        Interval nl = l, nr = r;
        switch (relation) {
        case Relation::Eq:
            nl = intersect(l, r);
            nr = nl;
            break;
        case Relation::Le:
            nl = intersect(l, {-inf, r.hi});
            nr = intersect(r, {l.lo, inf});
            break;
        case Relation::Ge:
            nl = intersect(l, {r.lo, inf});
            nr = intersect(r, {-inf, l.hi});
            break;
        }
        if (nl.is_empty() || nr.is_empty()) {
            return false;
        }
        l = nl;
        r = nr;
        // Children precede parents, so a reverse sweep sees each target before its operands.
        for (std::size_t k = n; k-- > 0;) {
            const auto& nd = nodes[k];
            const auto& t  = val[k];
            if (t.is_empty()) {
                return false;
            }
            switch (nd.kind) {
            case ExprKind::Number:
                break;
            case ExprKind::Name: {
                auto x = intersect(box[nd.var], t);
                if (x.is_empty()) {
                    box[nd.var] = x;
                    return false;
                }
                box[nd.var] = x;
                break;
            }
            case ExprKind::Neg:
                val[nd.a] = intersect(val[nd.a], -t);
                break;
            case ExprKind::Abs: {
                auto pos  = intersect(t, {0.0, inf});
                val[nd.a] = hull(intersect(val[nd.a], pos), intersect(val[nd.a], -pos));
                break;
            }
            case ExprKind::Add: {
                auto& x = val[nd.a];
                auto& y = val[nd.b];
                x       = intersect(x, t - y);
                y       = intersect(y, t - x);
                break;
            }
            case ExprKind::Sub: {
                auto& x = val[nd.a];
                auto& y = val[nd.b];
                x       = intersect(x, t + y);
                y       = intersect(y, x - t);
                break;
            }
            case ExprKind::Mul: {
                auto& x = val[nd.a];
                auto& y = val[nd.b];
                x       = intersect(x, t / y);
                y       = intersect(y, t / x);
                break;
            }
            case ExprKind::Div: {
                auto& x = val[nd.a];
                auto& y = val[nd.b];
                x       = intersect(x, t * y);
                y       = intersect(y, x / t);
                break;
            }
            default:
                break;
            }
        }
        return true;
    }
};

bool significant(const Interval& before, const Interval& after, double eps)
{
    if (after.is_empty()) {
        return true;
    }
    if (before == after) {
        return false;
    }
    const double wb = before.width(), wa = after.width();
    if (std::isinf(wb)) {
        if (std::isfinite(wa)) {
            return true;
        }
    }
    else if (wb - wa > eps * wb) {
        return true;
    }
    // Bounds spanning many decades move little in width but a lot in scale.
    auto moved = [eps](double b0, double b1) {
        if (b0 == b1) {
            return false;
        }
        if (std::isinf(b0)) {
            return true;
        }
        return std::fabs(b1 - b0) > eps * std::max(std::fabs(b0), std::fabs(b1));
    };
    return moved(before.lo, after.lo) || moved(before.hi, after.hi);
}

Box run_propagation(const std::vector<Compiled>& cs, const std::vector<std::vector<std::size_t>>& by_var, Box box,
                    const PropagationOptions& opt)
{
    std::deque<std::size_t> queue;
    std::vector<bool> queued(cs.size(), true);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        queue.push_back(i);
    }
    std::vector<Interval> scratch;
    // Domain of each variable when its constraints were last scheduled; small
    // revisions accumulate against it.
    std::vector<Interval> reference(box.size());
    for (std::size_t v = 0; v < box.size(); ++v) {
        reference[v] = box[v];
    }
    std::size_t revisions = 0;
    while (!queue.empty() && revisions < opt.max_revisions) {
        const auto c = queue.front();
        queue.pop_front();
        queued[c] = false;
        ++revisions;
        if (!cs[c].revise(box, scratch)) {
            throw InfeasibleError("constraint system has no solution in the box");
        }
        for (auto v : cs[c].vars) {
            if (significant(reference[v], box[v], opt.eps_improve)) {
                reference[v] = box[v];
                for (auto other : by_var[v]) {
                    if (!queued[other]) {
                        queued[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
    }
    return box;
}

} // namespace

Interval evaluate(const Expr& e, const Box& box)
{
    switch (e.kind) {
    case ExprKind::Number:
        return Interval::point(e.number);
    case ExprKind::Name:
        return box[e.name];
    case ExprKind::Signal:
    case ExprKind::Derivative:
        throw DomainError("signal references are not allowed in constraints");
    case ExprKind::Neg:
    case ExprKind::Abs:
        return apply(e.kind, evaluate(*e.lhs, box), {});
    default:
        return apply(e.kind, evaluate(*e.lhs, box), evaluate(*e.rhs, box));
    }
}

Box hc4_revise(const Constraint& c, const Box& box)
{
    Compiled compiled(c, box);
    Box out = box;
    std::vector<Interval> scratch;
    if (!compiled.revise(out, scratch)) {
        for (auto v : compiled.vars) {
            out[v] = Interval::empty();
        }
        if (compiled.vars.empty() && out.size() > 0) {
            out[0] = Interval::empty();
        }
    }
    return out;
}

Box propagate(const std::vector<Constraint>& constraints, const Box& box, const PropagationOptions& options)
{
    if (!(options.eps_improve > 0 && options.eps_improve < 1)) {
        throw DomainError("propagate: eps_improve must lie in (0, 1)");
    }
    if (box.is_empty()) {
        throw InfeasibleError("input box is empty");
    }
    std::vector<Compiled> cs;
    std::vector<std::vector<std::size_t>> by_var(box.size());
    for (const auto& c : constraints) {
        cs.emplace_back(c, box);
        for (auto v : cs.back().vars) {
            by_var[v].push_back(cs.size() - 1);
        }
    }
    auto out = run_propagation(cs, by_var, box, options);

    for (int depth = options.shave_depth; depth > 0 && !out.is_empty();) {
        bool changed = false;
        for (std::size_t v = 0; v < out.size(); ++v) {
            for (int side = 0; side < 2; ++side) {
                // Bisect toward the bound looking for the largest slice that propagation refutes.
                auto x = out[v];
                if (!std::isfinite(x.lo) || !std::isfinite(x.hi) || x.width() == 0) {
                    continue;
                }
                const bool geometric = x.lo > 0 && x.hi / x.lo > 1e3;
                double inner = side == 0 ? x.hi : x.lo;
                double outer = side == 0 ? x.lo : x.hi;
                double refuted = outer;
                for (int k = 0; k < depth; ++k) {
                    const double m = geometric ? std::sqrt(outer * inner) : 0.5 * (outer + inner);
                    Box probe      = out;
                    probe[v]       = side == 0 ? Interval{x.lo, m} : Interval{m, x.hi};
                    bool infeasible = false;
                    try {
                        run_propagation(cs, by_var, probe, options);
                    }
                    catch (const InfeasibleError&) {
                        infeasible = true;
                    }
                    if (infeasible) {
                        refuted = m;
                        outer   = m;
                    }
                    else {
                        inner = m;
                    }
                }
                if (refuted != (side == 0 ? x.lo : x.hi)) {
                    out[v]  = side == 0 ? Interval{refuted, x.hi} : Interval{x.lo, refuted};
                    changed = true;
                }
            }
        }
        if (!changed) {
            break;
        }
        out = run_propagation(cs, by_var, out, options);
        --depth;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Iron system

ConstraintSystem build_iron_constraints(double tf_sat)
{
    ConstraintSystem sys;
    auto& b = sys.box;
    // Steady-state concentrations (mol/L).
    b.set("Fe", {0.0, 2e-6});
    b.set("TfR1", {1e-8, 1e-7});
    b.set("FPN1a", {1e-13, 1e-5});
    b.set("Ft", {1e-13, 1e-5});
    b.set("IRP", {3e-9, 1.07e-8});
    // Measured rates.
    b.set("k_FPN1a_deg", {0.0, 9.6e-6});
    b.set("k_TfR1_prod", {1e-13, 2e-13});
    b.set("k_IRP_deg", {1.28e-5, 1.6e-5});
    b.set("k_TfR1_deg", {2e-5, 3e-5});
    b.set("k_IRP_TfR1", {4.2e-5, 14.4e-5});
    b.set("k_Fe_input", {2e-2, 3.9e-2});
    b.set("n_Ft", {0.0, 4500.0});
    b.set("Tf_sat", Interval::point(tf_sat));
    // Ranges set by analogy with the measured ones.
    for (const char* prod : {"k_IRP_prod", "k_Ft_prod", "k_FPN1a_prod", "k_IRP_Ft", "k_IRP_FPN1a"}) {
        b.set(prod, {1e-18, 1e-10});
    }
    b.set("k_Fe_cons", {0.0, 1.0});
    b.set("k_Fe_IRP", {1e-9, 1.0});
    b.set("k_Ft_deg", {1e-9, 1.0});
    b.set("k_Fe_export", {0.0, 1e6});
    b.set("theta_Fe_IRP", {0.0, 2e-6});
    b.set("theta_IRP_Ft", {1e-13, 1e-5});
    b.set("theta_IRP_FPN1a", {1e-13, 1e-5});

    const char* text[] = {
        "k_Ft_prod = k_Ft_deg*Ft",
        "k_FPN1a_prod = k_FPN1a_deg*FPN1a",
        "k_IRP_prod = (k_IRP_deg + k_Fe_IRP)*IRP",
        "k_TfR1_prod + k_IRP_TfR1*IRP = k_TfR1_deg*TfR1",
        "k_Fe_input*TfR1*Tf_sat = (k_Fe_export*FPN1a + k_Fe_cons)*Fe",
        "Ft = k_Ft_prod/k_Ft_deg",
        "FPN1a = k_FPN1a_prod/k_FPN1a_deg",
        "IRP = k_IRP_prod/(k_IRP_deg + k_Fe_IRP)",
        "TfR1 = ((k_IRP_deg + k_Fe_IRP)*k_TfR1_prod + k_IRP_TfR1*k_IRP_prod)/((k_IRP_deg + k_Fe_IRP)*k_TfR1_deg)",
        "Fe = Tf_sat*k_FPN1a_deg*k_Fe_input*((k_IRP_deg + k_Fe_IRP)*k_TfR1_prod + k_IRP_TfR1*k_IRP_prod)"
        "/((k_Fe_export*k_FPN1a_prod + k_Fe_cons*k_FPN1a_deg)*(k_IRP_deg + k_Fe_IRP)*k_TfR1_deg)",
        "k_Fe_cons >= k_Fe_export*FPN1a",
        "Fe >= theta_Fe_IRP",
        "IRP <= theta_IRP_Ft",
        "IRP <= theta_IRP_FPN1a",
    };
    for (const char* t : text) {
        sys.constraints.push_back(parse_constraint(t));
    }
    return sys;
}

const std::vector<Deduction>& published_deductions()
{
    static const std::vector<Deduction> d = {
        {"k_FPN1a_deg", true, 1.0e-13}, {"k_FPN1a_prod", false, 9.6e-11}, {"k_IRP_prod", true, 3.84e-14},
        {"k_Fe_cons", false, 3.39e-4},  {"k_Fe_IRP", false, 3.33e-2},     {"FPN1a", true, 1.04e-13},
        {"Fe", true, 3.5e-8},           {"TfR1", false, 8.7e-8},
    };
    return d;
}

std::vector<DeductionMatch> match_deductions(const Box& before, const Box& after)
{
    std::vector<DeductionMatch> out;
    for (const auto& d : published_deductions()) {
        DeductionMatch m{d, before[d.name], after[d.name], false};
        const double ours = d.lower ? m.after.lo : m.after.hi;
        const bool moved  = d.lower ? m.after.lo > m.before.lo : m.after.hi < m.before.hi;
        m.matched = moved && ours > 0 && std::fabs(std::log10(ours / d.value)) <= 1.0;
        out.push_back(m);
    }
    return out;
}

} // namespace ironspec
