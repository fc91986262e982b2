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
#include "ironspec/stl.hpp"

#include "ironspec/errors.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ironspec
{

using detail::Tok;

namespace
{

std::shared_ptr<StlFormula> make(StlKind kind)
{
    auto f  = std::make_shared<StlFormula>();
    f->kind = kind;
    return f;
}

constexpr double inf = std::numeric_limits<double>::infinity();

} // namespace

FormulaPtr StlFormula::predicate(ExprPtr lhs, Comparison cmp, ExprPtr rhs)
{
    auto f = make(StlKind::Predicate);
    f->lhs = std::move(lhs);
    f->cmp = cmp;
    f->rhs = std::move(rhs);
    return f;
}

FormulaPtr StlFormula::conjunction(FormulaPtr a, FormulaPtr b)
{
    auto f   = make(StlKind::And);
    f->left  = std::move(a);
    f->right = std::move(b);
    return f;
}

FormulaPtr StlFormula::disjunction(FormulaPtr a, FormulaPtr b)
{
    auto f   = make(StlKind::Or);
    f->left  = std::move(a);
    f->right = std::move(b);
    return f;
}

FormulaPtr StlFormula::negation(FormulaPtr g)
{
    auto f  = make(StlKind::Not);
    f->left = std::move(g);
    return f;
}

FormulaPtr StlFormula::eventually(double lo, double hi, FormulaPtr g)
{
    if (!(lo >= 0 && lo <= hi) || std::isinf(lo)) {
        throw DomainError("temporal window requires 0 <= a <= b");
    }
    auto f  = make(StlKind::Ev);
    f->lo   = lo;
    f->hi   = hi;
    f->left = std::move(g);
    return f;
}

FormulaPtr StlFormula::always(double lo, double hi, FormulaPtr g)
{
    auto ev = eventually(lo, hi, std::move(g));
    auto f  = std::make_shared<StlFormula>(*ev);
    f->kind = StlKind::Alw;
    return f;
}

FormulaPtr StlFormula::labeled(const FormulaPtr& g, std::string label)
{
    auto f   = std::make_shared<StlFormula>(*g);
    f->label = std::move(label);
    return f;
}

// ---------------------------------------------------------------------------
// Parsing

namespace
{

class StlParser : public detail::ExprParser
{
public:
    StlParser(std::vector<detail::Token> tokens, const FormulaLibrary* library)
        : ExprParser(std::move(tokens), true)
        , m_library(library)
    {
    }

    FormulaPtr parse_all()
    {
        auto f = parse_or();
        if (!at(Tok::End)) {
            fail("unexpected '" + peek().text + "'", {"and", "or", "end of input"});
        }
        return f;
    }

private:
    FormulaPtr parse_or()
    {
        auto f = parse_and();
        while (at_ident("or")) {
            take();
            f = StlFormula::disjunction(f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and()
    {
        auto f = parse_unary();
        while (at_ident("and")) {
            take();
            f = StlFormula::conjunction(f, parse_unary());
        }
        return f;
    }

    FormulaPtr parse_unary()
    {
        if (at_ident("not")) {
            take();
            return StlFormula::negation(parse_unary());
        }
        if (at_ident("ev") || at_ident("alw") || at_ident("ev_") || at_ident("alw_")) {
            const auto kw     = take();
            const bool is_ev  = kw.text.starts_with("ev");
            double lo = 0, hi = inf;
            if (kw.text.ends_with("_")) {
                const auto open = peek();
                expect(Tok::LBracket);
                lo = parse_constant();
                expect(Tok::Comma);
                hi = parse_constant();
                expect(Tok::RBracket);
                if (!(lo >= 0 && lo <= hi) || std::isinf(lo)) {
                    throw ParseError("invalid time interval [" + format_number(lo) + ", " + format_number(hi) +
                                         "]: require 0 <= a <= b",
                                     open.line, open.column);
                }
            }
            auto body = parse_unary();
            return is_ev ? StlFormula::eventually(lo, hi, body) : StlFormula::always(lo, hi, body);
        }
        if (at(Tok::LParen) && !m_not_formula.contains(m_pos)) {
            const auto save = m_pos;
            std::optional<ParseError> first;
            try {
                take();
                auto f = parse_or();
                expect(Tok::RParen);
                return f;
            }
            catch (const ParseError& e) {
                first = e;
            }
            m_pos = save;
            m_not_formula.insert(save);
            try {
                return parse_predicate();
            }
            catch (const ParseError& e) {
                // Report whichever reading got further.
                if (std::pair(first->line, first->column) > std::pair(e.line, e.column)) {
                    throw *first;
                }
                throw;
            }
        }
        if (at(Tok::Ident) && m_library && m_library->contains(peek().text) && peek(1).kind != Tok::LBracket) {
            const auto name = take().text;
            return StlFormula::labeled(m_library->get(name), name);
        }
        return parse_predicate();
    }

    FormulaPtr parse_predicate()
    {
        auto lhs = parse_expr();
        Comparison cmp;
        switch (peek().kind) {
        case Tok::Lt: cmp = Comparison::Lt; break;
        case Tok::Le: cmp = Comparison::Le; break;
        case Tok::Gt: cmp = Comparison::Gt; break;
        case Tok::Ge: cmp = Comparison::Ge; break;
        default:
            fail(std::string("expected a comparison, found ") +
                     (at(Tok::End) ? "end of input" : "'" + peek().text + "'"),
                 {"'<'", "'<='", "'>'", "'>='"});
        }
        take();
        auto rhs = parse_expr();
        return StlFormula::predicate(lhs, cmp, rhs);
    }

    const FormulaLibrary* m_library;
    std::set<std::size_t> m_not_formula;
};

const char* comparison_text(Comparison c)
{
    switch (c) {
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
    }
    return "?";
}

} // namespace

FormulaPtr parse_formula(std::string_view text, const FormulaLibrary* library, int first_line)
{
    StlParser parser(detail::tokenize(text, first_line), library);
    return parser.parse_all();
}

std::string to_string(const StlFormula& f)
{
    switch (f.kind) {
    case StlKind::Predicate:
        return to_string(*f.lhs) + " " + comparison_text(f.cmp) + " " + to_string(*f.rhs);
    case StlKind::And:
        return "(" + to_string(*f.left) + ") and (" + to_string(*f.right) + ")";
    case StlKind::Or:
        return "(" + to_string(*f.left) + ") or (" + to_string(*f.right) + ")";
    case StlKind::Not:
        return "not (" + to_string(*f.left) + ")";
    case StlKind::Ev:
    case StlKind::Alw: {
        std::string s = f.kind == StlKind::Ev ? "ev" : "alw";
        if (f.lo != 0 || !std::isinf(f.hi)) {
            s += "_[" + format_number(f.lo) + ", " + format_number(f.hi) + "]";
        }
        return s + " (" + to_string(*f.left) + ")";
    }
    }
    return {};
}

bool structurally_equal(const StlFormula& a, const StlFormula& b)
{
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case StlKind::Predicate:
        return a.cmp == b.cmp && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    case StlKind::And:
    case StlKind::Or:
        return structurally_equal(*a.left, *b.left) && structurally_equal(*a.right, *b.right);
    case StlKind::Not:
        return structurally_equal(*a.left, *b.left);
    case StlKind::Ev:
    case StlKind::Alw:
        return a.lo == b.lo && a.hi == b.hi && structurally_equal(*a.left, *b.left);
    }
    return false;
}

double horizon(const StlFormula& f)
{
    switch (f.kind) {
    case StlKind::Predicate:
        return 0.0;
    case StlKind::And:
    case StlKind::Or:
        return std::max(horizon(*f.left), horizon(*f.right));
    case StlKind::Not:
        return horizon(*f.left);
    case StlKind::Ev:
    case StlKind::Alw:
        return (std::isinf(f.hi) ? f.lo : f.hi) + horizon(*f.left);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Library

void FormulaLibrary::define(const std::string& name, const std::string& text, int line)
{
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') ||
        !std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
        throw ParseError("invalid formula name '" + name + "'", line, 1);
    }
    if (contains(name)) {
        throw ParseError("formula '" + name + "' is already defined", line, 1);
    }
    auto f = parse_formula(text, this, line);
    m_entries.emplace(name, Entry{text, StlFormula::labeled(f, name)});
    m_order.push_back(name);
}

bool FormulaLibrary::contains(std::string_view name) const
{
    return m_entries.find(name) != m_entries.end();
}

FormulaPtr FormulaLibrary::get(std::string_view name) const
{
    auto it = m_entries.find(name);
    if (it == m_entries.end()) {
        throw UnboundNameError(std::string(name));
    }
    return it->second.formula;
}

const std::string& FormulaLibrary::text(std::string_view name) const
{
    auto it = m_entries.find(name);
    if (it == m_entries.end()) {
        throw UnboundNameError(std::string(name));
    }
    return it->second.text;
}

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

FormulaLibrary FormulaLibrary::parse(std::string_view src)
{
    FormulaLibrary lib;
    int line_no = 0;
    while (!src.empty()) {
        ++line_no;
        auto nl   = src.find('\n');
        auto line = trim(src.substr(0, nl));
        src.remove_prefix(nl == std::string_view::npos ? src.size() : nl + 1);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto def = line.find(":=");
        if (def == std::string_view::npos) {
            throw ParseError("expected 'name := formula'", line_no, 1, {"':='"});
        }
        lib.define(std::string(trim(line.substr(0, def))), std::string(trim(line.substr(def + 2))), line_no);
    }
    return lib;
}

FormulaLibrary FormulaLibrary::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open formula file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string FormulaLibrary::to_text() const
{
    std::string out;
    for (const auto& name : m_order) {
        out += name + " := " + m_entries.at(name).text + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

std::map<std::string, double, std::less<>> parameter_bindings(const ParameterSet& params)
{
    std::map<std::string, double, std::less<>> m;
    for (const auto& info : parameter_table()) {
        m.emplace(std::string(info.name), params.*info.member);
    }
    return m;
}

namespace
{

struct Pl {
    std::vector<double> t;
    std::vector<double> v;
};

using Set = std::vector<TimeInterval>;

double clamp_margin(double m)
{
    if (std::isnan(m)) {
        return -huge_robustness;
    }
    return std::clamp(m, -huge_robustness, huge_robustness);
}

double interpolate(const std::vector<double>& ts, const std::vector<double>& vs, double x)
{
    if (x <= ts.front()) {
        return vs.front();
    }
    if (x >= ts.back()) {
        return vs.back();
    }
    auto j = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), x) - ts.begin()) - 1;
    if (ts[j] == x) {
        return vs[j];
    }
    const double w = (x - ts[j]) / (ts[j + 1] - ts[j]);
    return vs[j] + (vs[j + 1] - vs[j]) * w;
}

double pl_at(const Pl& f, double x)
{
    return interpolate(f.t, f.v, x);
}

Pl negate(Pl f)
{
    for (auto& v : f.v) {
        v = -v;
    }
    return f;
}

Pl constant(double lo, double hi, double v)
{
    if (lo == hi) {
        return {{lo}, {v}};
    }
    return {{lo, hi}, {v, v}};
}

/// Series evaluated over a contiguous sample range, or a scalar.
struct Series {
    bool scalar = true;
    double value = 0;
    std::vector<double> values;

    double at(std::size_t k) const
    {
        return scalar ? value : values[k];
    }
};

class Evaluator
{
public:
    explicit Evaluator(const EvalEnvironment& env)
        : m_env(env)
        , m_trace(*env.trace)
        , m_times(m_trace.times())
        , m_end(m_trace.end_time())
    {
    }

    double end() const
    {
        return m_end;
    }

    Pl rob(const StlFormula& f, double lo, double hi)
    {
        switch (f.kind) {
        case StlKind::Predicate: {
            auto [i0, margins] = margin_samples(f, lo, hi);
            Pl out;
            out.t.assign(m_times.begin() + static_cast<std::ptrdiff_t>(i0),
                         m_times.begin() + static_cast<std::ptrdiff_t>(i0 + margins.size()));
            out.v = std::move(margins);
            return out;
        }
        case StlKind::Not:
            return negate(rob(*f.left, lo, hi));
        case StlKind::And:
        case StlKind::Or:
            return combine(rob(*f.left, lo, hi), rob(*f.right, lo, hi), f.kind == StlKind::And);
        case StlKind::Ev:
        case StlKind::Alw: {
            const bool alw = f.kind == StlKind::Alw;
            if (lo + f.lo > m_end) {
                return constant(lo, hi, alw ? huge_robustness : -huge_robustness);
            }
            const double clo = std::min(lo + f.lo, m_end);
            const double chi = std::max(clo, std::min(hi + f.hi, m_end));
            auto child       = rob(*f.left, clo, chi);
            if (alw) {
                return negate(sliding_max(negate(std::move(child)), f.lo, f.hi, lo, hi));
            }
            return sliding_max(child, f.lo, f.hi, lo, hi);
        }
        }
        return {};
    }

    Set sat(const StlFormula& f, double lo, double hi)
    {
        Set s;
        switch (f.kind) {
        case StlKind::Predicate: {
            auto [i0, m] = margin_samples(f, lo, hi);
            const bool strict = f.cmp == Comparison::Lt || f.cmp == Comparison::Gt;
            auto holds        = [&](double v) { return strict ? v > 0 : v >= 0; };
            if (m.size() == 1) {
                if (holds(m[0])) {
                    push_interval(s, {m_times[i0], m_times[i0], true, true});
                }
                break;
            }
            for (std::size_t k = 0; k + 1 < m.size(); ++k) {
                const double t0 = m_times[i0 + k], t1 = m_times[i0 + k + 1];
                const double v0 = m[k], v1 = m[k + 1];
                const bool h0 = holds(v0), h1 = holds(v1);
                auto cross    = [&] { return std::clamp(t0 + (t1 - t0) * (v0 / (v0 - v1)), t0, t1); };
                if (h0 && h1) {
                    push_interval(s, {t0, t1, true, true});
                }
                else if (h0) {
                    // Margin leaves the set inside the segment; the crossing belongs to it only if non-strict.
                    push_interval(s, {t0, cross(), true, !strict});
                }
                else if (h1) {
                    push_interval(s, {cross(), t1, !strict, true});
                }
            }
            break;
        }
        case StlKind::Not:
            return complement(sat(*f.left, lo, hi), lo, hi);
        case StlKind::And:
            return intersect_sets(sat(*f.left, lo, hi), sat(*f.right, lo, hi));
        case StlKind::Or:
            return union_sets(sat(*f.left, lo, hi), sat(*f.right, lo, hi));
        case StlKind::Ev:
        case StlKind::Alw: {
            const bool alw = f.kind == StlKind::Alw;
            if (lo + f.lo > m_end) {
                if (alw) {
                    s.push_back({lo, hi, true, true});
                }
                return s;
            }
            const double clo = std::min(lo + f.lo, m_end);
            const double chi = std::max(clo, std::min(hi + f.hi, m_end));
            auto child       = sat(*f.left, clo, chi);
            if (alw) {
                child = complement(child, clo, chi);
            }
            // t + [a, b] meets (p, q) iff t lies in (p - b, q - a) with the same endpoint inclusion.
            const double last = std::max(lo, m_end - f.lo);
            for (const auto& iv : child) {
                push_interval(s, {iv.lo - f.hi, iv.hi - f.lo, iv.lo_closed, iv.hi_closed});
            }
            s = clip(s, lo, std::min(hi, last));
            if (alw) {
                s = complement(s, lo, hi);
            }
            return s;
        }
        }
        return clip(s, lo, hi);
    }

private:
    /// Predicate margins on the samples bracketing [lo, hi]; returns the first sample index.
    std::pair<std::size_t, std::vector<double>> margin_samples(const StlFormula& f, double lo, double hi)
    {
        const auto n = m_times.size();
        auto i0      = static_cast<std::size_t>(std::upper_bound(m_times.begin(), m_times.end(), lo) -
                                           m_times.begin());
        i0           = i0 == 0 ? 0 : i0 - 1;
        auto i1      = static_cast<std::size_t>(std::lower_bound(m_times.begin(), m_times.end(), hi) -
                                           m_times.begin());
        i1           = std::min(i1, n - 1);
        const auto count = i1 - i0 + 1;
        auto l           = series(*f.lhs, i0, count);
        auto r           = series(*f.rhs, i0, count);
        const bool less  = f.cmp == Comparison::Lt || f.cmp == Comparison::Le;
        std::vector<double> m(count);
        for (std::size_t k = 0; k < count; ++k) {
            m[k] = clamp_margin(less ? r.at(k) - l.at(k) : l.at(k) - r.at(k));
        }
        return {i0, std::move(m)};
    }

    const std::vector<double>& channel(const std::string& name, bool derivative) const
    {
        int v = m_trace.find_variable(name);
        if (v >= 0) {
            return derivative ? m_trace.derivatives(static_cast<std::size_t>(v))
                              : m_trace.values(static_cast<std::size_t>(v));
        }
        if (!derivative && name == m_trace.input_name()) {
            return m_trace.input();
        }
        throw UnboundNameError(derivative ? "ddt{" + name + "}" : name);
    }

    Series series(const Expr& e, std::size_t i0, std::size_t count)
    {
        Series out;
        switch (e.kind) {
        case ExprKind::Number:
            out.value = e.number;
            return out;
        case ExprKind::Name: {
            auto it = m_env.parameters.find(e.name);
            if (it == m_env.parameters.end()) {
                throw UnboundNameError(e.name);
            }
            out.value = it->second;
            return out;
        }
        case ExprKind::Signal:
        case ExprKind::Derivative: {
            const auto& ch = channel(e.name, e.kind == ExprKind::Derivative);
            if (e.at) {
                if (*e.at < m_times.front() || *e.at > m_end) {
                    throw DomainError("frozen reference " + to_string(e) + " lies outside the trace");
                }
                out.value = interpolate(m_times, ch, *e.at);
                return out;
            }
            out.scalar = false;
            out.values.assign(ch.begin() + static_cast<std::ptrdiff_t>(i0),
                              ch.begin() + static_cast<std::ptrdiff_t>(i0 + count));
            return out;
        }
        case ExprKind::Neg:
        case ExprKind::Abs: {
            out = series(*e.lhs, i0, count);
            auto op = [&](double x) { return e.kind == ExprKind::Neg ? -x : std::fabs(x); };
            out.value = op(out.value);
            for (auto& x : out.values) {
                x = op(x);
            }
            return out;
        }
        default: {
            auto a  = series(*e.lhs, i0, count);
            auto b  = series(*e.rhs, i0, count);
            auto op = [&](double x, double y) {
                switch (e.kind) {
                case ExprKind::Add: return x + y;
                case ExprKind::Sub: return x - y;
                case ExprKind::Mul: return x * y;
                default: return x / y;
                }
            };
            if (a.scalar && b.scalar) {
                out.value = op(a.value, b.value);
                return out;
            }
            out.scalar = false;
            out.values.resize(count);
            for (std::size_t k = 0; k < count; ++k) {
                out.values[k] = op(a.at(k), b.at(k));
            }
            return out;
        }
        }
    }

    static Pl combine(const Pl& f, const Pl& g, bool take_min)
    {
        const double a = std::max(f.t.front(), g.t.front());
        const double b = std::min(f.t.back(), g.t.back());
        std::vector<double> ts;
        ts.reserve(f.t.size() + g.t.size() + 2);
        ts.push_back(a);
        for (const auto* src : {&f.t, &g.t}) {
            for (double x : *src) {
                if (x > a && x < b) {
                    ts.push_back(x);
                }
            }
        }
        ts.push_back(b);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

        auto pick = [&](double x, double y) { return take_min ? std::min(x, y) : std::max(x, y); };
        Pl out;
        out.t.reserve(ts.size() * 2);
        out.v.reserve(ts.size() * 2);
        double pf = 0, pg = 0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double x  = ts[k];
            const double fx = pl_at(f, x), gx = pl_at(g, x);
            if (k > 0) {
                const double d0 = pf - pg, d1 = fx - gx;
                if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
                    const double x0 = ts[k - 1];
                    const double xc = x0 + (x - x0) * (d0 / (d0 - d1));
                    if (xc > x0 && xc < x) {
                        out.t.push_back(xc);
                        out.v.push_back(pick(pl_at(f, xc), pl_at(g, xc)));
                    }
                }
            }
            out.t.push_back(x);
            out.v.push_back(pick(fx, gx));
            pf = fx;
            pg = gx;
        }
        return out;
    }

    /// g(t) = max of f over [t + a, min(t + b, end)] for t in [lo, hi]; -huge where the window is empty.
    Pl sliding_max(const Pl& f, double a, double b, double lo, double hi) const
    {
        const std::size_t n = f.t.size();
        // Sparse table for range maxima over breakpoint values.
        std::vector<std::vector<double>> table{f.v};
        for (std::size_t w = 1; 2 * w <= n; w *= 2) {
            const auto& prev = table.back();
            std::vector<double> next(n - 2 * w + 1);
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] = std::max(prev[i], prev[i + w]);
            }
            table.push_back(std::move(next));
        }
        auto range_max = [&](std::size_t i, std::size_t j) {
            const auto len = j - i + 1;
            const auto lvl = static_cast<std::size_t>(std::bit_width(len) - 1);
            return std::max(table[lvl][i], table[lvl][j + 1 - (std::size_t{1} << lvl)]);
        };
        auto window = [&](double t) {
            const double lw = std::min(t + a, m_end);
            const double hw = std::max(lw, std::min(t + b, m_end));
            return std::pair(lw, hw);
        };
        // Breakpoints strictly inside the window.
        auto interior = [&](double lw, double hw) -> std::optional<std::pair<std::size_t, std::size_t>> {
            auto j0 = static_cast<std::size_t>(std::upper_bound(f.t.begin(), f.t.end(), lw) - f.t.begin());
            auto j1 = static_cast<std::size_t>(std::lower_bound(f.t.begin(), f.t.end(), hw) - f.t.begin());
            if (j1 == 0 || j0 > j1 - 1) {
                return std::nullopt;
            }
            return std::pair(j0, j1 - 1);
        };
        auto value = [&](double t) {
            auto [lw, hw] = window(t);
            double v      = std::max(pl_at(f, lw), pl_at(f, hw));
            if (auto r = interior(lw, hw)) {
                v = std::max(v, range_max(r->first, r->second));
            }
            return v;
        };

        const double last = std::max(lo, std::min(hi, m_end - a));
        std::vector<double> events{lo, last};
        auto add_event = [&](double e) {
            if (e > lo && e < last) {
                events.push_back(e);
            }
        };
        for (double x : f.t) {
            add_event(x - a);
            if (std::isfinite(b)) {
                add_event(x - b);
            }
        }
        if (std::isfinite(b)) {
            add_event(m_end - b);
        }
        std::sort(events.begin(), events.end());
        events.erase(std::unique(events.begin(), events.end()), events.end());

        // Between events the window contents change only through its end
        // points, so g is the max of two lines and a constant; add their crossings.
        std::vector<double> points = events;
        for (std::size_t k = 0; k + 1 < events.size(); ++k) {
            const double e0 = events[k], e1 = events[k + 1];
            const double mid = 0.5 * (e0 + e1);
            auto [lw0, hw0]  = window(e0);
            auto [lw1, hw1]  = window(e1);
            auto [lwm, hwm]  = window(mid);
            const double l0 = pl_at(f, lw0), l1 = pl_at(f, lw1);
            const double u0 = pl_at(f, hw0), u1 = pl_at(f, hw1);
            double c        = -inf;
            if (auto r = interior(lwm, hwm)) {
                c = range_max(r->first, r->second);
            }
            auto cross = [&](double d0, double d1) {
                if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
                    const double x = e0 + (e1 - e0) * (d0 / (d0 - d1));
                    if (x > e0 && x < e1) {
                        points.push_back(x);
                    }
                }
            };
            cross(l0 - u0, l1 - u1);
            if (std::isfinite(c)) {
                cross(l0 - c, l1 - c);
                cross(u0 - c, u1 - c);
            }
        }
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());

        Pl out;
        out.t = points;
        out.v.reserve(points.size() + 2);
        for (double t : points) {
            out.v.push_back(value(t));
        }
        if (hi > last) {
            const double next = std::nextafter(last, inf);
            if (next <= hi) {
                out.t.push_back(next);
                out.v.push_back(-huge_robustness);
            }
            if (hi > next) {
                out.t.push_back(hi);
                out.v.push_back(-huge_robustness);
            }
        }
        return out;
    }

    static bool is_empty(const TimeInterval& x)
    {
        return x.lo > x.hi || (x.lo == x.hi && !(x.lo_closed && x.hi_closed));
    }

    /// Appends `x`, merging with the last interval when they overlap or touch at an included point.
    static void push_interval(Set& s, const TimeInterval& x)
    {
        if (is_empty(x)) {
            return;
        }
        if (!s.empty()) {
            auto& b = s.back();
            if (x.lo < b.hi || (x.lo == b.hi && (x.lo_closed || b.hi_closed))) {
                if (x.hi > b.hi) {
                    b.hi        = x.hi;
                    b.hi_closed = x.hi_closed;
                }
                else if (x.hi == b.hi) {
                    b.hi_closed = b.hi_closed || x.hi_closed;
                }
                return;
            }
        }
        s.push_back(x);
    }

    static Set clip(const Set& s, double lo, double hi)
    {
        Set out;
        for (auto x : s) {
            if (x.lo < lo) {
                x.lo        = lo;
                x.lo_closed = true;
            }
            if (x.hi > hi) {
                x.hi        = hi;
                x.hi_closed = true;
            }
            push_interval(out, x);
        }
        return out;
    }

    /// Complement of `s` within [lo, hi].
    static Set complement(const Set& raw, double lo, double hi)
    {
        const auto s = clip(raw, lo, hi);
        Set out;
        double cursor      = lo;
        bool cursor_closed = true;
        for (const auto& x : s) {
            push_interval(out, {cursor, x.lo, cursor_closed, !x.lo_closed});
            cursor        = x.hi;
            cursor_closed = !x.hi_closed;
        }
        push_interval(out, {cursor, hi, cursor_closed, true});
        return out;
    }

    static Set intersect_sets(const Set& x, const Set& y)
    {
        Set out;
        std::size_t i = 0, j = 0;
        while (i < x.size() && j < y.size()) {
            const auto& u = x[i];
            const auto& v = y[j];
            TimeInterval w;
            w.lo        = std::max(u.lo, v.lo);
            w.lo_closed = u.lo == v.lo ? (u.lo_closed && v.lo_closed) : (u.lo > v.lo ? u.lo_closed : v.lo_closed);
            w.hi        = std::min(u.hi, v.hi);
            w.hi_closed = u.hi == v.hi ? (u.hi_closed && v.hi_closed) : (u.hi < v.hi ? u.hi_closed : v.hi_closed);
            push_interval(out, w);
            if (u.hi < v.hi || (u.hi == v.hi && !u.hi_closed)) {
                ++i;
            }
            else {
                ++j;
            }
        }
        return out;
    }

    static Set union_sets(const Set& x, const Set& y)
    {
        Set all = x;
        all.insert(all.end(), y.begin(), y.end());
        std::sort(all.begin(), all.end(), [](const TimeInterval& a, const TimeInterval& b) {
            return a.lo < b.lo || (a.lo == b.lo && a.lo_closed && !b.lo_closed);
        });
        Set out;
        for (const auto& x : all) {
            push_interval(out, x);
        }
        return out;
    }

    const EvalEnvironment& m_env;
    const Trace& m_trace;
    const std::vector<double>& m_times;
    double m_end;
};

void check_time(const StlFormula& f, const EvalEnvironment& env, double t0, double t1)
{
    if (!env.trace || env.trace->empty()) {
        throw DomainError("evaluation environment has no trace");
    }
    const auto& tr = *env.trace;
    if (!(t0 >= tr.start_time() && t1 <= tr.end_time() && t0 <= t1)) {
        throw DomainError("evaluation time outside the trace domain");
    }
    if (env.window_mode == WindowMode::Strict) {
        const double need = t1 + horizon(f);
        if (need > tr.end_time() * (1 + 1e-12)) {
            throw DomainError("formula horizon " + format_number(horizon(f)) + " s exceeds the trace end");
        }
    }
}

} // namespace

double RobustnessSignal::at(double t) const
{
    return interpolate(times, values, t);
}

RobustnessSignal robustness_signal(const StlFormula& f, const EvalEnvironment& env, double t0, double t1)
{
    check_time(f, env, t0, t1);
    Evaluator ev(env);
    auto pl = ev.rob(f, t0, t1);
    return {std::move(pl.t), std::move(pl.v)};
}

double robustness(const StlFormula& f, const EvalEnvironment& env, double t)
{
    check_time(f, env, t, t);
    Evaluator ev(env);
    return pl_at(ev.rob(f, t, t), t);
}

std::vector<TimeInterval> satisfaction_set(const StlFormula& f, const EvalEnvironment& env, double t0, double t1)
{
    check_time(f, env, t0, t1);
    Evaluator ev(env);
    return ev.sat(f, t0, t1);
}

bool eval_bool(const StlFormula& f, const EvalEnvironment& env, double t)
{
    check_time(f, env, t, t);
    Evaluator ev(env);
    auto s = ev.sat(f, t, t);
    return std::any_of(s.begin(), s.end(), [t](const TimeInterval& iv) { return iv.contains(t); });
}

// ---------------------------------------------------------------------------
// Conjuncts and monitoring

namespace
{

std::vector<FormulaPtr> split(const FormulaPtr& f)
{
    auto all_labeled = [](const std::vector<FormulaPtr>& parts) {
        return std::all_of(parts.begin(), parts.end(), [](const FormulaPtr& p) { return !p->label.empty(); });
    };
    if (f->kind == StlKind::And) {
        auto parts = split(f->left);
        auto rest  = split(f->right);
        parts.insert(parts.end(), rest.begin(), rest.end());
        if (f->label.empty() || all_labeled(parts)) {
            return parts;
        }
        return {f};
    }
    if (f->kind == StlKind::Ev || f->kind == StlKind::Alw) {
        auto body = split(f->left);
        if (body.size() > 1 && all_labeled(body)) {
            std::vector<FormulaPtr> out;
            for (const auto& p : body) {
                auto wrapped = f->kind == StlKind::Ev ? StlFormula::eventually(f->lo, f->hi, p)
                                                      : StlFormula::always(f->lo, f->hi, p);
                out.push_back(StlFormula::labeled(wrapped, p->label));
            }
            return out;
        }
    }
    return {f};
}

} // namespace

std::vector<Conjunct> conjuncts(const FormulaPtr& f)
{
    std::vector<Conjunct> out;
    for (const auto& p : split(f)) {
        out.push_back({p->label.empty() ? to_string(*p) : p->label, p});
    }
    return out;
}

std::vector<std::string> MonitorResult::failing() const
{
    std::vector<std::string> names;
    for (const auto& c : per_conjunct) {
        if (!c.satisfied) {
            names.push_back(c.name);
        }
    }
    return names;
}

namespace
{

bool splittable(const FormulaPtr& body)
{
    const auto parts = split(body);
    return parts.size() > 1 &&
           std::all_of(parts.begin(), parts.end(), [](const FormulaPtr& p) { return !p->label.empty(); });
}

/// Time in the window where `body` is best satisfied; a satisfying time is preferred.
double witness_time(const StlFormula& body, const EvalEnvironment& env, double t0, double t1)
{
    const auto sig = robustness_signal(body, env, t0, t1);
    double best_t = t0, best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sig.times.size(); ++i) {
        if (sig.times[i] >= t0 && sig.times[i] <= t1 && sig.values[i] > best_v) {
            best_v = sig.values[i];
            best_t = sig.times[i];
        }
    }
    if (eval_bool(body, env, best_t)) {
        return best_t;
    }
    const auto set = satisfaction_set(body, env, t0, t1);
    if (set.empty()) {
        return best_t;
    }
    const auto& first = set.front();
    return first.lo_closed ? first.lo : 0.5 * (first.lo + first.hi);
}

void diagnose(const FormulaPtr& f, const EvalEnvironment& env, double t, std::vector<ConjunctResult>& out)
{
    const double end = env.trace->times().back();
    if (f->kind == StlKind::And && (f->label.empty() || splittable(f))) {
        diagnose(f->left, env, t, out);
        diagnose(f->right, env, t, out);
        return;
    }
    else if (f->kind == StlKind::Alw && splittable(f->left)) {
        // Always distributes over conjunction.
        for (const auto& p : split(f->left)) {
            const auto wrapped = StlFormula::always(f->lo, f->hi, p);
            out.push_back({p->label, eval_bool(*wrapped, env, t), robustness(*wrapped, env, t), t});
        }
        return;
    }
    else if (f->kind == StlKind::Ev && splittable(f->left) && t + f->lo <= end) {
        // Eventually does not distribute: judge every conjunct at one witness time.
        diagnose(f->left, env, witness_time(*f->left, env, t + f->lo, std::min(t + f->hi, end)), out);
        return;
    }
    out.push_back({f->label.empty() ? to_string(*f) : f->label, eval_bool(*f, env, t), robustness(*f, env, t), t});
}

} // namespace

MonitorResult monitor(const FormulaPtr& f, const EvalEnvironment& env, double t)
{
    MonitorResult r;
    r.formula    = f->label.empty() ? to_string(*f) : f->label;
    r.time       = t;
    r.satisfied  = eval_bool(*f, env, t);
    r.robustness = robustness(*f, env, t);
    diagnose(f, env, t, r.per_conjunct);
    return r;
}

// ---------------------------------------------------------------------------
// Iron specification

Box published_variable_bounds()
{
    Box b;
    b.set("Fe", {3.5e-8, 2e-6});
    b.set("TfR1", {1.0e-8, 8.7e-8});
    b.set("FPN1a", {1.04e-13, 1.0e-5});
    b.set("Ft", {1.0e-13, 1.0e-5});
    b.set("IRP", {3.0e-9, 1.07e-8});
    return b;
}

namespace
{

/// Scientific notation with the shortest mantissa, e.g. 3.0e-9 or 1.07e-8.
std::string sci(double v, bool force_point)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    std::string s(buf, res.ptr);
    auto e       = s.find('e');
    auto mant    = s.substr(0, e);
    auto expo    = std::stoi(s.substr(e + 1));
    if (force_point && mant.find('.') == std::string::npos) {
        mant += ".0";
    }
    return mant + "e" + std::to_string(expo);
}

Interval bound(const Box& b, const char* name)
{
    if (!b.contains(name)) {
        throw ConfigError(std::string("iron specification: missing bound for ") + name);
    }
    return b[name];
}

} // namespace

FormulaLibrary build_iron_spec(const Box& bounds, const IronSpecOptions& options)
{
    FormulaLibrary lib;
    const char* steady_vars[] = {"Fe", "Ft", "FPN1a", "IRP", "TfR1"};
    for (int k = 0; k < 5; ++k) {
        const std::string v = steady_vars[k];
        lib.define("phi_S" + std::to_string(k + 1), "abs(ddt{" + v + "}[t] / " + v + "[t]) < 1.0e-4");
    }
    const auto fe = bound(bounds, "Fe");
    lib.define("phi_S6", "(" + sci(fe.lo, true) + " < Fe[t])");
    const char* ranged[] = {"IRP", "TfR1", "FPN1a", "Ft"};
    for (int k = 0; k < 4; ++k) {
        const auto x = bound(bounds, ranged[k]);
        const std::string v = ranged[k];
        lib.define("phi_S" + std::to_string(k + 7),
                   "(" + sci(x.lo, true) + " < " + v + "[t]) and (" + v + "[t] < " + sci(x.hi, true) + ")");
    }
    lib.define("phi_S11", "IRP[t] < theta_IRP_Ft");
    lib.define("phi_S12", "Fe[t] > theta_Fe_IRP");
    lib.define("phi_S13", "IRP[t] < theta_IRP_FPN1a");
    lib.define("phi_S14", "k_Fe_cons > k_Fe_export*FPN1a[t]");
    lib.define("phi_P1", "k_IRP_FPN1a <= k_FPN1a_prod");
    lib.define("phi_P2", "k_IRP_Ft <= k_Ft_prod");
    lib.define("phi_P3", "k_Ft_prod*0.95 <= k_IRP_Ft");
    lib.define("phi_B1", "ev_[6*3600, inf] (alw_[0, 10*3600] ((phi_S1) and (Fe[t] > " +
                             format_number(options.plateau_factor) + "*Fe[4*3600])))");
    lib.define("phi_B2", "alw (Fe[t] < " + sci(fe.hi, false) + ")");

    std::string body = "phi_S14";
    for (int k = 13; k >= 1; --k) {
        body = "phi_S" + std::to_string(k) + " and (" + body + ")";
    }
    lib.define("phi_Sall", "ev_[0, 6*3600] (alw_[0, 3600] (" + body + "))");
    lib.define("phi_BPall", "phi_P1 and (phi_P2 and (phi_P3 and (phi_B1 and phi_B2)))");
    lib.define("phi_all", "(phi_Sall) and (phi_BPall)");
    return lib;
}

} // namespace ironspec
