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
#include "ironspec/expr.hpp"

#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace ironspec
{

ExprPtr Expr::make_number(double v)
{
    auto e    = std::make_shared<Expr>();
    e->kind   = ExprKind::Number;
    e->number = v;
    return e;
}

ExprPtr Expr::make_name(std::string name)
{
    auto e  = std::make_shared<Expr>();
    e->kind = ExprKind::Name;
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::make_signal(std::string var, std::optional<double> at)
{
    auto e  = std::make_shared<Expr>();
    e->kind = ExprKind::Signal;
    e->name = std::move(var);
    e->at   = at;
    return e;
}

ExprPtr Expr::make_derivative(std::string var, std::optional<double> at)
{
    auto e  = std::make_shared<Expr>();
    e->kind = ExprKind::Derivative;
    e->name = std::move(var);
    e->at   = at;
    return e;
}

ExprPtr Expr::make_unary(ExprKind kind, ExprPtr operand)
{
    auto e  = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs  = std::move(operand);
    return e;
}

ExprPtr Expr::make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs)
{
    auto e  = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs  = std::move(lhs);
    e->rhs  = std::move(rhs);
    return e;
}

std::string format_number(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace
{

int precedence(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
        return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
        return 2;
    case ExprKind::Neg:
        return 3;
    case ExprKind::Number:
        return e.number < 0 ? 3 : 4;
    default:
        return 4;
    }
}

std::string time_index(const Expr& e)
{
    return e.at ? "[" + format_number(*e.at) + "]" : "[t]";
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, bool parens)
{
    return parens ? "(" + print(e) + ")" : print(e);
}

std::string print(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::Number:
        return format_number(e.number);
    case ExprKind::Name:
        return e.name;
    case ExprKind::Signal:
        return e.name + time_index(e);
    case ExprKind::Derivative:
        return "ddt{" + e.name + "}" + time_index(e);
    case ExprKind::Neg:
        return "-" + wrap(*e.lhs, precedence(*e.lhs) <= 3);
    case ExprKind::Abs:
        return "abs(" + print(*e.lhs) + ")";
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
        const int p     = precedence(e);
        const char* op  = e.kind == ExprKind::Add ? " + " : e.kind == ExprKind::Sub ? " - "
                        : e.kind == ExprKind::Mul ? "*"
                                                  : "/";
        bool lparen = precedence(*e.lhs) < p;
        bool rparen = precedence(*e.rhs) <= p || precedence(*e.rhs) == 3;
        return wrap(*e.lhs, lparen) + op + wrap(*e.rhs, rparen);
    }
    }
    return {};
}

} // namespace

std::string to_string(const Expr& e)
{
    return print(e);
}

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case ExprKind::Number:
        return a.number == b.number || (std::isnan(a.number) && std::isnan(b.number));
    case ExprKind::Name:
        return a.name == b.name;
    case ExprKind::Signal:
    case ExprKind::Derivative:
        return a.name == b.name && a.at == b.at;
    case ExprKind::Neg:
    case ExprKind::Abs:
        return structurally_equal(*a.lhs, *b.lhs);
    default:
        return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    }
}

void collect_names(const Expr& e, std::set<std::string>& out)
{
    if (e.kind == ExprKind::Name) {
        out.insert(e.name);
    }
    if (e.lhs) {
        collect_names(*e.lhs, out);
    }
    if (e.rhs) {
        collect_names(*e.rhs, out);
    }
}

bool depends_on_time(const Expr& e)
{
    if (e.kind == ExprKind::Signal || e.kind == ExprKind::Derivative) {
        return !e.at.has_value();
    }
    return (e.lhs && depends_on_time(*e.lhs)) || (e.rhs && depends_on_time(*e.rhs));
}

// ---------------------------------------------------------------------------

namespace detail
{

const char* describe(Tok t)
{
    switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Eq: return "'='";
    case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view src, int first_line)
{
    std::vector<Token> out;
    int line = first_line, col = 1;
    std::size_t i = 0;
    auto is_ident_start = [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    auto is_ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        Token tok{Tok::End, {}, 0, line, col};
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) {
                ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) {
                    ++j;
                }
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                        ++i;
                    }
                }
            }
            tok.kind = Tok::Number;
            tok.text = std::string(src.substr(start, i - start));
            char* end = nullptr;
            tok.number = std::strtod(tok.text.c_str(), &end);
            if (end != tok.text.c_str() + tok.text.size()) {
                throw ParseError("malformed number '" + tok.text + "'", line, col);
            }
        }
        else if (is_ident_start(c)) {
            while (i < src.size() && is_ident_char(src[i])) {
                ++i;
            }
            tok.kind = Tok::Ident;
            tok.text = std::string(src.substr(start, i - start));
        }
        else {
            auto two = src.substr(i, 2);
            if (two == "<=") tok.kind = Tok::Le, i += 2;
            else if (two == ">=") tok.kind = Tok::Ge, i += 2;
            else if (two == "==") tok.kind = Tok::Eq, i += 2;
            else {
                switch (c) {
                case '(': tok.kind = Tok::LParen; break;
                case ')': tok.kind = Tok::RParen; break;
                case '[': tok.kind = Tok::LBracket; break;
                case ']': tok.kind = Tok::RBracket; break;
                case '{': tok.kind = Tok::LBrace; break;
                case '}': tok.kind = Tok::RBrace; break;
                case ',': tok.kind = Tok::Comma; break;
                case '+': tok.kind = Tok::Plus; break;
                case '-': tok.kind = Tok::Minus; break;
                case '*': tok.kind = Tok::Star; break;
                case '/': tok.kind = Tok::Slash; break;
                case '<': tok.kind = Tok::Lt; break;
                case '>': tok.kind = Tok::Gt; break;
                case '=': tok.kind = Tok::Eq; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
                }
                ++i;
            }
            tok.text = std::string(src.substr(start, i - start));
        }
        col += static_cast<int>(i - start);
        out.push_back(std::move(tok));
    }
    out.push_back({Tok::End, {}, 0, line, col});
    return out;
}

Token ExprParser::expect(Tok t)
{
    if (!at(t)) {
        fail(std::string("unexpected ") + (at(Tok::End) ? "end of input" : "'" + peek().text + "'"),
             {describe(t)});
    }
    return take();
}

void ExprParser::fail(const std::string& msg, std::vector<std::string> expected) const
{
    throw ParseError(msg, peek().line, peek().column, std::move(expected));
}

namespace
{

ExprPtr fold(ExprKind kind, ExprPtr l, ExprPtr r)
{
    if (l->kind == ExprKind::Number && r->kind == ExprKind::Number) {
        double a = l->number, b = r->number;
        switch (kind) {
        case ExprKind::Add: return Expr::make_number(a + b);
        case ExprKind::Sub: return Expr::make_number(a - b);
        case ExprKind::Mul: return Expr::make_number(a * b);
        case ExprKind::Div: return Expr::make_number(a / b);
        default: break;
        }
    }
    return Expr::make_binary(kind, std::move(l), std::move(r));
}

} // namespace

ExprPtr ExprParser::parse_expr()
{
    auto lhs = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
        auto kind = take().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
        lhs       = fold(kind, lhs, parse_term());
    }
    return lhs;
}

ExprPtr ExprParser::parse_term()
{
    auto lhs = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
        auto kind = take().kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
        lhs       = fold(kind, lhs, parse_unary());
    }
    return lhs;
}

ExprPtr ExprParser::parse_unary()
{
    if (at(Tok::Minus)) {
        take();
        auto operand = parse_unary();
        if (operand->kind == ExprKind::Number) {
            return Expr::make_number(-operand->number);
        }
        return Expr::make_unary(ExprKind::Neg, operand);
    }
    if (at(Tok::Plus)) {
        take();
        return parse_unary();
    }
    return parse_atom();
}

std::optional<double> ExprParser::parse_time_index()
{
    expect(Tok::LBracket);
    std::optional<double> at_time;
    if (at_ident("t") && peek(1).kind == Tok::RBracket) {
        take();
    }
    else {
        at_time = parse_constant();
    }
    expect(Tok::RBracket);
    return at_time;
}

ExprPtr ExprParser::parse_atom()
{
    if (at(Tok::Number)) {
        return Expr::make_number(take().number);
    }
    if (at(Tok::LParen)) {
        take();
        auto e = parse_expr();
        expect(Tok::RParen);
        return e;
    }
    if (at_ident("inf")) {
        take();
        return Expr::make_number(std::numeric_limits<double>::infinity());
    }
    if (at(Tok::Ident)) {
        const Token id = peek();
        if (id.text == "abs" && peek(1).kind == Tok::LParen) {
            take();
            take();
            auto e = parse_expr();
            expect(Tok::RParen);
            return Expr::make_unary(ExprKind::Abs, e);
        }
        if (id.text == "ddt" && peek(1).kind == Tok::LBrace) {
            if (!m_allow_signals) {
                fail("signal references are not allowed here");
            }
            take();
            take();
            auto var = expect(Tok::Ident).text;
            expect(Tok::RBrace);
            return Expr::make_derivative(var, parse_time_index());
        }
        if (peek(1).kind == Tok::LParen) {
            fail("unknown function '" + id.text + "'", {"abs"});
        }
        take();
        if (at(Tok::LBracket)) {
            if (!m_allow_signals) {
                fail("signal references are not allowed here");
            }
            return Expr::make_signal(id.text, parse_time_index());
        }
        return Expr::make_name(id.text);
    }
    fail(std::string("unexpected ") + (at(Tok::End) ? "end of input" : "'" + peek().text + "'"),
         {"number", "identifier", "'('", "'-'", "abs", "ddt"});
}

double ExprParser::parse_constant()
{
    if (at_ident("inf")) {
        take();
        return std::numeric_limits<double>::infinity();
    }
    auto e = parse_expr();
    if (e->kind != ExprKind::Number) {
        fail("expected a constant expression");
    }
    return e->number;
}

} // namespace detail
} // namespace ironspec
