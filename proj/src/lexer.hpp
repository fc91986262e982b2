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

#include "ironspec/errors.hpp"
#include "ironspec/expr.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ironspec::detail
{

enum class Tok
{
    Number,
    Ident,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    double number = 0;
    int line      = 1;
    int column    = 1;
};

std::vector<Token> tokenize(std::string_view src, int first_line = 1);

const char* describe(Tok t);

/// Recursive-descent parser for the arithmetic layer; STL and constraint parsers extend it.
class ExprParser
{
public:
    ExprParser(std::vector<Token> tokens, bool allow_signals)
        : m_tokens(std::move(tokens))
        , m_allow_signals(allow_signals)
    {
    }

    ExprPtr parse_expr();

    /// Parses an expression and requires it to fold to a literal.
    double parse_constant();

protected:
    const Token& peek(std::size_t k = 0) const
    {
        auto i = std::min(m_pos + k, m_tokens.size() - 1);
        return m_tokens[i];
    }
    bool at(Tok t) const
    {
        return peek().kind == t;
    }
    bool at_ident(std::string_view s) const
    {
        return peek().kind == Tok::Ident && peek().text == s;
    }
    Token take()
    {
        Token t = peek();
        if (m_pos < m_tokens.size() - 1) {
            ++m_pos;
        }
        return t;
    }
    Token expect(Tok t);
    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const;

    std::vector<Token> m_tokens;
    std::size_t m_pos = 0;
    bool m_allow_signals;

private:
    ExprPtr parse_term();
    ExprPtr parse_unary();
    ExprPtr parse_atom();
    std::optional<double> parse_time_index();
};

} // namespace ironspec::detail
