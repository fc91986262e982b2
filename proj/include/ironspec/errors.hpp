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

#include <stdexcept>
#include <string>
#include <vector>

namespace ironspec
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A function was called outside its mathematical domain.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Closed forms hit a zero denominator.
class DegenerateParametersError : public Error
{
public:
    using Error::Error;
};

class IntegrationError : public Error
{
public:
    IntegrationError(const std::string& what, double last_valid_time)
        : Error(what)
        , last_valid_time(last_valid_time)
    {
    }

    double last_valid_time;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& message, int line, int column, std::vector<std::string> expected = {})
        : Error(format(message, line, column, expected))
        , line(line)
        , column(column)
        , expected(std::move(expected))
    {
    }

    int line;
    int column;
    std::vector<std::string> expected;

private:
    static std::string format(const std::string& message, int line, int column,
                              const std::vector<std::string>& expected)
    {
        std::string s = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!expected.empty()) {
            s += " (expected one of:";
            for (const auto& e : expected) {
                s += " " + e;
            }
            s += ")";
        }
        return s;
    }
};

/// A formula or constraint references a name the environment does not bind.
class UnboundNameError : public Error
{
public:
    explicit UnboundNameError(const std::string& name)
        : Error("unbound name '" + name + "'")
        , name(name)
    {
    }

    std::string name;
};

/// Interval propagation proved the constraint system has no solution in the box.
class InfeasibleError : public Error
{
public:
    using Error::Error;
};

class NoValidPointError : public Error
{
public:
    NoValidPointError(const std::string& what, std::vector<std::string> search_trace)
        : Error(what)
        , search_trace(std::move(search_trace))
    {
    }

    std::vector<std::string> search_trace;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace ironspec
