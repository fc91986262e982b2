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

// Random two-variable constraint systems, a grid oracle for their solution
// hull and sampled steady states of the iron system, shared by the unit tests
// and the acceptance binary.

#include "ironspec/interval.hpp"
#include "ironspec/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace interval_random
{

using namespace ironspec;
using Point = std::unordered_map<std::string, double>;

struct RandomSystem {
    std::vector<std::string> texts;
    std::vector<Constraint> constraints;
    Box box;
    std::vector<Point> points;
};

inline std::string describe(const RandomSystem& s)
{
    std::ostringstream os;
    for (const auto& t : s.texts) {
        os << t << "; ";
    }
    for (std::size_t i = 0; i < s.box.size(); ++i) {
        os << s.box.name(i) << " " << s.box[i] << " ";
    }
    return os.str();
}

/// Point value of a constraint-side expression.
inline double value(const Expr& e, const Point& p)
{
    switch (e.kind) {
    case ExprKind::Number: return e.number;
    case ExprKind::Name: return p.at(e.name);
    case ExprKind::Neg: return -value(*e.lhs, p);
    case ExprKind::Abs: return std::fabs(value(*e.lhs, p));
    case ExprKind::Add: return value(*e.lhs, p) + value(*e.rhs, p);
    case ExprKind::Sub: return value(*e.lhs, p) - value(*e.rhs, p);
    case ExprKind::Mul: return value(*e.lhs, p) * value(*e.rhs, p);
    case ExprKind::Div: return value(*e.lhs, p) / value(*e.rhs, p);
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

/// lhs - rhs at a point.
inline double residual(const Constraint& c, const Point& p)
{
    return value(*c.lhs, p) - value(*c.rhs, p);
}

inline bool satisfied(const Constraint& c, const Point& p)
{
    const double r = residual(c, p);
    switch (c.relation) {
    case Relation::Le: return r <= 0;
    case Relation::Ge: return r >= 0;
    default: return r == 0;
    }
}

/**
 * Hull of the solutions found on an n x n grid over a two-variable box.
 * Inequality systems are checked pointwise; a single equality is solved by
 * bisection on every grid edge where its residual changes sign. Returns an
 * empty box when no solution is found.
 */
inline Box grid_hull(const std::vector<Constraint>& cs, const Box& box, int n)
{
    std::vector<const Constraint*> equalities, inequalities;
    for (const auto& c : cs) {
        (c.relation == Relation::Eq ? equalities : inequalities).push_back(&c);
    }
    Box h;
    h.set(box.name(0), Interval::empty());
    h.set(box.name(1), Interval::empty());
    auto add = [&](double x, double y) {
        const Point p{{box.name(0), x}, {box.name(1), y}};
        for (const auto* c : inequalities) {
            if (!satisfied(*c, p)) {
                return;
            }
        }
        h[0] = hull(h[0], Interval::point(x));
        h[1] = hull(h[1], Interval::point(y));
    };
    auto coord = [&](std::size_t d, int i) {
        return box[d].lo + (box[d].hi - box[d].lo) * i / n;
    };
    auto point = [&](double x, double y) { return Point{{box.name(0), x}, {box.name(1), y}}; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double x = coord(0, i), y = coord(1, j);
            if (equalities.empty()) {
                add(x, y);
                continue;
            }
            const auto& eq = *equalities.front();
            const double r0 = residual(eq, point(x, y));
            if (r0 == 0) {
                add(x, y);
            }
            // Edges to the right and upward neighbours.
            for (int dir = 0; dir < 2; ++dir) {
                if ((dir == 0 && i == n) || (dir == 1 && j == n)) {
                    continue;
                }
                double a = dir == 0 ? x : y;
                double b = dir == 0 ? coord(0, i + 1) : coord(1, j + 1);
                auto at  = [&](double s) { return residual(eq, dir == 0 ? point(s, y) : point(x, s)); };
                double ra = r0, rb = at(b);
                if (!(ra * rb < 0)) {
                    continue;
                }
                for (int k = 0; k < 80; ++k) {
                    const double m  = 0.5 * (a + b);
                    const double rm = at(m);
                    if ((rm < 0) == (ra < 0)) {
                        a  = m;
                        ra = rm;
                    }
                    else {
                        b = m;
                    }
                }
                dir == 0 ? add(a, y) : add(x, a);
            }
        }
    }
    return h;
}

/// `outer` contains `inner` up to a slack of `rel` times the scale of each bound.
inline bool contains_with_slack(const Box& outer, const Box& inner, double rel)
{
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const auto& x = inner[i];
        if (x.is_empty()) {
            continue;
        }
        const auto& o = outer[inner.name(i)];
        const double s = rel * std::max({1.0, std::fabs(x.lo), std::fabs(x.hi)});
        if (o.lo > x.lo + s || o.hi < x.hi - s) {
            return false;
        }
    }
    return true;
}

inline double round2(double v)
{
    return std::round(v * 100) / 100;
}

inline std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Random box in [-4, 4]^2 with sides of length at least 0.5.
inline Box random_box(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-4, 4);
    Box b;
    for (const char* name : {"x", "y"}) {
        double lo = round2(u(rng)), hi = round2(u(rng));
        if (lo > hi) {
            std::swap(lo, hi);
        }
        hi = std::max(hi, lo + 0.5);
        b.set(name, {lo, hi});
    }
    return b;
}

/// Left-hand side templates in x and y.
inline std::string random_lhs(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_real_distribution<double> coef(-2, 2);
    const std::string a = num(round2(coef(rng))), b = num(round2(coef(rng)));
    switch (pick(rng)) {
    case 0: return a + "*x + " + b + "*y";
    case 1: return "x*y";
    case 2: return "x*x + y*y";
    case 3: return "abs(x - " + b + "*y)";
    case 4: return "x/(y + 5)";
    default: return a + "*x*y - y + " + b;
    }
}

inline RandomSystem random_inequality_system(std::mt19937_64& rng)
{
    RandomSystem s;
    s.box = random_box(rng);
    std::uniform_int_distribution<int> count(1, 3), coin(0, 1);
    std::uniform_real_distribution<double> rhs(-3, 3);
    for (int k = count(rng); k > 0; --k) {
        s.texts.push_back(random_lhs(rng) + (coin(rng) ? " <= " : " >= ") + num(round2(rhs(rng))));
        s.constraints.push_back(parse_constraint(s.texts.back()));
    }
    return s;
}

/**
 * Random system built around `n` points drawn in a random box: every
 * inequality right-hand side is relaxed by 1e-9 relative beyond the extreme
 * point value, and a single-point system may carry one equality through it.
 */
inline RandomSystem random_system_through_points(std::mt19937_64& rng, int n)
{
    RandomSystem s;
    s.box = random_box(rng);
    for (int i = 0; i < n; ++i) {
        s.points.push_back({{"x", std::uniform_real_distribution<double>(s.box[0].lo, s.box[0].hi)(rng)},
                            {"y", std::uniform_real_distribution<double>(s.box[1].lo, s.box[1].hi)(rng)}});
    }
    std::uniform_int_distribution<int> count(1, 3), coin(0, 1);
    for (int k = count(rng); k > 0; --k) {
        const auto lhs   = random_lhs(rng);
        const auto probe = parse_constraint(lhs + " = 0");
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : s.points) {
            const double v = value(*probe.lhs, p);
            lo             = std::min(lo, v);
            hi             = std::max(hi, v);
        }
        const double slack = 1e-9 * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)));
        if (n == 1 && k == 1 && coin(rng)) {
            s.texts.push_back(lhs + " = " + num(lo));
        }
        else if (coin(rng)) {
            s.texts.push_back(lhs + " <= " + num(hi + slack));
        }
        else {
            s.texts.push_back(lhs + " >= " + num(lo - slack));
        }
        s.constraints.push_back(parse_constraint(s.texts.back()));
    }
    return s;
}

inline Box random_sub_box(std::mt19937_64& rng, const Box& box)
{
    Box out;
    for (std::size_t i = 0; i < box.size(); ++i) {
        std::uniform_real_distribution<double> u(box[i].lo, box[i].hi);
        double a = u(rng), b = u(rng);
        out.set(box.name(i), {std::min(a, b), std::max(a, b)});
    }
    return out;
}

/// Parameters together with their regime-approximation steady state.
inline Point iron_point(const ParameterSet& p)
{
    Point out;
    for (const auto& info : parameter_table()) {
        out[std::string(info.name)] = p.*info.member;
    }
    const double irp_loss = p.k_IRP_deg + p.k_Fe_IRP;
    const double ft       = p.k_Ft_prod / p.k_Ft_deg;
    const double fpn      = p.k_FPN1a_prod / p.k_FPN1a_deg;
    const double irp      = p.k_IRP_prod / irp_loss;
    const double tfr1     = (p.k_TfR1_prod + p.k_IRP_TfR1 * irp) / p.k_TfR1_deg;
    const double fe       = p.k_Fe_input * tfr1 * p.Tf_sat / (p.k_Fe_export * fpn + p.k_Fe_cons);
    out["Ft"]             = ft;
    out["FPN1a"]          = fpn;
    out["IRP"]            = irp;
    out["TfR1"]           = tfr1;
    out["Fe"]             = fe;
    return out;
}

inline bool inside(const Box& box, const Point& p)
{
    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto it = p.find(box.name(i));
        if (it == p.end() || !box[i].contains(it->second)) {
            return false;
        }
    }
    return true;
}

/**
 * Rejection sampler for points of the iron system: parameters are drawn
 * log-uniformly within a decade of the reference set (clipped to the box),
 * thresholds uniformly inside the range left by the steady state.
 */
inline std::vector<Point> iron_feasible_points(std::mt19937_64& rng, const ConstraintSystem& sys, int n,
                                               int max_attempts = 2'000'000)
{
    std::vector<Point> out;
    std::uniform_real_distribution<double> decade(-1, 1), unit(0, 1);
    const auto ref = reference_parameters();
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < n; ++attempt) {
        auto p = ref;
        for (const auto& info : parameter_table()) {
            const std::string name(info.name);
            if (name == "Tf_sat" || name.rfind("theta_", 0) == 0 || !sys.box.contains(name)) {
                continue;
            }
            const auto& range = sys.box[name];
            double v          = (ref.*info.member) * std::pow(10.0, decade(rng));
            v                 = std::clamp(v, range.lo, range.hi);
            p.*info.member    = v;
        }
        auto pt = iron_point(p);
        if (!std::isfinite(pt["Fe"])) {
            continue;
        }
        auto pick = [&](const std::string& name, double lo, double hi) {
            const auto& range = sys.box[name];
            lo                = std::max(lo, range.lo);
            hi                = std::min(hi, range.hi);
            pt[name]          = lo + (hi - lo) * unit(rng);
            return lo <= hi;
        };
        if (!pick("theta_Fe_IRP", 0, pt["Fe"]) || !pick("theta_IRP_Ft", pt["IRP"], 1.0) ||
            !pick("theta_IRP_FPN1a", pt["IRP"], 1.0)) {
            continue;
        }
        if (!inside(sys.box, pt) || pt["k_Fe_cons"] < pt["k_Fe_export"] * pt["FPN1a"] * (1 + 1e-9)) {
            continue;
        }
        // Keep only points satisfying every constraint to 1e-9 relative.
        bool ok = true;
        for (const auto& c : sys.constraints) {
            const double l = value(*c.lhs, pt), r = value(*c.rhs, pt);
            const double tol = 1e-9 * std::max(std::fabs(l), std::fabs(r));
            ok = ok && (c.relation == Relation::Eq ? std::fabs(l - r) <= tol
                        : c.relation == Relation::Le ? l <= r + tol
                                                     : l >= r - tol);
        }
        if (ok) {
            out.push_back(std::move(pt));
        }
    }
    return out;
}

} // namespace interval_random
