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

#include "ironspec/parameters.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace ironspec
{

/// Row-major 5x5 matrix, rows/columns in Species order; entry [i][j] = d(dx_i/dt)/dx_j.
using Matrix5 = std::array<std::array<double, num_species>, num_species>;

struct SteadyState {
    StateVector state{};
    Matrix5 jacobian{};
    std::array<double, num_species> eigenvalues{};
    bool stable = false;
    /// Fe > theta_Fe_IRP and IRP below both IRP thresholds, i.e. the step-function
    /// regime used to derive the closed form actually holds at `state`.
    bool regime_consistent = false;
};

/**
 * Closed-form iron-replete equilibrium, obtained with sig+(Fe) = 1 and
 * sig+(IRP) = 0. Throws DegenerateParametersError if a denominator vanishes.
 */
SteadyState steady_state(const ParameterSet& params, double tf_sat);

/// Jacobian of the regime-approximated system (upper triangular).
Matrix5 jacobian_at(const ParameterSet& params, const StateVector& state);

/// Jacobian of the full sigmoidal system, input taken from params.Tf_sat.
Matrix5 jacobian_full(const ParameterSet& params, const StateVector& state);

struct StabilityReport {
    bool stable = false;
    std::array<double, num_species> eigenvalues{};
};

/// Eigenvalues read off the diagonal of the triangular regime Jacobian.
StabilityReport stability(const ParameterSet& params);

struct SignedArc {
    std::size_t from;
    std::size_t to;
    int sign; // +1 or -1
};

struct SignedDigraph {
    std::vector<std::string> nodes;
    std::vector<SignedArc> arcs;

    /// Graphviz DOT with a `sign` attribute on each edge.
    void write_dot(std::ostream& os) const;
};

/**
 * Signed interaction graph of the full sigmoidal system. An arc j -> i
 * exists when the Jacobian entry (i, j) is structurally nonzero; the sign
 * comes from the term structure and does not depend on the state.
 */
SignedDigraph interaction_graph(const ParameterSet& params);

struct Circuit {
    std::vector<std::size_t> nodes; // first node is the smallest index; closes back to it
    int sign;
};

/// All elementary circuits (self-loops included), sign = product of arc signs.
std::vector<Circuit> enumerate_circuits(const SignedDigraph& graph);

std::string format_circuit(const SignedDigraph& graph, const Circuit& circuit);

} // namespace ironspec
