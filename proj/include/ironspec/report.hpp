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

#include "ironspec/explore.hpp"
#include "ironspec/interval.hpp"
#include "ironspec/steady.hpp"
#include "ironspec/stl.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ironspec
{

/// Provenance written into every report header.
struct ReportContext {
    std::string command;
    std::string config_hash;
    /// Canonical configuration JSON; embedded verbatim when non-empty.
    std::string config;
    std::optional<std::uint64_t> seed;
};

// Each function returns a pretty-printed JSON document.

std::string steady_report(const SteadyState& ss, const SignedDigraph& graph, const std::vector<Circuit>& circuits,
                          const ReportContext& ctx);

std::string monitor_report(const MonitorResult& result, const ReportContext& ctx);

std::string simulation_report(const CutoffSummary& summary, std::size_t rows, const ReportContext& ctx);

std::string contraction_report(const Box& before, const Box& after, const std::vector<DeductionMatch>& matches,
                               std::size_t constraints, double seconds, const ReportContext& ctx);

std::string sensitivity_report(const SensitivityReport& report, const ReportContext& ctx);

std::string validation_report(const ValidationReport& report, const Box& box, const ReportContext& ctx);

/// {center, halfWidthsRel, frozen, validation} plus the box and round count.
std::string region_report(const RobustRegion& region, const ReportContext& ctx);

/// Writes `content` to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ironspec
