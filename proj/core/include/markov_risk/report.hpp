// Copyright 2026 The markov-risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "markov_risk/experiment.hpp"

namespace mkrisk {

inline constexpr std::string_view kCsvHeader =
    "experiment,k,n,delta,divergence,estimator,risk_mode,trials,mean_loss,stderr,theory_value,"
    "master_seed";

/// Rows sorted by (k, n, estimator, divergence); ties keep their input order.
std::vector<ResultRow> sorted_rows(std::vector<ResultRow> rows);

/// Header plus one line per row, sorted. Doubles use the shortest decimal
/// that reads back exactly; a NaN theory value is an empty field.
std::string to_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

/// Inverse of to_csv. Throws ValidationError on a malformed document.
std::vector<ResultRow> parse_csv(std::string_view text);

enum class PlotAxes { loglog, semilog };
PlotAxes parse_plot_axes(std::string_view token);

/// Standalone SVG: one solid polyline per measured curve, one dashed polyline
/// per theory curve. The x axis is n, or k when the rows share a single n.
/// semilog keeps x linear. Throws ValidationError for empty input or rows
/// from more than one experiment.
std::string to_svg(const std::vector<ResultRow>& rows, PlotAxes axes = PlotAxes::loglog);
void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path,
               PlotAxes axes = PlotAxes::loglog);

}  // namespace mkrisk
