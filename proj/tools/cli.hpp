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

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "markov_risk/experiment.hpp"

namespace mkrisk::cli {

/// Exit codes: 0 success, 2 invalid input, 1 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

/// Overlays the keys of a flat JSON object on `base`. Unknown keys and
/// ill-typed values raise ValidationError naming the key.
ExperimentConfig apply_json(const nlohmann::json& doc, ExperimentConfig base);

/// Reads and applies a config file; parse errors carry line and column.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Entry point shared by main() and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mkrisk::cli
