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

#include <cstddef>
#include <functional>

namespace mkrisk {

/// Worker count from the RISK_WORKERS environment variable, falling back to
/// the number of hardware threads. Always at least 1.
std::size_t workers_from_env();

/// Runs body(0) .. body(count - 1) on up to `workers` threads. Each index runs
/// exactly once; callers write results into per-index slots and reduce in
/// index order afterwards. The first exception thrown by any body is
/// rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace mkrisk
