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

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mkrisk {

/// One step of the SplitMix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent 64-bit seed for substream `index` of `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// 64-bit FNV-1a hash of a name, used to key per-curve seeds.
std::uint64_t hash_name(std::string_view name);

/// Seeded random source. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; all transforms to doubles are done here rather
/// than through <random> distributions, whose algorithms vary by library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Generator for trial `index` under `master`. Identical arguments give
  /// identical streams regardless of how trials are scheduled.
  static Rng substream(std::uint64_t master, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Unit-rate exponential variate.
  double exponential();

  /// Index drawn from a row given by its cumulative sums. Never returns an
  /// index whose own probability mass is zero.
  std::size_t categorical(std::span<const double> cumulative);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mkrisk
