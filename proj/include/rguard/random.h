// Copyright 2026 the retrievalguard authors
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

#include <array>
#include <cstdint>
#include <string_view>

namespace rguard {

/// Philox4x32-10 block function (Salmon et al.). Pure function of
/// (counter, key); used as the basis of every random stream in the engine.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (seed, stream id). Draw `i` depends
/// only on (seed, stream id, i), so draws may be produced in any order or
/// on any thread with identical results.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t bits(std::uint64_t index) const;

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const;

  /// Standard normal draw by inverse CDF of uniform(index).
  double normal(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace rguard
