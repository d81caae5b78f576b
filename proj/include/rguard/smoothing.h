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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rguard/embedding.h"
#include "rguard/models.h"

namespace rguard {

inline constexpr std::size_t kDefaultBatchSize = 1024;

struct SmoothingConfig {
  double sigma = 0.0;
  std::uint64_t n = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::size_t batch_size = kDefaultBatchSize;

  /// Throws kInvalidParameter unless sigma > 0, n >= 1, 0 < alpha < 1 and
  /// batch_size >= 1.
  void validate() const;
};

struct SmoothedEstimate {
  EmbeddingVector g_hat;
  std::uint64_t n_used = 0;
  double epsilon = 0.0;
};

/// High-probability L2 error of the n-sample mean of norm-<=F vectors in
/// R^k: sqrt(8 F^2 ln((k+1)/alpha) / (3n)).
double chernoff_epsilon(NormBound bound, std::size_t k, std::uint64_t n, double alpha);

/// `count` i.i.d. N(0, sigma^2 I_d) vectors. Coordinate j of draw i is
/// sigma * normal(i*d + j) of the (seed, stream_id) stream.
std::vector<InputVector> sample_gaussian(std::size_t d, double sigma, std::size_t count,
                                         std::uint64_t seed, std::string_view stream_id);

/// Monte-Carlo estimate of g(x) = E[h(x + z)], z ~ N(0, sigma^2 I). The n
/// base embeddings are streamed in batches of cfg.batch_size; each batch
/// keeps its own compensated partial sums and the partials are merged in
/// ascending batch order.
SmoothedEstimate smooth_embed_mc(const BaseModel& model, const InputVector& x,
                                 const SmoothingConfig& cfg, std::string_view stream_id);

}  // namespace rguard
