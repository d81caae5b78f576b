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

#include "rguard/smoothing.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rguard/random.h"

namespace rguard {

void SmoothingConfig::validate() const {
  std::ostringstream os;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    os << "sigma must be positive and finite, got " << sigma;
  } else if (n < 1) {
    os << "n must be >= 1";
  } else if (!(alpha > 0.0 && alpha < 1.0)) {
    os << "alpha must lie in (0, 1), got " << alpha;
  } else if (batch_size < 1) {
    os << "batch_size must be >= 1";
  } else {
    return;
  }
  throw_error(ErrorCode::kInvalidParameter, os.str());
}

double chernoff_epsilon(NormBound bound, std::size_t k, std::uint64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 1), got " << alpha;
    throw_error(ErrorCode::kInvalidParameter, os.str());
  }
  if (n < 1 || k < 1) throw_error(ErrorCode::kInvalidParameter, "chernoff_epsilon needs n >= 1 and k >= 1");
  const double f = bound.value();
  const double log_term = std::log((static_cast<double>(k) + 1.0) / alpha);
  return std::sqrt(8.0 * f * f * log_term / (3.0 * static_cast<double>(n)));
}

std::vector<InputVector> sample_gaussian(std::size_t d, double sigma, std::size_t count,
                                         std::uint64_t seed, std::string_view stream_id) {
  if (d < 1 || count < 1) throw_error(ErrorCode::kInvalidParameter, "sample_gaussian needs d, count >= 1");
  if (!(sigma > 0.0)) throw_error(ErrorCode::kInvalidParameter, "sigma must be positive");
  const CounterRng rng(seed, stream_id);
  std::vector<InputVector> out;
  out.reserve(count);
  std::vector<double> z(d);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < d; ++j) z[j] = sigma * rng.normal(i * d + j);
    out.emplace_back(z);
  }
  return out;
}

SmoothedEstimate smooth_embed_mc(const BaseModel& model, const InputVector& x,
                                 const SmoothingConfig& cfg, std::string_view stream_id) {
  cfg.validate();
  const std::size_t d = model.input_dim();
  const std::size_t k = model.output_dim();
  if (x.size() != d) {
    std::ostringstream os;
    os << "input dimension " << x.size() << " does not match model input dimension " << d;
    throw_error(ErrorCode::kDimensionMismatch, os.str());
  }

  const CounterRng rng(cfg.seed, stream_id);
  std::vector<CompensatedSum> total(k);
  std::vector<CompensatedSum> partial(k);
  std::vector<double> point(d);
  std::vector<double> out(k);

  for (std::uint64_t start = 0; start < cfg.n; start += cfg.batch_size) {
    const std::uint64_t stop = std::min<std::uint64_t>(cfg.n, start + cfg.batch_size);
    std::fill(partial.begin(), partial.end(), CompensatedSum{});
    for (std::uint64_t i = start; i < stop; ++i) {
      for (std::size_t j = 0; j < d; ++j) point[j] = x[j] + cfg.sigma * rng.normal(i * d + j);
      model.embed_into(point, out);
      for (std::size_t r = 0; r < k; ++r) partial[r].add(out[r]);
    }
    for (std::size_t r = 0; r < k; ++r) total[r].merge(partial[r]);
  }

  std::vector<double> mean(k);
  const double count = static_cast<double>(cfg.n);
  for (std::size_t r = 0; r < k; ++r) mean[r] = total[r].value() / count;
  return SmoothedEstimate{EmbeddingVector(std::move(mean)), cfg.n,
                          chernoff_epsilon(model.bound(), k, cfg.n, cfg.alpha)};
}

}  // namespace rguard
