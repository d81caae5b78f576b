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

#include "rguard/eval.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rguard/random.h"

namespace rguard {

RecallCurve recall_at_1_curve(std::span<const CertificationRecord> records, std::span<const double> radii,
                              bool exclude_rejected) {
  if (records.empty()) throw_error(ErrorCode::kInvalidParameter, "no certification records");
  if (radii.empty()) throw_error(ErrorCode::kInvalidParameter, "radius grid is empty");
  if (radii.front() != 0.0) throw_error(ErrorCode::kInvalidParameter, "radius grid must start at 0");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] >= radii[i - 1])) throw_error(ErrorCode::kInvalidParameter, "radius grid must be ascending");
  }

  RecallCurve curve;
  curve.radii.assign(radii.begin(), radii.end());
  curve.sample_count = records.size();
  if (exclude_rejected) {
    curve.sample_count = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const CertificationRecord& r) { return r.status != CertStatus::kRejected; }));
    if (curve.sample_count == 0) throw_error(ErrorCode::kDomain, "every record is rejected; denominator is empty");
  }
  curve.values.reserve(radii.size());
  const double n = static_cast<double>(curve.sample_count);
  for (double r : radii) {
    std::size_t hits = 0;
    for (const auto& rec : records) {
      if (rec.certified() && rec.radius > r) ++hits;
    }
    curve.values.push_back(static_cast<double>(hits) / n);
  }
  return curve;
}

std::vector<double> default_radius_grid(std::span<const CertificationRecord> records, std::size_t points) {
  std::vector<double> grid{0.0};
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& rec : records) {
    if (!rec.certified()) continue;
    lo = any ? std::min(lo, rec.radius) : rec.radius;
    hi = any ? std::max(hi, rec.radius) : rec.radius;
    any = true;
  }
  if (!any || points < 2) return grid;
  const double start = std::log(lo / 10.0);
  const double stop = std::log(hi);
  const std::size_t count = points - 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(std::exp(start + t * (stop - start)));
  }
  grid.back() = hi;
  return grid;
}

double rejected_ratio(std::span<const CertificationRecord> records, bool d_hat_positive_only) {
  if (records.empty()) throw_error(ErrorCode::kInvalidParameter, "no certification records");
  std::size_t denom = 0;
  std::size_t rejected = 0;
  for (const auto& rec : records) {
    if (d_hat_positive_only) {
      if (rec.d_hat > 0.0) {
        ++denom;
        if (rec.d_lower <= 0.0) ++rejected;
      }
    } else {
      ++denom;
      if (!rec.certified()) ++rejected;
    }
  }
  if (denom == 0) {
    throw_error(ErrorCode::kDomain, "rejected ratio undefined: no record has a positive estimated margin");
  }
  return static_cast<double>(rejected) / static_cast<double>(denom);
}

ReferenceIndex build_exact_index(std::span<const LabeledSample> gallery, const ExactSmoother& g, NormBound bound) {
  std::vector<IndexEntry> entries;
  entries.reserve(gallery.size());
  for (const auto& s : gallery) entries.push_back(IndexEntry{s.id, s.label, g(s.input)});
  return build_index(std::move(entries), bound);
}

std::size_t attack_sanity(const ExactSmoother& g, const InputVector& x, const CertificationRecord& record,
                          const ReferenceIndex& exact_index, std::size_t trials, std::uint64_t seed,
                          double scale) {
  if (!record.certified() || !(record.radius > 0.0)) {
    throw_error(ErrorCode::kInvalidParameter, "attack_sanity needs a certified record with radius > 0");
  }
  const std::size_t d = x.size();
  const double length = record.radius * scale;
  const CounterRng rng(seed, "attack/" + record.query_id);
  std::vector<double> dir(d);
  std::vector<double> moved(d);
  std::size_t flips = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    // Inverse-CDF draws are never exactly zero, so norm > 0.
    for (std::size_t j = 0; j < d; ++j) dir[j] = rng.normal(t * d + j);
    const double norm = l2_norm(dir);
    for (std::size_t j = 0; j < d; ++j) moved[j] = x[j] + length * dir[j] / norm;
    const MarginResult m = minimum_margin(g(InputVector(moved)), record.label, exact_index);
    if (!m.retrieved()) ++flips;
  }
  return flips;
}

}  // namespace rguard
