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
#include <string>
#include <vector>

#include "rguard/embedding.h"

namespace rguard {

struct IndexEntry {
  std::string id;
  Label label;
  EmbeddingVector embedding;
};

/// Exact (linear-scan) reference set. Entries are kept sorted by id so the
/// first minimum found during a scan is also the smallest-id minimum.
class ReferenceIndex {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  NormBound bound() const { return bound_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  bool has_label(const Label& label) const;
  std::size_t label_count() const { return label_count_; }

 private:
  friend ReferenceIndex build_index(std::vector<IndexEntry> gallery, NormBound bound);
  ReferenceIndex(std::vector<IndexEntry> entries, std::size_t dim, std::size_t labels, NormBound bound)
      : entries_(std::move(entries)), dim_(dim), label_count_(labels), bound_(bound) {}

  std::vector<IndexEntry> entries_;
  std::size_t dim_;
  std::size_t label_count_;
  NormBound bound_;
};

/// Validates dimensions, norms and id uniqueness. A single-label gallery is
/// accepted here; margin queries against it fail because R \ R_x is empty.
ReferenceIndex build_index(std::vector<IndexEntry> gallery, NormBound bound);

struct Neighbor {
  std::string id;
  double distance = 0.0;
};

struct MarginResult {
  double d_hat = 0.0;  // nn_other.distance - nn_same.distance
  Neighbor nn_same;
  Neighbor nn_other;

  /// 1-NN retrieval score: correct only on a strictly positive margin.
  bool retrieved() const { return d_hat > 0.0; }
};

/// Minimum margin of `query`: distance to the nearest other-label entry
/// minus distance to the nearest same-label entry.
MarginResult minimum_margin(const EmbeddingVector& query, const Label& label, const ReferenceIndex& index);

/// High-probability lower bound on the margin under the exact smoothed
/// model: d_hat - 4 * chernoff_epsilon(F, k, n, alpha / 4).
double margin_lower_bound(double d_hat, NormBound bound, std::size_t k, std::uint64_t n, double alpha);

}  // namespace rguard
