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

#include "rguard/margin.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "rguard/smoothing.h"

namespace rguard {

bool ReferenceIndex::has_label(const Label& label) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const IndexEntry& e) { return e.label == label; });
}

ReferenceIndex build_index(std::vector<IndexEntry> gallery, NormBound bound) {
  if (gallery.empty()) throw_error(ErrorCode::kInvalidParameter, "reference gallery is empty");
  std::sort(gallery.begin(), gallery.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.id < b.id; });
  const std::size_t dim = gallery.front().embedding.size();
  std::set<Label> labels;
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const auto& e = gallery[i];
    if (i > 0 && e.id == gallery[i - 1].id) {
      throw_error(ErrorCode::kInvalidParameter, "duplicate gallery id '" + e.id + "'");
    }
    if (e.embedding.size() != dim) {
      std::ostringstream os;
      os << "gallery entry '" << e.id << "' has dimension " << e.embedding.size() << ", expected " << dim;
      throw_error(ErrorCode::kDimensionMismatch, os.str());
    }
    validate_norm(e.embedding, bound);
    labels.insert(e.label);
  }
  return ReferenceIndex(std::move(gallery), dim, labels.size(), bound);
}

MarginResult minimum_margin(const EmbeddingVector& query, const Label& label, const ReferenceIndex& index) {
  if (query.size() != index.dim()) {
    std::ostringstream os;
    os << "query dimension " << query.size() << " does not match index dimension " << index.dim();
    throw_error(ErrorCode::kDimensionMismatch, os.str());
  }
  const IndexEntry* same = nullptr;
  const IndexEntry* other = nullptr;
  double same_dist = 0.0;
  double other_dist = 0.0;
  for (const auto& e : index.entries()) {
    const double dist = l2_distance(query, e.embedding);
    if (e.label == label) {
      if (same == nullptr || dist < same_dist) {
        same = &e;
        same_dist = dist;
      }
    } else if (other == nullptr || dist < other_dist) {
      other = &e;
      other_dist = dist;
    }
  }
  if (same == nullptr) {
    throw_error(ErrorCode::kMissingLabel, "label '" + label + "' has no entries in the reference set");
  }
  if (other == nullptr) {
    throw_error(ErrorCode::kMissingLabel,
                "reference set has no entries with a label other than '" + label + "'");
  }
  return MarginResult{other_dist - same_dist, Neighbor{same->id, same_dist}, Neighbor{other->id, other_dist}};
}

double margin_lower_bound(double d_hat, NormBound bound, std::size_t k, std::uint64_t n, double alpha) {
  if (!std::isfinite(d_hat)) throw_error(ErrorCode::kInvalidParameter, "d_hat must be finite");
  return d_hat - 4.0 * chernoff_epsilon(bound, k, n, alpha / 4.0);
}

}  // namespace rguard
