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
#include <span>
#include <vector>

#include "rguard/certifier.h"
#include "rguard/margin.h"
#include "rguard/oracle.h"

namespace rguard {

/// Recall@1(r) = (1/N) sum_i R1(x_i) [radius_i > r] on a radius grid.
/// Rejected and not-retrieved records stay in N and contribute 0; with
/// `exclude_rejected`, rejected records are dropped from N instead.
struct RecallCurve {
  std::vector<double> radii;
  std::vector<double> values;
  std::size_t sample_count = 0;
};

RecallCurve recall_at_1_curve(std::span<const CertificationRecord> records, std::span<const double> radii,
                              bool exclude_rejected = false);

/// {0} followed by `points - 1` geometrically spaced radii from
/// r_min / 10 to r_max over the certified records. Just {0} when nothing
/// is certified.
std::vector<double> default_radius_grid(std::span<const CertificationRecord> records, std::size_t points = 50);

/// With `d_hat_positive_only`: among records with d_hat > 0, the fraction
/// whose lower bound is <= 0 (throws when no record has d_hat > 0).
/// Without it: the fraction of all records that carry no certificate.
double rejected_ratio(std::span<const CertificationRecord> records, bool d_hat_positive_only);

/// Reference index over exact smoothed embeddings of `gallery`.
ReferenceIndex build_exact_index(std::span<const LabeledSample> gallery, const ExactSmoother& g, NormBound bound);

/// Falsification harness for a certificate: draws `trials` random
/// directions, scales each to ||delta|| = radius * scale and recomputes the
/// 1-NN score of x + delta under the exact smoothed model. Returns how many
/// perturbations lose the correct retrieval. With scale < 1 a sound
/// certificate gives 0.
std::size_t attack_sanity(const ExactSmoother& g, const InputVector& x, const CertificationRecord& record,
                          const ReferenceIndex& exact_index, std::size_t trials, std::uint64_t seed,
                          double scale = 1.0 - 1e-6);

}  // namespace rguard
