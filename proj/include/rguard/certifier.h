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
#include <string>
#include <vector>

#include "rguard/embedding.h"
#include "rguard/margin.h"
#include "rguard/models.h"
#include "rguard/smoothing.h"

namespace rguard {

/// Upper bound on ||g(x) - g(y)|| for the Gaussian-smoothed model when
/// ||x - y|| = dist: 2F (Phi(dist / 2 sigma) - Phi(-dist / 2 sigma)).
/// Attained by the sign model at y = -x.
double lipschitz_bound_tight(double dist, double sigma, NormBound bound);

/// Linearization of the tight bound: F sqrt(2 / (pi sigma^2)) dist.
double lipschitz_bound_loose(double dist, double sigma, NormBound bound);

/// 2 sigma Phi^-1(1/2 + d / 8F), the L2 radius within which the 1-NN score
/// of the smoothed model cannot change given margin d.
///
/// Throws kDomain for d <= 0 (the caller must reject instead) and
/// kInvalidParameter for d > 2F (+1e-9), which no F-bounded embedding can
/// produce.
double certified_radius(double d, double sigma, NormBound bound);

enum class CertStatus {
  kCertified,     // d_lower > 0, radius > 0
  kRejected,      // d_hat > 0 but d_lower <= 0
  kNotRetrieved,  // d_hat <= 0, retrieval score 0
};

const char* cert_status_token(CertStatus status);

inline constexpr double kRejectedRadius = -1.0;

struct CertificationRecord {
  std::string query_id;
  Label label;
  CertStatus status = CertStatus::kNotRetrieved;
  double d_hat = 0.0;
  double d_lower = 0.0;
  double radius = kRejectedRadius;  // -1 unless certified
  std::string nn_same_id;
  std::string nn_other_id;
  // Configuration the record was produced under.
  double sigma = 0.0;
  std::uint64_t n = 0;
  double alpha = 0.0;
  double norm_bound = 0.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  bool certified() const { return status == CertStatus::kCertified; }
};

/// Turns one query's estimated margin into a record: computes d_lower and
/// either the certified radius or a rejection.
CertificationRecord certify_margin(const std::string& query_id, const Label& label, const MarginResult& margin,
                                   const SmoothingConfig& cfg, NormBound bound, std::size_t k);

/// Smoothed estimates for a batch of samples, each on its own stream
/// "<role>/<id>". Runs in parallel across samples.
std::vector<EmbeddingVector> estimate_embeddings(std::span<const LabeledSample> samples, const BaseModel& model,
                                                 const SmoothingConfig& cfg, const std::string& role,
                                                 std::size_t workers = 0);

/// Full certification pass: smooth every gallery and query sample, index
/// the gallery estimates, then compute margin, lower bound and radius per
/// query. Records come back in query order. Errors carry the offending
/// sample id.
std::vector<CertificationRecord> certify_dataset(std::span<const LabeledSample> queries, const BaseModel& model,
                                                 std::span<const LabeledSample> gallery,
                                                 const SmoothingConfig& cfg, std::size_t workers = 0);

}  // namespace rguard
