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

#include "rguard/certifier.h"

#include <cmath>
#include <set>
#include <sstream>

#include "rguard/normal.h"
#include "rguard/parallel.h"

namespace rguard {

namespace {

void check_bound_args(double dist, double sigma) {
  if (!(dist >= 0.0) || std::isnan(dist)) {
    throw_error(ErrorCode::kInvalidParameter, "distance must be nonnegative");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw_error(ErrorCode::kInvalidParameter, "sigma must be positive and finite");
  }
}

}  // namespace

double lipschitz_bound_tight(double dist, double sigma, NormBound bound) {
  check_bound_args(dist, sigma);
  const double t = dist / (2.0 * sigma);
  // Phi(t) - Phi(-t) = erf(t / sqrt 2); erf keeps precision near t = 0.
  return 2.0 * bound.value() * std::erf(t * M_SQRT1_2);
}

double lipschitz_bound_loose(double dist, double sigma, NormBound bound) {
  check_bound_args(dist, sigma);
  return bound.value() * std::sqrt(2.0 / (M_PI * sigma * sigma)) * dist;
}

double certified_radius(double d, double sigma, NormBound bound) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw_error(ErrorCode::kInvalidParameter, "sigma must be positive and finite");
  }
  const double f = bound.value();
  if (!(d > 0.0)) {
    std::ostringstream os;
    os << "certified_radius requires a positive margin, got " << d << "; reject this sample";
    throw_error(ErrorCode::kDomain, os.str());
  }
  if (d > 2.0 * f + kNormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "margin " << d << " exceeds 2F = " << 2.0 * f << "; embeddings violate the norm bound";
    throw_error(ErrorCode::kInvalidParameter, os.str());
  }
  const double p = 0.5 + std::min(d, 2.0 * f) / (8.0 * f);
  return 2.0 * sigma * normal_quantile(p);
}

const char* cert_status_token(CertStatus status) {
  switch (status) {
    case CertStatus::kCertified: return "1";
    case CertStatus::kNotRetrieved: return "0";
    case CertStatus::kRejected: return "rejected";
  }
  return "?";
}

CertificationRecord certify_margin(const std::string& query_id, const Label& label, const MarginResult& margin,
                                   const SmoothingConfig& cfg, NormBound bound, std::size_t k) {
  CertificationRecord rec;
  rec.query_id = query_id;
  rec.label = label;
  rec.d_hat = margin.d_hat;
  rec.d_lower = margin_lower_bound(margin.d_hat, bound, k, cfg.n, cfg.alpha);
  rec.nn_same_id = margin.nn_same.id;
  rec.nn_other_id = margin.nn_other.id;
  rec.sigma = cfg.sigma;
  rec.n = cfg.n;
  rec.alpha = cfg.alpha;
  rec.norm_bound = bound.value();
  rec.k = k;
  rec.seed = cfg.seed;
  if (!margin.retrieved()) {
    rec.status = CertStatus::kNotRetrieved;
  } else if (rec.d_lower <= 0.0) {
    rec.status = CertStatus::kRejected;
  } else {
    rec.status = CertStatus::kCertified;
    rec.radius = certified_radius(rec.d_lower, cfg.sigma, bound);
  }
  return rec;
}

std::vector<EmbeddingVector> estimate_embeddings(std::span<const LabeledSample> samples, const BaseModel& model,
                                                 const SmoothingConfig& cfg, const std::string& role,
                                                 std::size_t workers) {
  cfg.validate();
  std::vector<EmbeddingVector> out(samples.size());
  parallel_for(
      samples.size(),
      [&](std::size_t i) {
        const auto& s = samples[i];
        try {
          out[i] = smooth_embed_mc(model, s.input, cfg, role + "/" + s.id).g_hat;
        } catch (const Error& e) {
          throw Error(e.code(), role + " sample '" + s.id + "': " + e.what());
        }
      },
      workers);
  return out;
}

std::vector<CertificationRecord> certify_dataset(std::span<const LabeledSample> queries, const BaseModel& model,
                                                 std::span<const LabeledSample> gallery,
                                                 const SmoothingConfig& cfg, std::size_t workers) {
  cfg.validate();
  check_unique_ids(queries);
  check_unique_ids(gallery);
  std::set<Label> gallery_labels;
  for (const auto& g : gallery) gallery_labels.insert(g.label);
  if (gallery_labels.size() < 2) {
    throw_error(ErrorCode::kMissingLabel, "gallery must contain at least two distinct labels");
  }
  for (const auto& q : queries) {
    if (!gallery_labels.contains(q.label)) {
      throw_error(ErrorCode::kMissingLabel,
                  "query sample '" + q.id + "': label '" + q.label + "' has no entries in the gallery");
    }
  }

  const auto gallery_hat = estimate_embeddings(gallery, model, cfg, "gallery", workers);
  const auto query_hat = estimate_embeddings(queries, model, cfg, "query", workers);

  std::vector<IndexEntry> entries;
  entries.reserve(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    entries.push_back(IndexEntry{gallery[i].id, gallery[i].label, gallery_hat[i]});
  }
  const ReferenceIndex index = build_index(std::move(entries), model.bound());

  std::vector<CertificationRecord> records(queries.size());
  parallel_for(
      queries.size(),
      [&](std::size_t i) {
        const auto& q = queries[i];
        try {
          const MarginResult margin = minimum_margin(query_hat[i], q.label, index);
          records[i] = certify_margin(q.id, q.label, margin, cfg, model.bound(), model.output_dim());
        } catch (const Error& e) {
          throw Error(e.code(), "query sample '" + q.id + "': " + e.what());
        }
      },
      workers);
  return records;
}

}  // namespace rguard
