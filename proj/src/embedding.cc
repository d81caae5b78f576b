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

#include "rguard/embedding.h"

#include <sstream>
#include <unordered_set>

namespace rguard {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNormViolation: return "norm_violation";
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kMissingLabel: return "missing_label";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kLookup: return "lookup";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

namespace detail {
void check_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << what << " has non-finite entry at index " << i;
      throw_error(ErrorCode::kInvalidParameter, os.str());
    }
  }
}
}  // namespace detail

NormBound::NormBound(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "norm bound F must be positive and finite, got " << value;
    throw_error(ErrorCode::kInvalidParameter, os.str());
  }
}

double l2_norm(std::span<const double> v) {
  CompensatedSum acc;
  for (double x : v) acc.add(x * x);
  return std::sqrt(acc.value());
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << "dimension mismatch: " << a.size() << " vs " << b.size();
    throw_error(ErrorCode::kDimensionMismatch, os.str());
  }
  // (a-b)^2 == (b-a)^2 bit for bit, so the result is symmetric.
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc.add(diff * diff);
  }
  return std::sqrt(acc.value());
}

const EmbeddingVector& validate_norm(const EmbeddingVector& e, NormBound bound) {
  const double norm = l2_norm(e.values());
  if (norm > bound.value() + kNormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "embedding norm " << norm << " exceeds declared bound F=" << bound.value();
    throw_error(ErrorCode::kNormViolation, os.str());
  }
  return e;
}

void check_unique_ids(std::span<const LabeledSample> samples) {
  std::unordered_set<std::string> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.id).second) {
      throw_error(ErrorCode::kInvalidParameter, "duplicate sample id '" + s.id + "'");
    }
  }
}

}  // namespace rguard
