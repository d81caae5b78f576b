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

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rguard/error.h"

namespace rguard {

// Absolute slack allowed when checking ||e|| <= F.
inline constexpr double kNormTolerance = 1e-9;

/// Neumaier-compensated accumulator. Results depend only on the order in
/// which values are added, never on scheduling.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
void check_finite(std::span<const double> values, const char* what);
}  // namespace detail

/// A non-empty vector of finite reals. The tag keeps input-space and
/// embedding-space points from being mixed up.
template <class Tag>
class FiniteVector {
 public:
  FiniteVector() = default;

  explicit FiniteVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw_error(ErrorCode::kInvalidParameter, std::string(Tag::kName) + " must have dimension >= 1");
    }
    detail::check_finite(values_, Tag::kName);
  }

  FiniteVector(std::initializer_list<double> values)
      : FiniteVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& raw() const { return values_; }

  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

 private:
  std::vector<double> values_;
};

struct EmbeddingTag {
  static constexpr const char* kName = "embedding";
};
struct InputTag {
  static constexpr const char* kName = "input";
};

using EmbeddingVector = FiniteVector<EmbeddingTag>;
using InputVector = FiniteVector<InputTag>;

using Label = std::string;

struct LabeledSample {
  std::string id;
  Label label;
  InputVector input;
};

/// Maximum L2 norm F of a base model's outputs.
class NormBound {
 public:
  explicit NormBound(double value);
  double value() const { return value_; }

 private:
  double value_;
};

double l2_norm(std::span<const double> v);
double l2_distance(std::span<const double> a, std::span<const double> b);

inline double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return l2_distance(a.values(), b.values());
}

/// Returns `e` unchanged when ||e|| <= F + 1e-9, otherwise throws
/// kNormViolation with both numbers in the message.
const EmbeddingVector& validate_norm(const EmbeddingVector& e, NormBound bound);

/// Throws kInvalidParameter when `ids` contains a duplicate.
void check_unique_ids(std::span<const LabeledSample> samples);

}  // namespace rguard
