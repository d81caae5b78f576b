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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rguard/embedding.h"

namespace rguard {

enum class ModelKind { kSign1D, kLinear, kToyMlp, kTable };

const char* model_kind_name(ModelKind kind);

/// h(x) = F * sign(x) on R, with sign(0) = +1.
struct Sign1DParams {};

/// h(x) = W x + b. W is k x d, row-major. Outputs must stay inside the
/// F-ball; an output that leaves it is a norm-violation error.
struct LinearParams {
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Fixed random two-layer tanh network whose output is rescaled to norm F.
struct ToyMlpParams {
  std::uint64_t seed = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x d
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // k x hidden
  std::vector<double> b2;  // k
};

struct TableEntry {
  std::string id;
  InputVector input;
  EmbeddingVector embedding;
};

/// Precomputed embeddings. An input that is not bit-identical to a stored
/// input is an error unless snapping to the nearest stored input is enabled.
struct TableParams {
  std::vector<TableEntry> entries;  // sorted by id
  bool snap_to_nearest = false;
};

class BaseModel {
 public:
  using Params = std::variant<Sign1DParams, LinearParams, ToyMlpParams, TableParams>;

  static BaseModel sign1d(NormBound bound);
  static BaseModel linear(std::size_t input_dim, std::size_t output_dim,
                          std::vector<double> weights, std::vector<double> bias, NormBound bound);
  /// h(x) = c for every x in R^d (a Linear model with W = 0).
  static BaseModel constant(const EmbeddingVector& c, std::size_t input_dim, NormBound bound);
  static BaseModel table(std::vector<TableEntry> entries, NormBound bound, bool snap_to_nearest);
  static BaseModel toy_mlp(ToyMlpParams params, std::size_t input_dim, std::size_t output_dim,
                           NormBound bound);

  ModelKind kind() const;
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  NormBound bound() const { return bound_; }
  const Params& params() const { return params_; }

  EmbeddingVector embed(const InputVector& x) const;

  /// Allocation-free evaluation for hot loops. `x` must have input_dim()
  /// entries and `out` output_dim(); the norm bound is still enforced.
  void embed_into(std::span<const double> x, std::span<double> out) const;

  /// Table lookup by sample id; throws kUnsupported for other kinds.
  EmbeddingVector embed_id(const std::string& id) const;

 private:
  BaseModel(Params params, std::size_t input_dim, std::size_t output_dim, NormBound bound)
      : params_(std::move(params)), input_dim_(input_dim), output_dim_(output_dim), bound_(bound) {}

  void raw_embed(std::span<const double> x, std::span<double> out) const;

  Params params_;
  std::size_t input_dim_;
  std::size_t output_dim_;
  NormBound bound_;
};

/// Deterministic ToyMLP: weights drawn from a counter-based stream keyed by
/// `seed`, tanh hidden layer, output normalized to exactly F.
BaseModel make_toy_mlp(std::uint64_t seed, std::size_t input_dim, std::size_t output_dim,
                       std::size_t hidden, NormBound bound);

}  // namespace rguard
