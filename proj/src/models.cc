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

#include "rguard/models.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rguard/random.h"

namespace rguard {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << " dimension mismatch: got " << got << ", model expects " << want;
    throw_error(ErrorCode::kDimensionMismatch, os.str());
  }
}

void check_output_norm(std::span<const double> out, NormBound bound) {
  const double norm = l2_norm(out);
  if (!(norm <= bound.value() + kNormTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "embedding norm " << norm << " exceeds declared bound F=" << bound.value();
    throw_error(ErrorCode::kNormViolation, os.str());
  }
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSign1D: return "sign1d";
    case ModelKind::kLinear: return "linear";
    case ModelKind::kToyMlp: return "toy_mlp";
    case ModelKind::kTable: return "table";
  }
  return "unknown";
}

BaseModel BaseModel::sign1d(NormBound bound) { return BaseModel(Sign1DParams{}, 1, 1, bound); }

BaseModel BaseModel::linear(std::size_t input_dim, std::size_t output_dim,
                            std::vector<double> weights, std::vector<double> bias,
                            NormBound bound) {
  if (input_dim == 0 || output_dim == 0) {
    throw_error(ErrorCode::kInvalidParameter, "linear model dimensions must be >= 1");
  }
  if (weights.size() != input_dim * output_dim) {
    throw_error(ErrorCode::kDimensionMismatch, "linear weights must have k*d entries");
  }
  if (bias.empty()) bias.assign(output_dim, 0.0);
  check_dim(bias.size(), output_dim, "linear bias");
  detail::check_finite(weights, "linear weights");
  detail::check_finite(bias, "linear bias");
  return BaseModel(LinearParams{std::move(weights), std::move(bias)}, input_dim, output_dim, bound);
}

BaseModel BaseModel::constant(const EmbeddingVector& c, std::size_t input_dim, NormBound bound) {
  validate_norm(c, bound);
  return linear(input_dim, c.size(), std::vector<double>(input_dim * c.size(), 0.0), c.raw(), bound);
}

BaseModel BaseModel::table(std::vector<TableEntry> entries, NormBound bound, bool snap_to_nearest) {
  if (entries.empty()) throw_error(ErrorCode::kInvalidParameter, "table model needs at least one entry");
  std::sort(entries.begin(), entries.end(),
            [](const TableEntry& a, const TableEntry& b) { return a.id < b.id; });
  const std::size_t d = entries.front().input.size();
  const std::size_t k = entries.front().embedding.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].id == entries[i - 1].id) {
      throw_error(ErrorCode::kInvalidParameter, "duplicate table id '" + entries[i].id + "'");
    }
    check_dim(entries[i].input.size(), d, "table input");
    check_dim(entries[i].embedding.size(), k, "table embedding");
    validate_norm(entries[i].embedding, bound);
  }
  return BaseModel(TableParams{std::move(entries), snap_to_nearest}, d, k, bound);
}

BaseModel BaseModel::toy_mlp(ToyMlpParams p, std::size_t input_dim, std::size_t output_dim,
                             NormBound bound) {
  if (input_dim == 0 || output_dim == 0 || p.hidden == 0) {
    throw_error(ErrorCode::kInvalidParameter, "toy_mlp dimensions must be >= 1");
  }
  check_dim(p.w1.size(), p.hidden * input_dim, "toy_mlp w1");
  check_dim(p.b1.size(), p.hidden, "toy_mlp b1");
  check_dim(p.w2.size(), output_dim * p.hidden, "toy_mlp w2");
  check_dim(p.b2.size(), output_dim, "toy_mlp b2");
  return BaseModel(std::move(p), input_dim, output_dim, bound);
}

ModelKind BaseModel::kind() const {
  return static_cast<ModelKind>(params_.index());
}

void BaseModel::raw_embed(std::span<const double> x, std::span<double> out) const {
  const double f = bound_.value();
  std::visit(
      Overloaded{
          [&](const Sign1DParams&) { out[0] = x[0] >= 0.0 ? f : -f; },
          [&](const LinearParams& p) {
            for (std::size_t r = 0; r < output_dim_; ++r) {
              CompensatedSum acc;
              acc.add(p.bias[r]);
              for (std::size_t c = 0; c < input_dim_; ++c) acc.add(p.weights[r * input_dim_ + c] * x[c]);
              out[r] = acc.value();
            }
          },
          [&](const ToyMlpParams& p) {
            // Small fixed sizes; a stack buffer would be nicer but hidden is runtime.
            thread_local std::vector<double> act;
            act.resize(p.hidden);
            for (std::size_t h = 0; h < p.hidden; ++h) {
              double s = p.b1[h];
              for (std::size_t c = 0; c < input_dim_; ++c) s += p.w1[h * input_dim_ + c] * x[c];
              act[h] = std::tanh(s);
            }
            for (std::size_t r = 0; r < output_dim_; ++r) {
              double s = p.b2[r];
              for (std::size_t h = 0; h < p.hidden; ++h) s += p.w2[r * p.hidden + h] * act[h];
              out[r] = s;
            }
            const double norm = l2_norm(out);
            if (norm == 0.0) {
              std::fill(out.begin(), out.end(), 0.0);
              out[0] = f;
              return;
            }
            const double scale = f / norm;
            for (double& v : out) v *= scale;
          },
          [&](const TableParams& p) {
            const TableEntry* best = nullptr;
            double best_dist = 0.0;
            for (const auto& e : p.entries) {
              if (std::equal(x.begin(), x.end(), e.input.values().begin())) {
                best = &e;
                break;
              }
            }
            if (best == nullptr) {
              if (!p.snap_to_nearest) {
                throw_error(ErrorCode::kLookup,
                            "table model queried with an input that matches no stored id "
                            "(snap_to_nearest is disabled)");
              }
              for (const auto& e : p.entries) {
                const double dist = l2_distance(x, e.input.values());
                if (best == nullptr || dist < best_dist) {
                  best = &e;
                  best_dist = dist;
                }
              }
            }
            std::copy(best->embedding.values().begin(), best->embedding.values().end(), out.begin());
          },
      },
      params_);
}

void BaseModel::embed_into(std::span<const double> x, std::span<double> out) const {
  check_dim(x.size(), input_dim_, "input");
  check_dim(out.size(), output_dim_, "output buffer");
  raw_embed(x, out);
  check_output_norm(out, bound_);
}

EmbeddingVector BaseModel::embed(const InputVector& x) const {
  std::vector<double> out(output_dim_);
  embed_into(x.values(), out);
  return EmbeddingVector(std::move(out));
}

EmbeddingVector BaseModel::embed_id(const std::string& id) const {
  const auto* table = std::get_if<TableParams>(&params_);
  if (table == nullptr) {
    throw_error(ErrorCode::kUnsupported, std::string("embed_id is only defined for table models, not ") +
                                             model_kind_name(kind()));
  }
  auto it = std::lower_bound(table->entries.begin(), table->entries.end(), id,
                             [](const TableEntry& e, const std::string& key) { return e.id < key; });
  if (it == table->entries.end() || it->id != id) {
    throw_error(ErrorCode::kLookup, "table model has no entry for id '" + id + "'");
  }
  return it->embedding;
}

BaseModel make_toy_mlp(std::uint64_t seed, std::size_t input_dim, std::size_t output_dim,
                       std::size_t hidden, NormBound bound) {
  if (input_dim == 0 || output_dim == 0 || hidden == 0) {
    throw_error(ErrorCode::kInvalidParameter, "toy_mlp dimensions must be >= 1");
  }
  const CounterRng rng(seed, "toy_mlp/weights");
  std::uint64_t next = 0;
  auto draw = [&](std::size_t count, double scale) {
    std::vector<double> v(count);
    for (double& x : v) x = scale * rng.normal(next++);
    return v;
  };
  ToyMlpParams p;
  p.seed = seed;
  p.hidden = hidden;
  p.w1 = draw(hidden * input_dim, 1.0 / std::sqrt(static_cast<double>(input_dim)));
  p.b1 = draw(hidden, 0.1);
  p.w2 = draw(output_dim * hidden, 1.0 / std::sqrt(static_cast<double>(hidden)));
  p.b2 = draw(output_dim, 0.1);
  return BaseModel::toy_mlp(std::move(p), input_dim, output_dim, bound);
}

}  // namespace rguard
