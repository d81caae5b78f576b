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
#include <functional>
#include <string>

#include "rguard/embedding.h"
#include "rguard/models.h"

namespace rguard {

/// Closed-form smoothing of the sign model: F (Phi(x/sigma) - Phi(-x/sigma)).
double exact_smooth_sign(double x, double sigma, NormBound bound);

struct QuadratureOptions {
  double tol = 1e-8;
  // Gauss-Hermite stage: orders min_hermite, 2*min_hermite, ... up to
  // max_hermite nodes per axis; orders above 256 are rejected.
  std::size_t min_hermite = 8;
  std::size_t max_hermite = 256;
  // Standard-normal mass outside |z| <= truncation is 2 Phi(-9) ~ 2.3e-19.
  double truncation = 9.0;
  // Cap on Gauss-Kronrod panels per axis (15 nodes each, about 2^14 nodes).
  std::size_t max_panels = 1092;
};

enum class QuadratureMethod { kGaussHermite, kAdaptiveKronrod };

struct QuadratureResult {
  EmbeddingVector value;
  QuadratureMethod method = QuadratureMethod::kGaussHermite;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// g(x) = E[h(x + sigma z)], z ~ N(0, I_d), integrated deterministically.
///
/// First a tensor Gauss-Hermite rule whose order doubles until three
/// successive orders agree to within tol/2; smooth models finish here with
/// a few hundred nodes. Integrands that do not settle (the sign model's
/// jump, snapped tables) fall through to globally adaptive 15-point
/// Gauss-Kronrod integration over |z| <= truncation, iterated for d = 2.
/// Throws kUnsupported for d > 2 and when neither stage reaches opts.tol.
QuadratureResult exact_smooth_quadrature(const BaseModel& model, const InputVector& x, double sigma,
                                         const QuadratureOptions& opts = {});

using ExactSmoother = std::function<EmbeddingVector(const InputVector&)>;

/// Exact g for oracle-capable models: closed form for the sign model,
/// quadrature for any other model with d <= 2.
ExactSmoother make_exact_smoother(const BaseModel& model, double sigma, double tol = 1e-9);

struct OracleReport {
  std::string quantity;
  double oracle_value = 0.0;
  double engine_value = 0.0;
  double abs_deviation = 0.0;
  double rel_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Two-sided comparison: pass iff |engine - oracle| <= tolerance.
OracleReport compare(std::string quantity, double oracle_value, double engine_value, double tolerance);

/// One-sided comparison: pass iff engine <= oracle + tolerance.
OracleReport compare_at_most(std::string quantity, double bound_value, double engine_value, double tolerance);

struct LipschitzCheck {
  std::size_t pairs = 0;
  std::size_t violations = 0;  // pairs with lhs > bound + 1e-6
  double max_excess = 0.0;     // max over pairs of lhs - bound
  double min_slack = 0.0;      // min over pairs of bound - lhs
  OracleReport report;
};

/// Empirical check of ||g(x) - g(y)|| <= lipschitz_bound_tight(||x - y||).
/// Even-numbered trials use mirrored pairs (y = -x) where the sign model
/// meets the bound with equality; odd trials use random centers in
/// [-1, 1]^d. Distances are uniform in [0, 4 sigma].
LipschitzCheck verify_lipschitz_empirically(const BaseModel& model, double sigma, std::size_t trials,
                                            std::uint64_t seed, double quadrature_tol = 1e-9);

}  // namespace rguard
