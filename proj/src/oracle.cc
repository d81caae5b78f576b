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

#include "rguard/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rguard/certifier.h"
#include "rguard/normal.h"

namespace rguard {

double exact_smooth_sign(double x, double sigma, NormBound bound) {
  if (!(sigma > 0.0)) throw_error(ErrorCode::kInvalidParameter, "sigma must be positive");
  // Phi(t) - Phi(-t) = erf(t / sqrt 2)
  return bound.value() * std::erf(x / sigma * M_SQRT1_2);
}

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
// (QUADPACK qk15). Index 7 is the center node.
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5 and the center.
constexpr double kGaussWeights[4] = {0.129484966168869693270611432679082,
                                     0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975,
                                     0.417959183673469387755102040816327};

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kInnerTolScale = 0.25;
// The orthonormal recurrence overflows past this order.
constexpr std::size_t kMaxHermiteOrder = 256;

using VectorIntegrand = std::function<void(double, std::span<double>)>;

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> value;
  double error = 0.0;
};

struct Integral {
  std::vector<double> value;
  double error = 0.0;
  std::size_t evaluations = 0;
};

// One 15-point Gauss-Kronrod panel. The error estimate is QUADPACK's
// qk15 heuristic per component, combined in L2.
Panel eval_panel(const VectorIntegrand& f, std::size_t k, double a, double b, std::vector<double>& scratch,
                 std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  scratch.resize(15 * k);
  auto values = [&](std::size_t slot) { return std::span<double>(scratch.data() + slot * k, k); };
  double weights[15];
  double gauss_weights[15] = {};

  f(center, values(0));
  weights[0] = kKronrodWeights[7];
  gauss_weights[0] = kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double offset = half * kKronrodNodes[j];
    for (int side = 0; side < 2; ++side) {
      const std::size_t slot = 1 + 2 * j + side;
      f(side == 0 ? center - offset : center + offset, values(slot));
      weights[slot] = kKronrodWeights[j];
      if (j % 2 == 1) gauss_weights[slot] = kGaussWeights[j / 2];
    }
  }
  evals += 15;

  Panel p{a, b, std::vector<double>(k), 0.0};
  CompensatedSum err2;
  for (std::size_t r = 0; r < k; ++r) {
    double kronrod = 0.0;
    double gauss = 0.0;
    for (std::size_t s = 0; s < 15; ++s) {
      kronrod += weights[s] * values(s)[r];
      gauss += gauss_weights[s] * values(s)[r];
    }
    const double mean = 0.5 * kronrod;
    double asc = 0.0;
    for (std::size_t s = 0; s < 15; ++s) asc += weights[s] * std::fabs(values(s)[r] - mean);
    asc *= half;
    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    p.value[r] = half * kronrod;
    err2.add(err * err);
  }
  p.error = std::sqrt(err2.value());
  return p;
}

Integral integrate_adaptive(const VectorIntegrand& f, std::size_t k, double a, double b, double tol,
                            std::size_t max_panels) {
  Integral result;
  std::vector<double> scratch;
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::vector<Panel> heap;
  heap.push_back(eval_panel(f, k, a, b, scratch, result.evaluations));

  auto total_error = [&] {
    CompensatedSum s;
    for (const auto& p : heap) s.add(p.error);
    return s.value();
  };

  double err = total_error();
  while (err > tol && heap.size() < max_panels) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = std::move(heap.back());
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;  // panel can no longer be split in double precision
    }
    heap.push_back(eval_panel(f, k, worst.a, mid, scratch, result.evaluations));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(eval_panel(f, k, mid, worst.b, scratch, result.evaluations));
    std::push_heap(heap.begin(), heap.end(), by_error);
    err = total_error();
  }

  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<CompensatedSum> sums(k);
  for (const auto& p : heap) {
    for (std::size_t r = 0; r < k; ++r) sums[r].add(p.value[r]);
  }
  result.value.resize(k);
  for (std::size_t r = 0; r < k; ++r) result.value[r] = sums[r].value();
  result.error = err;
  return result;
}

void check_converged(double error, double tol) {
  if (!(error <= tol)) {
    std::ostringstream os;
    os << "quadrature error estimate " << error << " exceeds tolerance " << tol << " at the panel cap";
    throw_error(ErrorCode::kUnsupported, os.str());
  }
}

struct HermiteRule {
  std::vector<double> nodes;    // for the standard normal: sqrt(2) * physicists' nodes
  std::vector<double> weights;  // sum to 1
};

// Physicists' Gauss-Hermite nodes by Newton iteration on the orthonormal
// recurrence, rescaled to integrate against the standard normal density.
HermiteRule make_hermite_rule(std::size_t n) {
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^(-1/4)
  // Seeds from the Jacobi matrix eigenvalues (Golub-Welsch), then Newton on
  // the orthonormal recurrence for full precision nodes and weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (Eigen::Index j = 0; j < sub.size(); ++j) sub[j] = std::sqrt(0.5 * static_cast<double>(j + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> x(n), w(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Descending order, symmetric pairs handled separately.
    double z = eig.eigenvalues()[static_cast<Eigen::Index>(n - 1 - i)];
    if (2 * i + 1 > n) break;
    double deriv = 0.0;
    for (int it = 0; it < 20; ++it) {
      double p1 = kPiQuarterInv;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      deriv = std::sqrt(2.0 * nd) * p2;
      const double prev = z;
      z = prev - p1 / deriv;
      if (std::fabs(z - prev) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    if (2 * i + 1 == n) z = 0.0;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (deriv * deriv);
  }
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  constexpr double kInvSqrtPi = 0.564189583547756286948;
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = M_SQRT2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] * kInvSqrtPi;
  }
  return rule;
}

const HermiteRule& hermite_rule(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, HermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_hermite_rule(n)).first;
  return it->second;
}

std::vector<double> hermite_tensor(const BaseModel& model, const InputVector& x, double sigma,
                                   const HermiteRule& rule, std::size_t& evals) {
  const std::size_t d = model.input_dim();
  const std::size_t k = model.output_dim();
  const std::size_t n = rule.nodes.size();
  std::vector<CompensatedSum> acc(k);
  std::vector<double> point(d);
  std::vector<double> out(k);
  if (d == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      point[0] = x[0] + sigma * rule.nodes[i];
      model.embed_into(point, out);
      for (std::size_t r = 0; r < k; ++r) acc[r].add(rule.weights[i] * out[r]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        point[0] = x[0] + sigma * rule.nodes[i];
        point[1] = x[1] + sigma * rule.nodes[j];
        model.embed_into(point, out);
        const double w = rule.weights[i] * rule.weights[j];
        for (std::size_t r = 0; r < k; ++r) acc[r].add(w * out[r]);
      }
    }
  }
  evals += d == 1 ? n : n * n;
  std::vector<double> v(k);
  for (std::size_t r = 0; r < k; ++r) v[r] = acc[r].value();
  return v;
}

std::optional<QuadratureResult> gauss_hermite_doubling(const BaseModel& model, const InputVector& x, double sigma,
                                                       const QuadratureOptions& opts) {
  std::size_t evals = 0;
  std::vector<std::vector<double>> results;
  for (std::size_t n = std::max<std::size_t>(opts.min_hermite, 1); n <= opts.max_hermite; n *= 2) {
    results.push_back(hermite_tensor(model, x, sigma, hermite_rule(n), evals));
    const std::size_t m = results.size();
    if (m < 3) continue;
    const double last = l2_distance(results[m - 1], results[m - 2]);
    const double before = l2_distance(results[m - 2], results[m - 3]);
    if (last < 0.5 * opts.tol && before < 0.5 * opts.tol) {
      return QuadratureResult{EmbeddingVector(results.back()), QuadratureMethod::kGaussHermite, last, evals};
    }
  }
  return std::nullopt;
}

QuadratureResult adaptive_kronrod(const BaseModel& model, const InputVector& x, double sigma,
                                  const QuadratureOptions& opts) {
  const std::size_t d = model.input_dim();
  const std::size_t k = model.output_dim();
  const double lim = opts.truncation;
  // Integrand is bounded by F, so the truncated tails add at most this much.
  const double tail = 2.0 * normal_cdf(-lim) * model.bound().value() * static_cast<double>(d);
  std::size_t evals = 0;
  std::vector<double> point(d);
  std::vector<double> out(k);

  Integral total;
  double inner_error = 0.0;
  if (d == 1) {
    VectorIntegrand f = [&](double z, std::span<double> res) {
      point[0] = x[0] + sigma * z;
      model.embed_into(point, out);
      const double w = kInvSqrt2Pi * std::exp(-0.5 * z * z);
      for (std::size_t r = 0; r < k; ++r) res[r] = w * out[r];
    };
    total = integrate_adaptive(f, k, -lim, lim, 0.5 * opts.tol, opts.max_panels);
    evals = total.evaluations;
  } else {
    VectorIntegrand outer = [&](double z1, std::span<double> res) {
      VectorIntegrand inner = [&](double z2, std::span<double> r2) {
        point[0] = x[0] + sigma * z1;
        point[1] = x[1] + sigma * z2;
        model.embed_into(point, out);
        const double w = kInvSqrt2Pi * std::exp(-0.5 * z2 * z2);
        for (std::size_t r = 0; r < k; ++r) r2[r] = w * out[r];
      };
      // The inner result is resolved far below the outer tolerance so that
      // its panel layout, which changes with z1, does not show up as noise
      // the outer pass then tries to refine.
      Integral in = integrate_adaptive(inner, k, -lim, lim, kInnerTolScale * opts.tol, opts.max_panels);
      check_converged(in.error, kInnerTolScale * opts.tol);
      inner_error = std::max(inner_error, in.error);
      evals += in.evaluations;
      const double w = kInvSqrt2Pi * std::exp(-0.5 * z1 * z1);
      for (std::size_t r = 0; r < k; ++r) res[r] = w * in.value[r];
    };
    total = integrate_adaptive(outer, k, -lim, lim, 0.5 * opts.tol, opts.max_panels);
  }

  const double error = total.error + inner_error + tail;
  check_converged(error, opts.tol);
  return QuadratureResult{EmbeddingVector(std::move(total.value)), QuadratureMethod::kAdaptiveKronrod, error, evals};
}

}  // namespace

QuadratureResult exact_smooth_quadrature(const BaseModel& model, const InputVector& x, double sigma,
                                         const QuadratureOptions& opts) {
  const std::size_t d = model.input_dim();
  if (d > 2) {
    std::ostringstream os;
    os << "quadrature oracle supports input dimension 1 or 2, model has " << d;
    throw_error(ErrorCode::kUnsupported, os.str());
  }
  if (x.size() != d) throw_error(ErrorCode::kDimensionMismatch, "input dimension does not match model");
  if (!(sigma > 0.0)) throw_error(ErrorCode::kInvalidParameter, "sigma must be positive");
  if (!(opts.tol > 0.0)) throw_error(ErrorCode::kInvalidParameter, "quadrature tolerance must be positive");
  if (opts.min_hermite < 1 || opts.max_hermite > kMaxHermiteOrder) {
    throw_error(ErrorCode::kInvalidParameter, "Gauss-Hermite orders must lie in [1, 256]");
  }

  if (auto gh = gauss_hermite_doubling(model, x, sigma, opts)) return *std::move(gh);
  return adaptive_kronrod(model, x, sigma, opts);
}

ExactSmoother make_exact_smoother(const BaseModel& model, double sigma, double tol) {
  if (model.kind() == ModelKind::kSign1D) {
    const NormBound bound = model.bound();
    return [sigma, bound](const InputVector& x) {
      if (x.size() != 1) throw_error(ErrorCode::kDimensionMismatch, "sign model takes 1-D inputs");
      return EmbeddingVector{exact_smooth_sign(x[0], sigma, bound)};
    };
  }
  if (model.input_dim() > 2) {
    throw_error(ErrorCode::kUnsupported, "exact smoothing needs input dimension <= 2");
  }
  QuadratureOptions opts;
  opts.tol = tol;
  return [model, sigma, opts](const InputVector& x) {
    return exact_smooth_quadrature(model, x, sigma, opts).value;
  };
}

OracleReport compare(std::string quantity, double oracle_value, double engine_value, double tolerance) {
  OracleReport r;
  r.quantity = std::move(quantity);
  r.oracle_value = oracle_value;
  r.engine_value = engine_value;
  r.abs_deviation = std::fabs(engine_value - oracle_value);
  r.rel_deviation = oracle_value != 0.0 ? r.abs_deviation / std::fabs(oracle_value) : r.abs_deviation;
  r.tolerance = tolerance;
  r.pass = r.abs_deviation <= tolerance;
  return r;
}

OracleReport compare_at_most(std::string quantity, double bound_value, double engine_value, double tolerance) {
  OracleReport r;
  r.quantity = std::move(quantity);
  r.oracle_value = bound_value;
  r.engine_value = engine_value;
  r.abs_deviation = std::max(0.0, engine_value - bound_value);
  r.rel_deviation = bound_value != 0.0 ? r.abs_deviation / std::fabs(bound_value) : r.abs_deviation;
  r.tolerance = tolerance;
  r.pass = r.abs_deviation <= tolerance;
  return r;
}

LipschitzCheck verify_lipschitz_empirically(const BaseModel& model, double sigma, std::size_t trials,
                                            std::uint64_t seed, double quadrature_tol) {
  if (trials < 1) throw_error(ErrorCode::kInvalidParameter, "trials must be >= 1");
  const std::size_t d = model.input_dim();
  const ExactSmoother g = make_exact_smoother(model, sigma, quadrature_tol);
  constexpr double kViolationSlack = 1e-6;

  std::mt19937_64 gen(seed);
  auto uniform = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; };
  auto gaussian = [&] { return normal_quantile(uniform()); };

  LipschitzCheck check;
  check.pairs = trials;
  check.max_excess = -std::numeric_limits<double>::infinity();
  check.min_slack = std::numeric_limits<double>::infinity();
  double worst_bound = 0.0;
  double worst_lhs = 0.0;

  std::vector<double> dir(d);
  std::vector<double> center(d);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      dir[j] = gaussian();
      center[j] = (t % 2 == 0) ? 0.0 : 2.0 * uniform() - 1.0;
    }
    const double norm = l2_norm(dir);
    const double dist = 4.0 * sigma * uniform();
    std::vector<double> xs(d), ys(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double step = 0.5 * dist * dir[j] / norm;
      xs[j] = center[j] + step;
      ys[j] = center[j] - step;
    }
    const InputVector x(xs), y(ys);
    const double lhs = l2_distance(g(x), g(y));
    const double bound = lipschitz_bound_tight(l2_distance(x.values(), y.values()), sigma, model.bound());
    if (lhs > bound + kViolationSlack) ++check.violations;
    if (lhs - bound > check.max_excess) {
      check.max_excess = lhs - bound;
      worst_bound = bound;
      worst_lhs = lhs;
    }
    check.min_slack = std::min(check.min_slack, bound - lhs);
  }
  check.report = compare_at_most(std::string("lipschitz_tight/") + model_kind_name(model.kind()), worst_bound,
                                 worst_lhs, kViolationSlack);
  return check;
}

}  // namespace rguard
