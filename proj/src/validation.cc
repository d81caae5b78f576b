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

#include "rguard/validation.h"

#include <cmath>
#include <string>

#include "rguard/certifier.h"
#include "rguard/io.h"
#include "rguard/models.h"
#include "rguard/normal.h"
#include "rguard/smoothing.h"

namespace rguard {

std::vector<OracleReport> run_oracle_suite(const OracleSuiteOptions& opts) {
  std::vector<OracleReport> reports;
  const NormBound unit(1.0);
  const BaseModel sign = BaseModel::sign1d(unit);
  const double sigma = 0.1;
  const double eps_scale = opts.inject_zero_epsilon ? 0.0 : 1.0;

  // Closed form vs quadrature.
  {
    QuadratureOptions q;
    q.tol = 1e-8;
    const double quad = exact_smooth_quadrature(sign, InputVector{0.1}, sigma, q).value[0];
    reports.push_back(compare("sign_smoothing/closed_form_vs_quadrature", exact_smooth_sign(0.1, sigma, unit),
                              quad, 1e-8));
  }

  // Equality case of the tight bound.
  for (double x : {0.01, 0.05, 0.1, 0.3}) {
    const double gap = exact_smooth_sign(x, sigma, unit) - exact_smooth_sign(-x, sigma, unit);
    reports.push_back(compare("sign_tightness/x=" + io::format_double(x),
                              lipschitz_bound_tight(2.0 * x, sigma, unit), std::fabs(gap), 1e-7));
  }

  // Empirical Lipschitz checks through quadrature / closed form.
  {
    const LipschitzCheck c = verify_lipschitz_empirically(sign, sigma, 1000, opts.seed);
    reports.push_back(c.report);
    reports.push_back(compare_at_most("lipschitz_tight/sign1d_min_slack", 0.0, c.min_slack, 1e-7));
  }
  {
    const BaseModel mlp = make_toy_mlp(7, 2, 2, 8, unit);
    reports.push_back(verify_lipschitz_empirically(mlp, 0.25, 200, opts.seed, 1e-7).report);
  }

  // Monte-Carlo concentration: fraction of trials beyond epsilon <= alpha.
  {
    SmoothingConfig cfg{sigma, 10000, 0.05, 0, kDefaultBatchSize};
    const double exact = exact_smooth_sign(0.1, sigma, unit);
    const double eps = eps_scale * chernoff_epsilon(unit, 1, cfg.n, cfg.alpha);
    const int trials = 200;
    int exceed = 0;
    for (int t = 0; t < trials; ++t) {
      cfg.seed = opts.seed * 1000003ull + static_cast<std::uint64_t>(t);
      const double est = smooth_embed_mc(sign, InputVector{0.1}, cfg, "oracle/concentration").g_hat[0];
      if (std::fabs(est - exact) > eps) ++exceed;
    }
    reports.push_back(compare_at_most("mc_concentration/exceed_fraction", cfg.alpha,
                                      static_cast<double>(exceed) / trials, 0.0));
  }

  // One large-n estimate against the closed form.
  {
    SmoothingConfig cfg{sigma, 1000000, 0.01, opts.seed, kDefaultBatchSize};
    const double est = smooth_embed_mc(sign, InputVector{0.1}, cfg, "oracle/large_n").g_hat[0];
    const double err = std::fabs(est - exact_smooth_sign(0.1, sigma, unit));
    reports.push_back(compare_at_most("mc_vs_closed_form/n=1e6",
                                      eps_scale * chernoff_epsilon(unit, 1, cfg.n, cfg.alpha), err, 0.0));
  }

  // Constants, against long-double evaluation of the same formulas.
  {
    const long double eps = std::sqrt(8.0L * std::log(129.0L / 0.01L) / (3.0L * 100000.0L));
    const long double corr = 4.0L * std::sqrt(8.0L * std::log(129.0L / 0.0025L) / (3.0L * 100000.0L));
    reports.push_back(compare("chernoff_epsilon/k=128,n=1e5,alpha=0.01", static_cast<double>(eps),
                              chernoff_epsilon(unit, 128, 100000, 0.01), 1e-12));
    reports.push_back(compare("margin_correction/k=128,n=1e5,alpha=0.01", static_cast<double>(corr),
                              0.5 - margin_lower_bound(0.5, unit, 128, 100000, 0.01), 1e-12));
  }
  {
    // 2 Phi^-1(3/4), from a 40-digit reference.
    reports.push_back(compare("certified_radius/d=2F,sigma=1", 1.3489795003921634864,
                              certified_radius(2.0, 1.0, unit), 1e-9));
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double p = 0.5 + (0.999999 - 0.5) * i / 10000.0;
      worst = std::max(worst, std::fabs(normal_cdf(normal_quantile(p)) - p));
    }
    reports.push_back(compare_at_most("normal_quantile/round_trip", 0.0, worst, 1e-8));
  }

  // Gaussian mean preserved by a linear model.
  {
    const BaseModel lin = BaseModel::linear(2, 2, {0.1, 0.02, -0.03, 0.1}, {0.2, -0.1}, unit);
    const InputVector x{0.3, -0.4};
    QuadratureOptions q;
    q.tol = 1e-9;
    const EmbeddingVector quad = exact_smooth_quadrature(lin, x, 0.1, q).value;
    const EmbeddingVector direct = lin.embed(x);
    reports.push_back(compare("linear_quadrature/mean_preserved", 0.0, l2_distance(quad, direct), 1e-9));
  }

  return reports;
}

}  // namespace rguard
