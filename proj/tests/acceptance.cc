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


// Acceptance run: one PASS/FAIL line per criterion 1-9. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rguard/certifier.h"
#include "rguard/cli.h"
#include "rguard/eval.h"
#include "rguard/io.h"
#include "rguard/models.h"
#include "rguard/normal.h"
#include "rguard/oracle.h"
#include "rguard/random.h"
#include "rguard/smoothing.h"

namespace {

using namespace rguard;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const NormBound kUnit(1.0);

Outcome tightness() {
  double worst = 0.0;
  for (double x : {0.01, 0.05, 0.1, 0.3}) {
    const double lhs = std::fabs(exact_smooth_sign(x, 0.1, kUnit) - exact_smooth_sign(-x, 0.1, kUnit));
    worst = std::max(worst, std::fabs(lhs - lipschitz_bound_tight(2 * x, 0.1, kUnit)));
  }
  return {worst <= 1e-7, "max |gap - tight| = " + fmt(worst)};
}

Outcome dominance() {
  const CounterRng rng(2026, "acceptance/dominance");
  std::size_t bad = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double dist = 2.0 * rng.uniform(3 * i);
    const double sigma = 0.05 + 0.95 * rng.uniform(3 * i + 1);
    const NormBound f(rng.uniform(3 * i + 2) < 0.5 ? 1.0 : 2.0);
    if (lipschitz_bound_tight(dist, sigma, f) > lipschitz_bound_loose(dist, sigma, f)) ++bad;
  }
  const double tight = lipschitz_bound_tight(0.2, 0.1, kUnit);
  const double loose = lipschitz_bound_loose(0.2, 0.1, kUnit);
  const bool pair_ok = std::fabs(tight - 1.3653790) <= 1e-6 && std::fabs(loose - 1.5957691) <= 1e-6;
  return {bad == 0 && pair_ok,
          "violations " + std::to_string(bad) + "/10000, (tight, loose)@0.2 = (" + fmt(tight) + ", " + fmt(loose) + ")"};
}

Outcome radius() {
  const double r = certified_radius(2.0, 1.0, kUnit);
  const CounterRng rng(2026, "acceptance/radius");
  std::size_t scale_bad = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const NormBound f(0.5 + 2.0 * rng.uniform(3 * i));
    const double d = 2.0 * f.value() * rng.uniform(3 * i + 1);
    const double sigma = 0.01 + 3.0 * rng.uniform(3 * i + 2);
    if (certified_radius(d, sigma, f) != sigma * certified_radius(d, 1.0, f)) ++scale_bad;
  }
  double round_trip = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double p = 0.5 + (0.999999 - 0.5) * i / 100000.0;
    round_trip = std::max(round_trip, std::fabs(normal_cdf(normal_quantile(p)) - p));
  }
  return {std::fabs(r - 1.3489795) <= 1e-6 && scale_bad == 0 && round_trip <= 1e-8,
          "r(2,1,1) = " + fmt(r) + ", scale mismatches " + std::to_string(scale_bad) + ", max round-trip error " +
              fmt(round_trip)};
}

Outcome chernoff() {
  const double eps = chernoff_epsilon(kUnit, 128, 100000, 0.01);
  const double corr = 4.0 * chernoff_epsilon(kUnit, 128, 100000, 0.01 / 4);
  return {std::fabs(eps - 0.0158871) <= 1e-6 && std::fabs(corr - 0.068043) <= 1e-5,
          "epsilon = " + fmt(eps) + ", correction = " + fmt(corr)};
}

Outcome concentration() {
  const auto h = BaseModel::sign1d(kUnit);
  const double g = exact_smooth_sign(0.1, 0.1, kUnit);
  const double eps = chernoff_epsilon(kUnit, 1, 10000, 0.05);
  int exceed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto est = smooth_embed_mc(h, InputVector{0.1}, SmoothingConfig{0.1, 10000, 0.05, seed}, "acceptance/conc");
    if (std::fabs(est.g_hat[0] - g) > eps) ++exceed;
  }
  const double frac = exceed / 200.0;
  return {frac <= 0.05, "exceed fraction " + fmt(frac) + " (epsilon " + fmt(eps) + ")"};
}

Outcome convergence() {
  const auto h = BaseModel::sign1d(kUnit);
  const double g = exact_smooth_sign(0.1, 0.1, kUnit);
  std::vector<double> lx, ly;
  for (std::uint64_t n : {100u, 1000u, 10000u, 100000u}) {
    CompensatedSum err;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      err.add(std::fabs(smooth_embed_mc(h, InputVector{0.1}, SmoothingConfig{0.1, n, 0.05, seed}, "acceptance/rate")
                            .g_hat[0] -
                        g));
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(err.value() / 20.0));
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= -0.65 && slope <= -0.35, "log-log slope " + fmt(slope)};
}

std::vector<LabeledSample> samples(const std::string& prefix, const Label& label, std::initializer_list<double> xs) {
  std::vector<LabeledSample> out;
  int i = 0;
  for (double x : xs) out.push_back({prefix + std::to_string(i++), label, InputVector{x}});
  return out;
}

std::vector<LabeledSample> concat(std::vector<LabeledSample> a, const std::vector<LabeledSample>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Outcome attack() {
  // Two-class 1-D data under the sign model, where g has a closed form.
  const auto h = BaseModel::sign1d(kUnit);
  const double sigma = 0.1;
  const auto gallery = concat(samples("gp", "pos", {0.2, 0.35, 0.5, 0.8}), samples("gn", "neg", {-0.2, -0.35, -0.5, -0.8}));
  const auto queries =
      concat(samples("qp", "pos", {0.05, 0.1, 0.15, 0.25, 0.4}), samples("qn", "neg", {-0.05, -0.1, -0.15, -0.25, -0.4}));
  const ExactSmoother g = make_exact_smoother(h, sigma);
  const ReferenceIndex exact = build_exact_index(gallery, g, kUnit);
  std::size_t certified = 0, flips = 0, attacks = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto records = certify_dataset(queries, h, gallery, SmoothingConfig{sigma, 100000, 0.01, seed});
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].certified()) continue;
      ++certified;
      flips += attack_sanity(g, queries[i].input, records[i], exact, 1000, seed);
      attacks += 1000;
    }
  }
  // Near-margin instance: the other label sits just past the query.
  const auto near_gallery = concat(samples("s", "pos", {0.5}), samples("o", "neg", {-0.05}));
  const ReferenceIndex near_index = build_exact_index(near_gallery, g, kUnit);
  const InputVector x{0.1};
  const auto rec = certify_margin("near", "pos", minimum_margin(g(x), "pos", near_index),
                                  SmoothingConfig{sigma, 100000, 0.01, 0}, kUnit, 1);
  const std::size_t far_flips = rec.certified() ? attack_sanity(g, x, rec, near_index, 1000, 0, 10.0) : 0;
  return {certified > 0 && flips == 0 && far_flips >= 1,
          std::to_string(flips) + " flips in " + std::to_string(attacks) + " boundary attacks over " +
              std::to_string(certified) + " certified query-seeds; 10x radius flips " + std::to_string(far_flips) +
              "/1000"};
}

Outcome monotonicity() {
  const auto h = BaseModel::sign1d(kUnit);
  // (a) rejected ratio over n: queries with margins from ~0.03 to ~1.2.
  const auto gallery = concat(samples("gp", "pos", {0.3}), samples("gn", "neg", {-0.3}));
  const auto queries = samples("q", "pos", {0.002, 0.005, 0.01, 0.02, 0.04, 0.08});
  std::vector<double> ratios;
  bool curves_ok = true;
  for (std::uint64_t n : {1000u, 10000u, 100000u}) {
    const auto records = certify_dataset(queries, h, gallery, SmoothingConfig{0.1, n, 0.01, 7});
    ratios.push_back(rejected_ratio(records, true));
    const auto grid = default_radius_grid(records);
    const auto curve = recall_at_1_curve(records, grid);
    for (std::size_t i = 1; i < curve.values.size(); ++i) curves_ok = curves_ok && curve.values[i] <= curve.values[i - 1];
  }
  const bool ratio_ok = ratios[1] <= ratios[0] && ratios[2] <= ratios[1];

  // (b) sigma sweep on a well-separated instance.
  const auto wide_gallery = concat(samples("s", "pos", {2.5}), samples("o", "neg", {-2.0}));
  const auto wide_query = samples("q", "pos", {2.0});
  std::vector<double> radii;
  std::string margins;
  for (double sigma : {0.1, 0.25, 0.5, 1.0}) {
    const auto r = certify_dataset(wide_query, h, wide_gallery, SmoothingConfig{sigma, 100000, 0.01, 7});
    radii.push_back(r[0].radius);
    margins += (margins.empty() ? "" : ",") + fmt(r[0].d_hat);
  }
  bool sigma_ok = radii[0] > 0.0;
  for (std::size_t i = 1; i < radii.size(); ++i) sigma_ok = sigma_ok && radii[i] >= radii[i - 1];

  return {ratio_ok && curves_ok && sigma_ok,
          "rejected ratio (n=1e3,1e4,1e5) = " + fmt(ratios[0]) + "," + fmt(ratios[1]) + "," + fmt(ratios[2]) +
              "; curves monotone " + (curves_ok ? "yes" : "no") + "; radius vs sigma " + fmt(radii[0]) + "," +
              fmt(radii[1]) + "," + fmt(radii[2]) + "," + fmt(radii[3]) + " (d_hat " + margins + ")"};
}

Outcome determinism() {
  const fs::path tmp = fs::temp_directory_path() / "rguard_acceptance_determinism";
  fs::remove_all(tmp);
  const std::string config = std::string(RG_DATA_DIR) + "/toy/config.json";
  std::vector<std::string> files;
  for (const char* run : {"first", "second"}) {
    std::ostringstream out, err;
    const int code = cli::run({"rguard", "certify", "--config", config, "--out", (tmp / run).string()}, out, err);
    if (code != 0) return {false, std::string("certify exited ") + std::to_string(code) + ": " + err.str()};
    for (const auto& e : fs::directory_iterator(tmp / run)) files.push_back(io::read_file(e.path() / "records.csv"));
  }
  fs::remove_all(tmp);
  const bool same = files.size() == 2 && files[0] == files[1];
  return {same, same ? "records.csv identical (" + std::to_string(files[0].size()) + " bytes)" : "records differ"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"tightness equality", 1, tightness},      {"Lipschitz dominance", 1, dominance},
      {"radius formula", 1, radius},             {"Chernoff constants", 1, chernoff},
      {"MC concentration", 30, concentration},   {"MC convergence rate", 120, convergence},
      {"certificate soundness", 300, attack},    {"pipeline monotonicity", 600, monotonicity},
      {"determinism", 60, determinism},
  };
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < criteria[i].limit_seconds;
    const bool ok = o.pass && in_time;
    passed += ok ? 1 : 0;
    std::printf("criterion %zu %-22s %s  %s [%.2fs, limit %gs%s]\n", i + 1, criteria[i].name, ok ? "PASS" : "FAIL",
                o.detail.c_str(), secs, criteria[i].limit_seconds, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria pass\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
