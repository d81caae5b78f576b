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

#include "rguard/cli.h"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "rguard/certifier.h"
#include "rguard/eval.h"
#include "rguard/io.h"
#include "rguard/models.h"
#include "rguard/parallel.h"
#include "rguard/validation.h"

namespace rguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw_error(ErrorCode::kConfig, msg); }

// Flags shared by the commands. Unset optionals leave the config file value
// in place; precedence is flag > config file > built-in default.
struct Overrides {
  std::string config_path;
  std::optional<double> sigma;
  std::optional<std::uint64_t> n;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> batch_size;
  std::optional<std::string> grid;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--sigma", o.sigma, "Gaussian smoothing scale");
  cmd->add_option("--n", o.n, "Monte-Carlo samples per input");
  cmd->add_option("--alpha", o.alpha, "confidence level alpha");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--batch-size", o.batch_size, "Monte-Carlo batch size");
  cmd->add_option("--grid", o.grid, "radius grid: auto, auto:N, linspace:a:b:N or comma list");
}

// Loaded configuration document plus the directory relative paths resolve
// against.
struct Config {
  json doc = json::object();
  fs::path base_dir = fs::current_path();
};

Config load_config(const Overrides& o) {
  Config cfg;
  if (!o.config_path.empty()) {
    const fs::path path(o.config_path);
    const std::string text = io::read_file(path);
    try {
      cfg.doc = json::parse(text);
    } catch (const json::exception& e) {
      config_error(o.config_path + ": invalid JSON: " + e.what());
    }
    if (!cfg.doc.is_object()) config_error(o.config_path + ": top level must be an object");
    cfg.base_dir = path.has_parent_path() ? path.parent_path() : fs::current_path();
  }
  if (o.sigma) cfg.doc["sigma"] = *o.sigma;
  if (o.n) cfg.doc["n"] = *o.n;
  if (o.alpha) cfg.doc["alpha"] = *o.alpha;
  if (o.seed) cfg.doc["seed"] = *o.seed;
  if (o.batch_size) cfg.doc["batch_size"] = *o.batch_size;
  if (o.grid) cfg.doc["grid"] = *o.grid;
  // A flag path is relative to the working directory, not the config file.
  if (o.out) cfg.doc["out"] = fs::absolute(*o.out).string();
  return cfg;
}

fs::path resolve(const Config& cfg, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : cfg.base_dir / path;
}

template <class T>
T get_required(const json& doc, const char* key) {
  if (!doc.contains(key)) config_error(std::string("missing required field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  return get_required<T>(doc, key);
}

SmoothingConfig smoothing_from(const json& doc) {
  SmoothingConfig s;
  s.sigma = get_required<double>(doc, "sigma");
  s.n = get_required<std::uint64_t>(doc, "n");
  s.alpha = get_required<double>(doc, "alpha");
  s.seed = get_or<std::uint64_t>(doc, "seed", 0);
  s.batch_size = get_or<std::size_t>(doc, "batch_size", kDefaultBatchSize);
  try {
    s.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return s;
}

// Dataset spec: "file.csv", "file.emb1" (labels in file.labels.csv), or
// {"path": ..., "labels": ...}.
struct DatasetSpec {
  fs::path path;
  fs::path labels;
};

DatasetSpec dataset_spec(const Config& cfg, const char* key) {
  if (!cfg.doc.contains(key)) config_error(std::string("missing required field '") + key + "'");
  const json& v = cfg.doc.at(key);
  DatasetSpec spec;
  if (v.is_string()) {
    spec.path = resolve(cfg, v.get<std::string>());
  } else if (v.is_object()) {
    spec.path = resolve(cfg, get_required<std::string>(v, "path"));
    if (v.contains("labels")) spec.labels = resolve(cfg, get_required<std::string>(v, "labels"));
  } else {
    config_error(std::string("field '") + key + "' must be a path or an object");
  }
  if (spec.path.extension() == ".emb1" && spec.labels.empty()) {
    spec.labels = spec.path;
    spec.labels.replace_extension(".labels.csv");
  }
  return spec;
}

std::vector<LabeledSample> load_dataset(const DatasetSpec& spec) {
  if (spec.path.extension() == ".emb1") return io::read_dataset_emb1(spec.path, spec.labels);
  return io::read_dataset_csv(spec.path);
}

std::string dataset_digest(const DatasetSpec& spec) {
  std::string d = io::hash_hex(io::read_file(spec.path));
  if (!spec.labels.empty()) d += io::hash_hex(io::read_file(spec.labels));
  return d;
}

BaseModel model_from_json(const Config& cfg, std::span<const LabeledSample> known_inputs) {
  if (!cfg.doc.contains("model")) config_error("missing required field 'model'");
  const json& m = cfg.doc.at("model");
  if (!m.is_object()) config_error("field 'model' must be an object");
  const auto kind = get_required<std::string>(m, "kind");
  try {
    const NormBound bound(get_or<double>(m, "norm_bound", 1.0));
    if (kind == "sign1d") return BaseModel::sign1d(bound);
    if (kind == "linear") {
      return BaseModel::linear(get_required<std::size_t>(m, "input_dim"), get_required<std::size_t>(m, "output_dim"),
                               get_required<std::vector<double>>(m, "weights"),
                               get_or<std::vector<double>>(m, "bias", {}), bound);
    }
    if (kind == "toy_mlp") {
      return make_toy_mlp(get_or<std::uint64_t>(m, "seed", 0), get_required<std::size_t>(m, "input_dim"),
                          get_required<std::size_t>(m, "output_dim"), get_or<std::size_t>(m, "hidden", 8), bound);
    }
    if (kind == "table") {
      const io::Emb1Table emb = io::read_emb1(resolve(cfg, get_required<std::string>(m, "embeddings")));
      std::map<std::string, InputVector> inputs;
      for (const auto& s : known_inputs) inputs.emplace(s.id, s.input);
      if (m.contains("inputs")) {
        for (auto& rec : io::read_emb1(resolve(cfg, get_required<std::string>(m, "inputs"))).records) {
          inputs.insert_or_assign(rec.id, InputVector(std::move(rec.values)));
        }
      }
      std::vector<TableEntry> entries;
      for (const auto& rec : emb.records) {
        auto it = inputs.find(rec.id);
        if (it == inputs.end()) config_error("table embedding '" + rec.id + "' has no matching input vector");
        entries.push_back(TableEntry{rec.id, it->second, EmbeddingVector(rec.values)});
      }
      return BaseModel::table(std::move(entries), bound, get_or<bool>(m, "snap_to_nearest", false));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    config_error("model: " + std::string(e.what()));
  }
  config_error("unknown model kind '" + kind + "' (expected sign1d, linear, toy_mlp or table)");
}

std::vector<double> parse_grid(const std::string& spec, std::span<const CertificationRecord> records) {
  if (spec == "auto") return default_radius_grid(records);
  if (spec.rfind("auto:", 0) == 0) {
    return default_radius_grid(records, static_cast<std::size_t>(io::parse_double(spec.substr(5))));
  }
  std::vector<double> grid;
  if (spec.rfind("linspace:", 0) == 0) {
    std::vector<double> parts;
    std::size_t start = 9;
    while (start <= spec.size()) {
      const std::size_t pos = spec.find(':', start);
      parts.push_back(io::parse_double(spec.substr(start, pos == std::string::npos ? pos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 3 || parts[2] < 1) config_error("grid 'linspace:a:b:N' needs three values with N >= 1");
    const auto count = static_cast<std::size_t>(parts[2]);
    for (std::size_t i = 0; i < count; ++i) {
      grid.push_back(count == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * i / static_cast<double>(count - 1));
    }
    return grid;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t pos = spec.find(',', start);
    grid.push_back(io::parse_double(spec.substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return grid;
}

// Run directory "<out>/<command>-<hash>". The output location itself is
// not part of the hash.
fs::path run_dir(const Config& cfg, const std::string& command, const std::string& hash) {
  const fs::path out = resolve(cfg, get_or<std::string>(cfg.doc, "out", "runs"));
  return out / (command + "-" + hash);
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
}

std::string config_hash(const json& doc, const std::string& extra) {
  json hashed = doc;
  hashed.erase("out");
  return io::hash_hex(hashed.dump() + "\n" + extra);
}

int cmd_certify(const Overrides& o, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  const Config cfg = load_config(o);
  const SmoothingConfig smoothing = smoothing_from(cfg.doc);
  const DatasetSpec gallery_spec = dataset_spec(cfg, "gallery");
  const DatasetSpec query_spec = dataset_spec(cfg, "queries");

  // Everything is read and validated before any output is created.
  const auto gallery = load_dataset(gallery_spec);
  const auto queries = load_dataset(query_spec);
  std::vector<LabeledSample> known(gallery.begin(), gallery.end());
  known.insert(known.end(), queries.begin(), queries.end());
  const BaseModel model = model_from_json(cfg, known);

  std::string extra = dataset_digest(gallery_spec) + dataset_digest(query_spec);
  const json& mj = cfg.doc.at("model");
  for (const char* key : {"embeddings", "inputs"}) {
    if (mj.contains(key)) extra += io::hash_hex(io::read_file(resolve(cfg, mj.at(key).get<std::string>())));
  }
  const std::string hash = config_hash(cfg.doc, extra);

  const std::size_t workers = worker_count();
  const auto records = certify_dataset(queries, model, gallery, smoothing, workers);

  std::size_t certified = 0, rejected = 0, missed = 0;
  for (const auto& r : records) {
    if (r.status == CertStatus::kCertified) ++certified;
    if (r.status == CertStatus::kRejected) ++rejected;
    if (r.status == CertStatus::kNotRetrieved) ++missed;
  }
  json summary;
  summary["config_hash"] = hash;
  summary["config"] = cfg.doc;
  summary["counts"] = {{"total", records.size()},
                       {"certified", certified},
                       {"rejected", rejected},
                       {"not_retrieved", missed}};
  summary["rejected_ratio"] = rejected_ratio(records, false);
  try {
    summary["rejected_ratio_positive_margin"] = rejected_ratio(records, true);
  } catch (const Error&) {
    summary["rejected_ratio_positive_margin"] = nullptr;
  }
  const std::vector<double> zero{0.0};
  summary["recall_at_1"] = recall_at_1_curve(records, zero).values.front();
  summary["model"] = {{"kind", model_kind_name(model.kind())},
                      {"input_dim", model.input_dim()},
                      {"output_dim", model.output_dim()},
                      {"norm_bound", model.bound().value()}};
  summary["workers"] = workers;
  summary["runtime_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const fs::path dir = run_dir(cfg, "certify", hash);
  make_dirs(dir);
  io::write_file_atomic(dir / "records.csv", io::encode_records_csv(records, hash));
  io::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << "certified " << certified << "/" << records.size() << " queries (rejected " << rejected
      << ", not retrieved " << missed << "); wrote " << (dir / "records.csv").string() << "\n";
  return kExitOk;
}

int cmd_eval(const Overrides& o, const std::string& records_flag, bool exclude_rejected, std::ostream& out) {
  Config cfg = load_config(o);
  std::string records_path = records_flag;
  if (records_path.empty()) records_path = get_or<std::string>(cfg.doc, "records", "");
  if (records_path.empty()) config_error("eval needs --records or a 'records' config field");
  const fs::path path = records_flag.empty() ? resolve(cfg, records_path) : fs::path(records_path);
  const std::string text = io::read_file(path);
  const auto records = io::decode_records_csv(text);
  if (records.empty()) config_error("records file '" + path.string() + "' has no records");

  const std::string grid_spec = get_or<std::string>(cfg.doc, "grid", "auto");
  const auto grid = parse_grid(grid_spec, records);
  const RecallCurve curve = recall_at_1_curve(records, grid, exclude_rejected);
  const std::string hash =
      io::hash_hex(text + "\ngrid=" + grid_spec + (exclude_rejected ? "\nexclude_rejected" : ""));
  const std::string csv = io::encode_curve_csv(curve, hash);

  if (cfg.doc.contains("out")) {
    const fs::path dir = run_dir(cfg, "eval", hash);
    make_dirs(dir);
    io::write_file_atomic(dir / "recall_curve.csv", csv);
    out << "wrote " << (dir / "recall_curve.csv").string() << "\n";
  } else {
    out << csv;
  }
  return kExitOk;
}

int cmd_bounds_plot(const Overrides& o, std::optional<double> norm_bound, double dist_max, int points,
                    std::ostream& out) {
  Config cfg = load_config(o);
  const double sigma = get_or<double>(cfg.doc, "sigma", 0.1);
  const double f = norm_bound ? *norm_bound : get_or<double>(cfg.doc, "norm_bound", 1.0);
  if (points < 2) config_error("--points must be >= 2");
  if (!(dist_max > 0.0)) config_error("--dist-max must be positive");
  const NormBound bound = [&] {
    try {
      return NormBound(f);
    } catch (const Error& e) {
      config_error(e.what());
    }
  }();
  if (!(sigma > 0.0)) config_error("sigma must be positive");

  std::string csv;
  for (int i = 0; i < points; ++i) {
    const double dist = dist_max * i / (points - 1);
    csv += io::format_double(dist) + ',' + io::format_double(lipschitz_bound_tight(dist, sigma, bound)) + ',' +
           io::format_double(lipschitz_bound_loose(dist, sigma, bound)) + '\n';
  }
  json params = {{"sigma", sigma}, {"norm_bound", f}, {"dist_max", dist_max}, {"points", points}};
  const std::string hash = io::hash_hex(params.dump());
  csv = "# config_hash=" + hash + "\ndist,tight,loose\n" + csv;

  if (cfg.doc.contains("out")) {
    const fs::path dir = run_dir(cfg, "bounds", hash);
    make_dirs(dir);
    io::write_file_atomic(dir / "bounds.csv", csv);
    out << "wrote " << (dir / "bounds.csv").string() << "\n";
  } else {
    out << csv;
  }
  return kExitOk;
}

int cmd_oracle_check(const Overrides& o, const std::string& inject, std::ostream& out) {
  Config cfg = load_config(o);
  OracleSuiteOptions opts;
  opts.seed = get_or<std::uint64_t>(cfg.doc, "seed", 0);
  if (!inject.empty()) {
    if (inject != "zero-epsilon") config_error("unknown --inject-bug mode '" + inject + "'");
    opts.inject_zero_epsilon = true;
  }
  const auto reports = run_oracle_suite(opts);
  json arr = json::array();
  bool all_pass = true;
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    arr.push_back({{"quantity", r.quantity},
                   {"oracle_value", r.oracle_value},
                   {"engine_value", r.engine_value},
                   {"abs_deviation", r.abs_deviation},
                   {"rel_deviation", r.rel_deviation},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  }
  json doc = {{"config_hash", config_hash(cfg.doc, inject)}, {"all_pass", all_pass}, {"reports", arr}};
  if (cfg.doc.contains("out")) {
    const fs::path dir = run_dir(cfg, "oracle", doc["config_hash"].get<std::string>());
    make_dirs(dir);
    io::write_file_atomic(dir / "oracle_report.json", doc.dump(2) + "\n");
  }
  out << doc.dump(2) << "\n";
  return all_pass ? kExitOk : kExitOracle;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified L2 robustness radii for smoothed 1-NN retrieval"};
  app.require_subcommand(1);

  Overrides certify_o, eval_o, bounds_o, oracle_o;
  auto* certify = app.add_subcommand("certify", "certify every query of a dataset");
  add_common_flags(certify, certify_o);

  auto* eval = app.add_subcommand("eval", "Recall@1(r) curve from a records file");
  add_common_flags(eval, eval_o);
  std::string records_path;
  eval->add_option("--records", records_path, "records CSV written by certify");
  bool exclude_rejected = false;
  eval->add_flag("--exclude-rejected", exclude_rejected, "drop rejected records from the Recall@1 denominator");

  auto* bounds = app.add_subcommand("bounds-plot", "tight vs loose Lipschitz bounds on a distance grid");
  add_common_flags(bounds, bounds_o);
  std::optional<double> norm_bound;
  double dist_max = 1.0;
  int points = 101;
  bounds->add_option("-F,--norm-bound", norm_bound, "embedding norm bound F");
  bounds->add_option("--dist-max", dist_max, "largest input distance");
  bounds->add_option("--points", points, "grid points (>= 2)");

  auto* oracle = app.add_subcommand("oracle-check", "run the oracle validation suite");
  add_common_flags(oracle, oracle_o);
  std::string inject;
  oracle->add_option("--inject-bug", inject, "negative control (zero-epsilon)")->group("");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*certify) return cmd_certify(certify_o, out);
    if (*eval) return cmd_eval(eval_o, records_path, exclude_rejected, out);
    if (*bounds) return cmd_bounds_plot(bounds_o, norm_bound, dist_max, points, out);
    if (*oracle) return cmd_oracle_check(oracle_o, inject, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIo ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace rguard::cli
