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


#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rguard/cli.h"
#include "rguard/io.h"

namespace rguard::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rguard");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-')) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      row.push_back(io::parse_double(line.substr(start, pos == std::string::npos ? pos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rguard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    for (const char* f : {"config.json", "gallery.csv", "queries.csv"}) {
      fs::copy_file(fs::path(RG_DATA_DIR) / "toy" / f, dir_ / f);
    }
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config() const { return (dir_ / "config.json").string(); }
  void edit_config(const std::function<void(json&)>& fn) {
    json doc = json::parse(io::read_file(dir_ / "config.json"));
    fn(doc);
    io::write_file_atomic(dir_ / "config.json", doc.dump(2));
  }
  static fs::path only_subdir(const fs::path& p) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(p)) dirs.push_back(e.path());
    EXPECT_EQ(dirs.size(), 1u);
    return dirs.empty() ? p : dirs.front();
  }
  fs::path dir_;
};

TEST_F(Cli, BoundsPlotFigureRows) {
  const auto r = run_cli({"bounds-plot", "--sigma", "0.1", "-F", "1", "--dist-max", "1", "--points", "101"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dist,tight,loose"), std::string::npos);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0][1], 0.0);
  EXPECT_EQ(rows[0][2], 0.0);
  EXPECT_NEAR(rows[20][0], 0.2, 1e-15);
  EXPECT_NEAR(rows[20][1], 1.3653790, 1e-7);
  EXPECT_NEAR(rows[20][2], 1.5957691, 1e-7);

  const auto far = run_cli({"bounds-plot", "--sigma", "0.1", "--dist-max", "10", "--points", "11"});
  ASSERT_EQ(far.code, 0);
  const auto last = csv_rows(far.out).back();
  EXPECT_NEAR(last[1], 2.0, 1e-12);
  EXPECT_NEAR(last[2], 79.788456080286536, 1e-10);
  EXPECT_EQ(run_cli({"bounds-plot", "--points", "1"}).code, kExitConfig);
}

TEST_F(Cli, CertifyIsDeterministicAndHashed) {
  const auto a = run_cli({"certify", "--config", config(), "--out", (dir_ / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run_cli({"certify", "--config", config(), "--out", (dir_ / "b").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  const fs::path ra = only_subdir(dir_ / "a");
  const fs::path rb = only_subdir(dir_ / "b");
  EXPECT_EQ(ra.filename(), rb.filename());
  const std::string text = io::read_file(ra / "records.csv");
  EXPECT_EQ(text, io::read_file(rb / "records.csv"));

  const auto records = io::decode_records_csv(text);
  EXPECT_EQ(records.size(), 10u);
  const std::string hash = ra.filename().string().substr(std::string("certify-").size());
  EXPECT_EQ(text.rfind("# config_hash=" + hash + "\n", 0), 0u);
  const json summary = json::parse(io::read_file(ra / "summary.json"));
  EXPECT_EQ(summary["config_hash"], hash);
  EXPECT_EQ(summary["counts"]["certified"], 10);
  EXPECT_EQ(summary["config"]["sigma"], 0.25);

  // A changed config lands in a new directory next to the old one.
  const auto c = run_cli({"certify", "--config", config(), "--out", (dir_ / "a").string(), "--seed", "5"});
  ASSERT_EQ(c.code, 0);
  std::size_t runs = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_ / "a")) ++runs;
  EXPECT_EQ(runs, 2u);
  EXPECT_EQ(io::read_file(ra / "records.csv"), text);
}

TEST_F(Cli, CertifyDefaultOutIsRelativeToConfig) {
  edit_config([](json& d) { d["n"] = 1000; });
  const auto r = run_cli({"certify", "--config", config()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(only_subdir(dir_ / "runs") / "records.csv"));
}

TEST_F(Cli, MissingGalleryIsIoErrorWithoutOutputs) {
  edit_config([](json& d) { d["gallery"] = "missing.csv"; });
  const auto r = run_cli({"certify", "--config", config(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("missing.csv"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run_cli({"certify", "--config", config(), "--alpha", "1.5"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"certify", "--config", config(), "--sigma", "-1"}).code, kExitConfig);
  edit_config([](json& d) { d["model"]["kind"] = "resnet"; });
  EXPECT_EQ(run_cli({"certify", "--config", config()}).code, kExitConfig);
  io::write_file_atomic(dir_ / "config.json", "{not json");
  EXPECT_EQ(run_cli({"certify", "--config", config()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"certify", "--config", (dir_ / "absent.json").string()}).code, kExitIo);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "runs"));
}

TEST_F(Cli, EvalCurves) {
  ASSERT_EQ(run_cli({"certify", "--config", config(), "--out", (dir_ / "c").string()}).code, 0);
  const std::string records = (only_subdir(dir_ / "c") / "records.csv").string();

  const auto curve = run_cli({"eval", "--records", records});
  ASSERT_EQ(curve.code, 0) << curve.err;
  EXPECT_NE(curve.out.find("r,recall_at_1_r"), std::string::npos);
  const auto rows = csv_rows(curve.out);
  ASSERT_EQ(rows.size(), 50u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i][1], rows[i - 1][1]);

  const auto zero = run_cli({"eval", "--records", records, "--grid", "0"});
  ASSERT_EQ(zero.code, 0);
  const auto z = csv_rows(zero.out);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z[0][1], 1.0);

  const auto lin = run_cli({"eval", "--records", records, "--grid", "linspace:0:1:5", "--out", (dir_ / "e").string()});
  ASSERT_EQ(lin.code, 0);
  EXPECT_EQ(csv_rows(io::read_file(only_subdir(dir_ / "e") / "recall_curve.csv")).size(), 5u);

  io::write_file_atomic(dir_ / "empty.csv", "# config_hash=x\nid,score,d_hat,d_lower,radius\n");
  EXPECT_EQ(run_cli({"eval", "--records", (dir_ / "empty.csv").string()}).code, kExitConfig);
  EXPECT_EQ(run_cli({"eval", "--records", (dir_ / "none.csv").string()}).code, kExitIo);
  EXPECT_EQ(run_cli({"eval", "--records", records, "--grid", "0.1,0.2"}).code, kExitConfig);
}

TEST_F(Cli, EvalExcludeRejected) {
  io::write_file_atomic(dir_ / "r.csv",
                        "# config_hash=x\nid,score,d_hat,d_lower,radius\n"
                        "a,1,1,0.5,0.3\nb,rejected,0.1,-0.2,-1\nc,0,-0.1,-0.4,-1\nd,1,1,0.5,0.1\n");
  const std::string records = (dir_ / "r.csv").string();
  const auto all = csv_rows(run_cli({"eval", "--records", records, "--grid", "0,0.2"}).out);
  const auto excl = csv_rows(run_cli({"eval", "--records", records, "--grid", "0,0.2", "--exclude-rejected"}).out);
  ASSERT_EQ(all.size(), 2u);
  ASSERT_EQ(excl.size(), 2u);
  EXPECT_DOUBLE_EQ(all[0][1], 0.5);
  EXPECT_DOUBLE_EQ(all[1][1], 0.25);
  EXPECT_DOUBLE_EQ(excl[0][1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(excl[1][1], 1.0 / 3.0);

  io::write_file_atomic(dir_ / "rej.csv", "# config_hash=x\nid,score,d_hat,d_lower,radius\nb,rejected,0.1,-0.2,-1\n");
  EXPECT_EQ(run_cli({"eval", "--records", (dir_ / "rej.csv").string(), "--exclude-rejected"}).code, kExitConfig);
}

TEST_F(Cli, Emb1DatasetsAndTableModel) {
  // Gallery and queries as EMB1 inputs, the model as a table of embeddings.
  io::write_emb1(dir_ / "g.emb1", io::Emb1Table{1, {{"g1", {-1.0}}, {"g2", {1.0}}}});
  io::write_file_atomic(dir_ / "g.labels.csv", "id,label\ng1,neg\ng2,pos\n");
  io::write_emb1(dir_ / "q.emb1", io::Emb1Table{1, {{"q1", {0.9}}}});
  io::write_file_atomic(dir_ / "q.labels.csv", "id,label\nq1,pos\n");
  io::write_emb1(dir_ / "e.emb1", io::Emb1Table{2, {{"g1", {-0.6, 0.0}}, {"g2", {0.6, 0.0}}, {"q1", {0.5, 0.1}}}});
  json doc = {{"model", {{"kind", "table"}, {"embeddings", "e.emb1"}, {"snap_to_nearest", true}}},
              {"gallery", "g.emb1"},
              {"queries", {{"path", "q.emb1"}, {"labels", "q.labels.csv"}}},
              {"sigma", 0.05},
              {"n", 2000},
              {"alpha", 0.01}};
  io::write_file_atomic(dir_ / "t.json", doc.dump());
  const auto r = run_cli({"certify", "--config", (dir_ / "t.json").string(), "--out", (dir_ / "t").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = io::decode_records_csv(io::read_file(only_subdir(dir_ / "t") / "records.csv"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_GT(recs[0].d_hat, 0.0);
}

}  // namespace
}  // namespace rguard::cli
