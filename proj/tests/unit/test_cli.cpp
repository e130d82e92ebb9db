// Copyright 2026 The metablox Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "metablox_tools/cli.hpp"
#include "oracle.hpp"

namespace metablox::tools {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("metablox_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& contents) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, DlTriangle) {
  const auto g = file("k3.txt", "0 1\n1 2\n0 2\n");
  const auto p = file("p.txt", "0\n0\n0\n");
  const CliRun r = run({"dl", g, p, "--variant", "ndc"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["total"].get<double>(), 3.8191, 5e-5);
  EXPECT_EQ(j["variant"], "ndc");
  EXPECT_EQ(j["num_blocks"], 1);
}

TEST_F(CliTest, DlPathMatchesOracle) {
  const auto g = file("path.txt", "0 1\n1 2\n2 3\n");
  const auto p = file("p.csv", "node,label\n0,a\n1,a\n2,b\n3,b\n");
  const CliRun r = run({"dl", g, p, "-v", "pp-uniform"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_NEAR(nlohmann::json::parse(r.out)["total"].get<double>(),
              oracle::exact_dl(path, {0, 0, 1, 1}, Variant::kPpUniform), 1e-9);
}

TEST_F(CliTest, UsageErrors) {
  const auto g = file("k3.txt", "0 1\n1 2\n0 2\n");
  const auto p = file("p.txt", "0\n0\n0\n");
  EXPECT_EQ(run({"dl", g, p, "--variant", "bogus"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"dl", g}).code, kExitUsage);
  EXPECT_EQ(run({"metablox", g, p, "-n", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, RuntimeErrors) {
  const auto bad = file("bad.txt", "0 1\n2\n");
  const auto p = file("p.txt", "0\n0\n0\n");
  const CliRun r = run({"dl", bad, p, "-v", "dc"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  const auto g = file("k3.txt", "0 1\n1 2\n0 2\n");
  const auto short_md = file("md.csv", "node,label\n0,a\n1,b\n");
  EXPECT_EQ(run({"metablox", g, short_md, "--sweeps", "10"}).code, kExitRuntime);
}

TEST_F(CliTest, SynthThenMetablox) {
  CliRun r = run({"synth", "-N", "120", "--mu", "0.1", "--rho", "0.9", "--seed", "5", "--outdir",
               path("net"), "--log-level", "warn"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"graph.txt", "planted.csv", "metadata.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "net" / f)) << f;
  }
  const std::vector<std::string> args{"metablox", path("net/graph.txt"), path("net/metadata.csv"),
                                      "--add-unknown-nodes", "-n", "100", "--sweeps", "100",
                                      "--restarts", "2", "-o", path("report.json"), "--csv",
                                      path("report.csv")};
  r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string first = slurp(path("report.json"));
  const auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j["manifest"], "report.json.manifest.json");
  EXPECT_LT(j["gamma"]["ndc"].get<double>(), 1.0);
  EXPECT_EQ(j["n_permutations"], 100);
  EXPECT_TRUE(j["gamma"].contains("pp_nonuniform"));

  const auto manifest = nlohmann::json::parse(slurp(path("report.json.manifest.json")));
  EXPECT_EQ(manifest["command"], "metablox");
  EXPECT_EQ(manifest["inputs"].size(), 2u);
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["outputs"].size(), 2u);

  auto jobs = args;
  jobs.insert(jobs.end(), {"--jobs", "3"});
  ASSERT_EQ(run(jobs).code, 0);
  EXPECT_EQ(slurp(path("report.json")), first);

  auto uniform = args;
  uniform.insert(uniform.end(), {"--pp", "uniform", "--variants", "dc,pp"});
  ASSERT_EQ(run(uniform).code, 0);
  const auto ju = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_TRUE(ju["gamma"].contains("pp_uniform"));
  EXPECT_FALSE(ju["gamma"].contains("ndc"));
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  ASSERT_EQ(run({"synth", "-N", "80", "--seed", "2", "--outdir", path("net")}).code, 0);
  const auto cfg = file("run.ini", "[metablox]\nn-permutations=200\nsweeps=20\nrestarts=1\n");
  const std::string g = path("net/graph.txt"), md = path("net/metadata.csv");
  CliRun r = run({"--config", cfg, "metablox", g, md, "--add-unknown-nodes"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n_permutations"], 200);
  EXPECT_EQ(j["sweeps"], 20);
  r = run({"--config", cfg, "metablox", g, md, "--add-unknown-nodes", "-n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n_permutations"], 100);
  EXPECT_EQ(j["sweeps"], 20);
}

TEST_F(CliTest, DegenerateResultStillSucceeds) {
  const auto g = file("ring.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n");
  const auto md = file("md.csv", "node,label\n0,a\n1,a\n2,a\n3,a\n4,a\n5,a\n");
  const CliRun r = run({"metablox", g, md, "-n", "100", "--sweeps", "50"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["flags"].empty());
  EXPECT_TRUE(j["gamma"]["dc"].is_null());
}

TEST_F(CliTest, InferAndSignificance) {
  ASSERT_EQ(run({"synth", "-N", "100", "--seed", "3", "--outdir", path("net")}).code, 0);
  CliRun r = run({"infer", path("net/graph.txt"), "--sweeps", "100", "--restarts", "2",
               "--partition-out", path("best.csv"), "--trace-out", path("trace.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["restart_sigmas"].size(), 2u);
  EXPECT_NEAR(j["sigma_opt"].get<double>(), j["breakdown"]["total"].get<double>(), 1e-9);
  EXPECT_TRUE(fs::exists(path("best.csv")));
  EXPECT_EQ(slurp(path("trace.csv")).substr(0, 13), "step,dl_nats\n");

  r = run({"significance", path("net/graph.txt"), path("net/metadata.csv"), "--add-unknown-nodes",
           "-n", "200", "--ensemble-out", path("ens.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["pvalue"], 1.0 / 200);
  const std::string ens = slurp(path("ens.csv"));
  EXPECT_EQ(std::count(ens.begin(), ens.end(), '\n'), 201);
}

TEST_F(CliTest, Replicate) {
  const CliRun r = run({"replicate", "fig9", "--outdir", path("rep"), "--scale", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fig9"), std::string::npos);
  for (const char* f : {"fig9.csv", "fig9_summary.txt", "fig9_manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "rep" / f)) << f;
  }
  EXPECT_EQ(run({"replicate", "fig4", "--outdir", path("rep")}).code, kExitUsage);
  EXPECT_EQ(run({"replicate", "fig9", "--outdir", path("rep"), "--scale", "2"}).code, kExitUsage);
}

TEST_F(CliTest, FetchLawfirmFromDirectory) {
  const fs::path raw = dir_ / "raw";
  fs::create_directories(raw);
  std::ofstream(raw / "ELadv.dat") << "0 1 0\n0 0 1\n0 0 0\n";
  std::ofstream(raw / "ELfriend.dat") << "0 1 0\n1 0 0\n0 0 0\n";
  std::ofstream(raw / "ELwork.dat") << "0 1 1\n1 0 1\n1 1 0\n";
  std::ofstream(raw / "ELattr.dat") << "1 1 1 1 31 64 1 1\n2 1 2 1 32 62 2 1\n3 2 1 2 13 67 1 3\n";
  const CliRun r = run({"fetch-lawfirm", "--from-dir", raw.string(), "--outdir", path("lf")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["networks"]["advice"]["num_nodes"], 3);
  EXPECT_EQ(j["attributes"].size(), 5u);
  EXPECT_TRUE(fs::exists(dir_ / "lf" / "friendship.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "lf" / "manifest.json"));
}

TEST_F(CliTest, FetchLawfirmOffline) {
  const CliRun r = run({"fetch-lawfirm", "--url", "http://127.0.0.1:9/x.zip", "--outdir", path("lf"),
                     "--timeout", "5"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("download"), std::string::npos);
}

}  // namespace
}  // namespace metablox::tools
