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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "metablox/metablox.hpp"
#include "metablox/synthetic.hpp"

namespace metablox {
namespace {

SbmSample planted_network(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_nodes = 120;
  spec.seed = seed;
  spec.matrices = {theta_bc(spec.target_edges(), 0.1)};
  return sbm_generate(spec);
}

MetabloxConfig quick_config() {
  MetabloxConfig cfg;
  cfg.n_permutations = 100;
  cfg.inference.sweeps = 100;
  cfg.inference.restarts = 2;
  return cfg;
}

TEST(Gamma, Arithmetic) {
  EXPECT_EQ(*compute_gamma(10.0, 10.0, 20.0).gamma, 0.0);
  EXPECT_EQ(*compute_gamma(20.0, 10.0, 20.0).gamma, 1.0);
  EXPECT_EQ(*compute_gamma(12.0, 10.0, 18.0).gamma, 0.25);
  EXPECT_TRUE(compute_gamma(12.0, 10.0, 18.0).flags.empty());
}

TEST(Gamma, DegenerateDenominator) {
  const GammaResult g = compute_gamma(5.0, 10.0, 10.0);
  EXPECT_FALSE(g.gamma.has_value());
  EXPECT_EQ(g.flags, std::vector<std::string>{kFlagDegenerateDenominator});
  EXPECT_FALSE(compute_gamma(5.0, 10.0, 9.0).gamma.has_value());
}

TEST(Gamma, BelowOptimumIsFlagged) {
  const GammaResult g = compute_gamma(9.0, 10.0, 14.0);
  EXPECT_EQ(*g.gamma, -0.25);
  EXPECT_EQ(g.flags, std::vector<std::string>{kFlagBelowOptimum});
}

TEST(EdgeCompression, Values) {
  EXPECT_EQ(*edge_compression(10.0, 5), 2.0);
  EXPECT_FALSE(edge_compression(10.0, 0).has_value());
  const Graph k3(3, {{0, 1}, {1, 2}, {0, 2}});
  const double sigma = dl(k3, Partition::single_block(3), Variant::kNdc).total;
  EXPECT_NEAR(*edge_compression(sigma, 3), 1.2730, 5e-5);
}

TEST(AssessMetadata, OptimumAsMetadataGivesZero) {
  const SbmSample s = planted_network(1);
  InferenceConfig icfg;
  icfg.sweeps = 100;
  icfg.restarts = 2;
  for (const Variant v : {Variant::kNdc, Variant::kDc, Variant::kPpUniform}) {
    const InferenceResult opt = infer(s.graph, v, icfg);
    const VariantReport r = assess_metadata(s.graph, opt.best_partition, v, opt, 100, 0.01, 3);
    ASSERT_TRUE(r.gamma.has_value());
    EXPECT_EQ(*r.gamma, 0.0);
    EXPECT_TRUE(r.relevant);
    EXPECT_EQ(r.sigma_d, r.sigma_opt);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.pvalue, 0.01);
  }
}

TEST(Metablox, RandomMetadataIsNotRelevant) {
  const SbmSample s = planted_network(2);
  Rng rng(4);
  const Partition d = correlated_metadata(s.planted, 0.0, rng);
  const MetabloxReport report = metablox(s.graph, d, quick_config());
  ASSERT_EQ(report.variants.size(), 3u);
  for (const auto& r : report.variants) {
    ASSERT_TRUE(r.gamma.has_value());
    EXPECT_GE(*r.gamma, 1.0) << to_string(r.variant);
    EXPECT_FALSE(r.relevant);
    EXPECT_NEAR(r.delta_star, r.sigma_rand - r.sigma_opt, 1e-12);
    EXPECT_NEAR(*r.gamma, r.delta / r.delta_star, 1e-12);
  }
}

TEST(Metablox, ReportIsReproducible) {
  const SbmSample s = planted_network(3);
  Rng rng(5);
  const Partition d = correlated_metadata(s.planted, 0.8, rng);
  MetabloxConfig cfg = quick_config();
  const std::string a = to_json(metablox(s.graph, d, cfg)).dump();
  cfg.jobs = 3;
  const std::string b = to_json(metablox(s.graph, d, cfg)).dump();
  EXPECT_EQ(a, b);
}

TEST(Metablox, JsonSchema) {
  const SbmSample s = planted_network(4);
  Rng rng(6);
  const Partition d = correlated_metadata(s.planted, 0.9, rng);
  const MetabloxReport report = metablox(s.graph, d, quick_config());
  const nlohmann::json j = to_json(report);
  for (const char* key : {"gamma", "edge_compression", "delta", "delta_star", "pvalue", "relevant",
                          "num_blocks_opt"}) {
    ASSERT_TRUE(j.contains(key)) << key;
    for (const char* v : {"ndc", "dc", "pp_nonuniform"}) EXPECT_TRUE(j[key].contains(v)) << key << v;
  }
  for (const char* part : {"d", "opt", "rand"}) EXPECT_TRUE(j["sigma"][part].contains("dc"));
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["n_permutations"], 100);
  EXPECT_EQ(j["alpha"], 0.01);
  EXPECT_EQ(j["sweeps"], 100);
  EXPECT_EQ(j["restarts"], 2);
  EXPECT_EQ(j["num_nodes"], 120);
  EXPECT_TRUE(j["flags"].is_array());
  EXPECT_TRUE(j["best_compressing_variant"].is_string());

  const std::string header = csv_header();
  const std::string rows = csv_rows(report, "net", "meta");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            std::count(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(rows.find('\n')), ','));
}

TEST(Metablox, DegenerateInputsAreFlagged) {
  // Single-category metadata on a structureless graph: Σ_d = Σ_rand = Σ_opt.
  const Graph g(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
  const MetabloxReport report = metablox(g, Partition::single_block(6), quick_config());
  for (const auto& r : report.variants) {
    EXPECT_FALSE(r.gamma.has_value());
    EXPECT_FALSE(r.relevant);
  }
  EXPECT_FALSE(report.flags.empty());
  EXPECT_TRUE(to_json(report)["gamma"]["dc"].is_null());

  const Graph empty(4, {});
  const MetabloxReport e = metablox(empty, Partition({0, 0, 1, 1}), quick_config());
  EXPECT_FALSE(e.best_compressing_variant.has_value());
  bool no_edges = false;
  for (const auto& f : e.flags) no_edges |= f.find(kFlagNoEdges) != std::string::npos;
  EXPECT_TRUE(no_edges);
}

TEST(Metablox, RejectsTooFewPermutations) {
  const SbmSample s = planted_network(5);
  MetabloxConfig cfg = quick_config();
  cfg.n_permutations = 50;
  EXPECT_THROW(metablox(s.graph, s.planted, cfg), std::invalid_argument);
  EXPECT_THROW(metablox(s.graph, Partition::single_block(3), quick_config()), std::invalid_argument);
}

}  // namespace
}  // namespace metablox
