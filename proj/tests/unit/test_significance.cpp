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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "metablox/significance.hpp"

namespace metablox {
namespace {

Graph ring(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
  edges.push_back({0, static_cast<NodeId>(n - 1)});
  return Graph(n, std::move(edges));
}

PermutationEnsemble ensemble_of(std::vector<double> dls, double alpha = 0.01) {
  PermutationEnsemble e;
  e.n_p = dls.size();
  e.dls = std::move(dls);
  e.alpha = alpha;
  return e;
}

std::vector<double> one_to(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

TEST(PermuteLabels, UniformOverArrangements) {
  const Partition d({0, 0, 1});
  Rng rng(1);
  std::map<std::vector<BlockId>, int> counts;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const Partition p = permute_labels(d, rng);
    counts[std::vector<BlockId>(p.labels().begin(), p.labels().end())] += 1;
  }
  ASSERT_EQ(counts.size(), 3u);
  double chi2 = 0.0;
  for (const auto& [labels, c] : counts) {
    EXPECT_EQ(std::count(labels.begin(), labels.end(), 1), 1);
    const double expected = draws / 3.0;
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 0.999 quantile of chi-square with 2 degrees of freedom.
  EXPECT_LT(chi2, 13.816);
}

TEST(PermuteLabels, SingleCategoryIsUnchanged) {
  Rng rng(2);
  const Partition d = Partition::single_block(9);
  EXPECT_EQ(permute_labels(d, rng), d);
}

TEST(Ensemble, ShapeAndDeterminism) {
  const Graph g = ring(40);
  std::vector<BlockId> raw(40);
  for (std::size_t i = 0; i < 40; ++i) raw[i] = static_cast<BlockId>(i / 10);
  const Partition d(raw);
  const auto a = randomized_dl_distribution(g, d, Variant::kDc, 200, 9);
  const auto b = randomized_dl_distribution(g, d, Variant::kDc, 200, 9, 0.01, 3);
  EXPECT_EQ(a.dls.size(), 200u);
  EXPECT_EQ(a.dls, b.dls);
  EXPECT_EQ(sigma_rand(a), sigma_rand(b));
  for (const double x : a.dls) EXPECT_TRUE(std::isfinite(x));
  const auto c = randomized_dl_distribution(g, d, Variant::kDc, 200, 10);
  EXPECT_NE(a.dls, c.dls);
}

TEST(Ensemble, SingleBlockMetadataGivesIdenticalValues) {
  const Graph g = ring(20);
  const auto e = randomized_dl_distribution(g, Partition::single_block(20), Variant::kNdc, 100, 1);
  EXPECT_TRUE(std::all_of(e.dls.begin(), e.dls.end(), [&](double x) { return x == e.dls[0]; }));
}

TEST(SigmaRand, OrderStatistic) {
  EXPECT_EQ(sigma_rand(ensemble_of(one_to(500))), 5.0);
  EXPECT_EQ(sigma_rand(ensemble_of(one_to(500), 0.05)), 25.0);
  EXPECT_EQ(sigma_rand(ensemble_of(std::vector<double>(100, 3.5))), 3.5);
  std::vector<double> shuffled = one_to(500);
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(sigma_rand(ensemble_of(shuffled)), 5.0);
  EXPECT_EQ(sigma_rand(ensemble_of(one_to(100))), 1.0);
}

TEST(SigmaRand, RequiresEnoughPermutations) {
  EXPECT_THROW(sigma_rand(ensemble_of(one_to(50))), std::invalid_argument);
  EXPECT_THROW(sigma_rand(ensemble_of({})), std::invalid_argument);
  const Graph g = ring(10);
  EXPECT_THROW(randomized_dl_distribution(g, Partition::single_block(9), Variant::kDc, 100, 1),
               std::invalid_argument);
}

TEST(BestestPvalue, Values) {
  const auto e = ensemble_of(one_to(500));
  EXPECT_EQ(bestest_pvalue(0.5, e), 1.0 / 500);
  EXPECT_EQ(bestest_pvalue(1000.0, e), 1.0);
  EXPECT_NEAR(bestest_pvalue(250.0, e), 0.5, 1e-12);
  EXPECT_EQ(bestest_pvalue(250.5, e), 0.5);
}

TEST(Ensemble, CsvOutput) {
  std::ostringstream out;
  write_ensemble_csv(out, ensemble_of({1.5, 0.1}));
  EXPECT_EQ(out.str(), "dl_nats\n1.5\n0.10000000000000001\n");
}

}  // namespace
}  // namespace metablox
