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

#include "metablox_tools/experiments.hpp"

namespace metablox::tools {
namespace {

constexpr double kNan = kNotApplicable;

TEST(Stats, Spearman) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 6, 8, 100};
  const std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, down), -1.0);
  // Ties take average ranks: ranks (1.5, 1.5, 3) against (1, 2, 3).
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> tied{7, 7, 9};
  EXPECT_NEAR(spearman(a, tied), std::sqrt(3.0) / 2.0, 1e-12);
  const std::vector<double> with_nan{1, kNan, 3, 4};
  const std::vector<double> other{1, 5, 3, 2};
  EXPECT_NEAR(spearman(with_nan, other), 0.5, 1e-12);
  const std::vector<double> flat{1, 1, 1};
  EXPECT_TRUE(std::isnan(spearman(a, flat)));
  EXPECT_THROW(spearman(a, x), std::invalid_argument);
}

TEST(Stats, MedianAndMean) {
  const std::vector<double> odd{3, 1, 2};
  const std::vector<double> even{4, 1, 3, 2};
  const std::vector<double> gaps{kNan, 2, kNan, 4};
  EXPECT_EQ(median(odd), 2.0);
  EXPECT_EQ(median(even), 2.5);
  EXPECT_EQ(median(gaps), 3.0);
  EXPECT_EQ(mean(gaps), 3.0);
  EXPECT_TRUE(std::isnan(mean(std::vector<double>{kNan})));
  EXPECT_TRUE(std::isnan(median(std::vector<double>{})));
}

TEST(ExperimentOptions, ScaledCounts) {
  ExperimentOptions o;
  EXPECT_EQ(o.permutations(), 500u);
  EXPECT_EQ(o.networks_per_cell(50), 50u);
  o.scale = 0.2;
  EXPECT_EQ(o.permutations(), 100u);
  EXPECT_EQ(o.networks_per_cell(50), 10u);
  o.scale = 0.01;
  EXPECT_EQ(o.networks_per_cell(50), 1u);
  o.networks = 7;
  o.n_permutations = 300;
  EXPECT_EQ(o.networks_per_cell(50), 7u);
  EXPECT_EQ(o.permutations(), 300u);
  o.scale = 0.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(Experiments, Names) {
  const auto names = experiment_names();
  EXPECT_EQ(names.size(), 6u);
  EXPECT_THROW(run_experiment("fig4", {}), std::invalid_argument);
}

TEST(Experiments, NullAtSmallScale) {
  ExperimentOptions o;
  o.networks = 2;
  o.n_permutations = 100;
  o.sweeps = 100;
  o.restarts = 2;
  const ExperimentResult r = run_experiment("null", o);
  // 2 networks × {random, planted} × 3 variants.
  EXPECT_EQ(r.rows.size(), 12u);
  EXPECT_FALSE(r.checks.empty());
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.num_nodes, 200u);
    if (row.metadata == "planted" && row.overlap_planted == 1.0) {
      EXPECT_EQ(*row.gamma, 0.0);
    }
  }
  std::ostringstream csv, summary;
  write_rows_csv(csv, r.rows);
  write_summary(summary, r);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), rows_csv_header());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);
  const std::string lines = summary.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')), r.checks.size());

  const ExperimentResult again = run_experiment("null", o);
  std::ostringstream csv2;
  write_rows_csv(csv2, again.rows);
  EXPECT_EQ(csv2.str(), text);
}

TEST(Experiments, Fig9SamplesThePosterior) {
  ExperimentOptions o;
  o.scale = 0.2;
  const ExperimentResult r = run_experiment("fig9", o);
  std::size_t samples = 0;
  for (const auto& row : r.rows) samples += row.metadata == "sample" ? 1 : 0;
  EXPECT_GT(samples, 0u);
  EXPECT_EQ(r.checks.size(), 2u);
}

}  // namespace
}  // namespace metablox::tools
