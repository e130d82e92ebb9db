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

#ifndef METABLOX_TOOLS_EXPERIMENTS_HPP_
#define METABLOX_TOOLS_EXPERIMENTS_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metablox/description_length.hpp"

namespace metablox::tools {

struct ExperimentOptions {
  /// Shrinks network and permutation counts; in (0, 1].
  double scale = 1.0;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  /// 0 selects max(100, round(500·scale)).
  std::size_t n_permutations = 0;
  double alpha = 0.01;
  int sweeps = 1000;
  int restarts = 5;
  /// 0 selects the full-scale count times `scale`.
  std::size_t networks = 0;
  /// Grid overrides; empty keeps the full-scale grid.
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> blocks;
  double rho_step = 0.01;

  void validate() const;
  std::size_t permutations() const;
  std::size_t networks_per_cell(std::size_t full) const;
};

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

/// One network × metadata × variant observation (or one sampled partition).
struct ExperimentRow {
  std::string experiment;
  std::size_t network = 0;
  std::uint64_t network_seed = 0;
  std::size_t num_nodes = 0;
  std::size_t planted_blocks = 0;
  double mu = kNotApplicable;
  double lambda = kNotApplicable;
  /// bc, cp, planted, random or sample.
  std::string metadata;
  double rho = kNotApplicable;
  Variant variant = Variant::kDc;
  std::optional<double> gamma;
  std::optional<double> edge_compression;
  double sigma_d = kNotApplicable;
  double sigma_opt = kNotApplicable;
  double sigma_rand = kNotApplicable;
  double pvalue = kNotApplicable;
  std::size_t num_blocks = 0;
  /// Overlap of the inferred optimum (or sample) with the planted partition
  /// (the bicommunity one for two-partition networks) and with the
  /// core-periphery partition.
  double overlap_planted = kNotApplicable;
  double overlap_cp = kNotApplicable;
};

struct PropertyCheck {
  /// Groups checks, e.g. "fig3.a".
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<ExperimentRow> rows;
  std::vector<PropertyCheck> checks;

  bool all_pass() const;
  /// True iff every check whose id equals `id` passes (false if none).
  bool pass(std::string_view id) const;
};

/// fig3, fig6, fig7, fig8, fig9, null.
std::span<const std::string_view> experiment_names();

/// Throws std::invalid_argument on an unknown name.
ExperimentResult run_experiment(std::string_view name, const ExperimentOptions& options);

/// SCBM network (N=100, k=10, μ=0.25, λ=0.05) with ρ-correlated BC-like and
/// CP-like metadata, scored under DC and uniform PP.
ExperimentResult run_fig3(const ExperimentOptions& options);
/// N=200, k=10, B=2, μ ∈ {0.1, 0.2, 0.3}, ρ ∈ {0.7, 0.8, 0.9}, NDC.
ExperimentResult run_fig6(const ExperimentOptions& options);
/// B=2, k=10, μ=0.1, N over `sizes`, all three variants.
ExperimentResult run_fig7(const ExperimentOptions& options);
/// N=400, k=10, μ=0.1, B over `blocks`, NDC.
ExperimentResult run_fig8(const ExperimentOptions& options);
/// DC posterior samples on the fig3 network, plus Σ of the fig3 metadata.
ExperimentResult run_fig9(const ExperimentOptions& options);
/// ρ = 0 and exact planted metadata on N=200, μ=0.1 planted networks.
ExperimentResult run_null(const ExperimentOptions& options);

std::string rows_csv_header();
void write_rows_csv(std::ostream& out, std::span<const ExperimentRow> rows);
/// One "PASS|FAIL  id  name  (detail)" line per check.
void write_summary(std::ostream& out, const ExperimentResult& result);

/// Spearman rank correlation with average ranks for ties; NaN pairs are
/// dropped. NaN if fewer than 2 pairs remain or a rank vector is constant.
double spearman(std::span<const double> x, std::span<const double> y);
/// NaN values are ignored; NaN when nothing is left.
double median(std::span<const double> values);
double mean(std::span<const double> values);

}  // namespace metablox::tools

#endif  // METABLOX_TOOLS_EXPERIMENTS_HPP_
