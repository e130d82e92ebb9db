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

#ifndef METABLOX_METABLOX_HPP_
#define METABLOX_METABLOX_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"
#include "metablox/inference.hpp"

namespace metablox {

inline constexpr const char* kFlagDegenerateDenominator = "degenerate-denominator";
inline constexpr const char* kFlagNoEdges = "no-edges";
inline constexpr const char* kFlagBelowOptimum = "metadata-below-optimum";

struct GammaResult {
  /// Empty when Σ_rand − Σ_opt ≤ 0.
  std::optional<double> gamma;
  std::vector<std::string> flags;
};

/// (Σ_d − Σ_opt)/(Σ_rand − Σ_opt).
GammaResult compute_gamma(double sigma_d, double sigma_opt, double sigma_rand);

/// Σ_opt/E in nats per edge; empty when E = 0.
std::optional<double> edge_compression(double sigma_opt, Count num_edges);

struct VariantReport {
  Variant variant = Variant::kDc;
  double sigma_d = 0.0;
  double sigma_opt = 0.0;
  double sigma_rand = 0.0;
  double delta = 0.0;
  double delta_star = 0.0;
  std::optional<double> gamma;
  std::optional<double> edge_compression;
  double pvalue = 1.0;
  /// γ < 1.
  bool relevant = false;
  std::vector<std::string> flags;
  Partition optimum;
};

struct MetabloxConfig {
  std::vector<Variant> variants{Variant::kNdc, Variant::kDc, Variant::kPpNonuniform};
  std::size_t n_permutations = 500;
  double alpha = 0.01;
  std::uint64_t seed = 42;
  /// Its seed is replaced by `seed`.
  InferenceConfig inference;
  /// Variants processed concurrently.
  std::size_t jobs = 1;
};

struct MetabloxReport {
  std::vector<VariantReport> variants;
  std::optional<Variant> best_compressing_variant;
  std::vector<std::string> flags;
  std::uint64_t seed = 0;
  std::size_t n_permutations = 0;
  double alpha = 0.0;
  int sweeps = 0;
  int restarts = 0;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;

  const VariantReport* find(Variant v) const;
};

/// Scores `d` against an already inferred optimum under `v`: Σ_d, Σ_rand
/// and p-value from n_p permutations seeded by `permutation_seed`, then γ
/// and c.
VariantReport assess_metadata(const Graph& g, const Partition& d, Variant v,
                              const InferenceResult& optimum, std::size_t n_permutations,
                              double alpha, std::uint64_t permutation_seed,
                              const QTable& qt = QTable::shared());

/// Per variant: Σ_d of `d`, Σ_opt from infer(), Σ_rand and the p-value
/// from a permutation ensemble, then γ and c.
MetabloxReport metablox(const Graph& g, const Partition& d, const MetabloxConfig& cfg,
                        const QTable& qt = QTable::shared());

/// Stable schema: gamma.<variant>, edge_compression.<variant>,
/// sigma.{d,opt,rand}.<variant>, delta.<variant>, delta_star.<variant>,
/// pvalue.<variant>, relevant.<variant>, num_blocks_opt.<variant>, flags,
/// best_compressing_variant, seed, n_permutations, alpha, sweeps, restarts,
/// num_nodes, num_edges. Undefined values are null.
nlohmann::json to_json(const MetabloxReport& report);

/// Column names of csv_rows(), comma-separated, no trailing newline.
std::string csv_header();
/// One line per variant, each ending in '\n'.
std::string csv_rows(const MetabloxReport& report, const std::string& network,
                     const std::string& metadata);

}  // namespace metablox

#endif  // METABLOX_METABLOX_HPP_
