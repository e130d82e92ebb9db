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

#ifndef METABLOX_SYNTHETIC_HPP_
#define METABLOX_SYNTHETIC_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "metablox/graph.hpp"
#include "metablox/rng.hpp"

namespace metablox {

/// Symmetric B×B matrix of expected edge-count mass in the e_rs convention
/// (diagonal counts each internal edge twice). Only proportions matter to
/// the generators, which rescale the mass to 2E.
struct BlockMatrix {
  std::size_t planted_blocks = 0;
  std::vector<double> theta;  // row-major

  BlockMatrix() = default;
  BlockMatrix(std::size_t blocks, std::vector<double> values);

  double at(std::size_t r, std::size_t s) const { return theta[r * planted_blocks + s]; }
  double total() const;
};

/// 2E·[[1−μ, μ], [μ, 1−μ]].
BlockMatrix theta_bc(Count num_edges, double mu);
/// B-block assortative matrix: 2E·(1−μ) on the diagonal and 2E·μ/(B−1)
/// off it. Equals theta_bc(E, μ) for B = 2.
BlockMatrix theta_bc(Count num_edges, double mu, std::size_t blocks);
/// 2E·[[1−λ, 1/2], [1/2, λ]]; block 0 is the core.
BlockMatrix theta_cp(Count num_edges, double lambda);

struct SyntheticSpec {
  std::size_t num_nodes = 100;
  double expected_degree = 10.0;
  /// One matrix for sbm_generate, two (BC then CP) for scbm_generate.
  std::vector<BlockMatrix> matrices;
  double rho = 1.0;
  std::uint64_t seed = 0;

  /// round(N·k/2).
  Count target_edges() const;
  void validate() const;
};

struct SbmSample {
  Graph graph;
  Partition planted;
};

struct ScbmSample {
  Graph graph;
  Partition bc;
  Partition cp;
};

/// Integer quotas summing to `total`, each within one of its real share of
/// `weights` (Hamilton's largest-remainder method, ties to the lower index).
std::vector<Count> largest_remainder(std::span<const double> weights, Count total);

/// Sizes of `blocks` near-equal blocks; the first N mod B get one extra node.
std::vector<Count> balanced_sizes(std::size_t num_nodes, std::size_t blocks);

/// Microcanonical SBM draw with exactly target_edges() edges: block-pair
/// quotas by largest remainder, edges placed uniformly without replacement
/// within each block pair. Throws std::invalid_argument if a quota exceeds
/// the available node pairs.
SbmSample sbm_generate(const SyntheticSpec& spec);

/// Two coexisting planted partitions. Edge quotas for the 4 cross cells are
/// fitted by iterative proportional fitting to both matrices' marginals,
/// then rounded and placed as in sbm_generate. Throws std::runtime_error if
/// the fit does not converge.
ScbmSample scbm_generate(const SyntheticSpec& spec);

/// Keeps each node's planted label with probability (1+ρ)/2, otherwise
/// draws one of the other labels uniformly.
Partition correlated_metadata(const Partition& planted, double rho, Rng& rng);

}  // namespace metablox

#endif  // METABLOX_SYNTHETIC_HPP_
