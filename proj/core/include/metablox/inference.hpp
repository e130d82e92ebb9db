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

#ifndef METABLOX_INFERENCE_HPP_
#define METABLOX_INFERENCE_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "metablox/block_state.hpp"
#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"
#include "metablox/rng.hpp"

namespace metablox {

/// Inverse temperature of an MCMC sweep; kGreedy accepts only improvements.
inline constexpr double kGreedy = std::numeric_limits<double>::infinity();

struct SweepOptions {
  double beta = 1.0;
  double epsilon = 1.0;
  /// Probability of a fresh-block proposal for a single-node move.
  double new_block_probability = 0.01;
  /// Per-sweep probability of a merge-split pass.
  double merge_split_probability = 0.2;
  /// Proposals per merge-split pass, each a block merge or a random split
  /// with probability 1/2.
  int merge_split_attempts = 10;
  bool allow_new_blocks = true;
};

/// Search budget and schedule for infer().
struct InferenceConfig {
  std::uint64_t seed = 42;
  int sweeps = 1000;
  int restarts = 5;
  double epsilon = 1.0;
  /// Fraction of sweeps run at β = 1 before switching to greedy descent.
  double sampling_fraction = 0.5;
  /// Geometric ratio between successive block counts of the merge ladder.
  double agglomeration_ratio = 1.3;
  /// Merge candidates evaluated per block at each ladder level.
  int merge_candidates = 10;
  /// Greedy node sweeps run after each ladder level.
  int level_sweeps = 3;
  /// Worker threads for restarts (0 = hardware concurrency).
  std::size_t jobs = 1;
  /// Compare tracked Σ with a from-scratch value every this many sweeps.
  int check_interval = 100;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct InferenceResult {
  Partition best_partition;
  double sigma_opt = 0.0;
  /// Σ after each sweep of the winning restart, then the final hill climb.
  std::vector<double> trace;
  std::vector<double> restart_sigmas;
  std::size_t winning_restart = 0;
};

/// One MCMC sweep: a node-move proposal for every node in random order, then
/// with probability `merge_split_probability` a pass of merge-split
/// proposals. Metropolis-Hastings acceptance at opts.beta,
/// with proposal ratios that make β = 1 sample partitions ∝ exp(−Σ).
/// Returns the number of accepted moves.
std::size_t mcmc_sweep(BlockState& state, Rng& rng, const SweepOptions& opts);

/// Multilevel agglomerative heuristic: from singletons, merges block pairs
/// in order of ΔΣ down a geometric ladder of block counts, refining each
/// level with greedy node moves, and returns the level with smallest Σ.
/// Planted-partition variants build the ladder with degree-corrected scores.
Partition agglomerative_init(const Graph& g, Variant v, const InferenceConfig& cfg,
                             Rng& rng, const QTable& qt = QTable::shared());

/// Greedy descent: repeatedly applies the best single-node move (over all
/// blocks and a fresh block) and then the best block merge, until neither
/// improves Σ. Returns the number of applied changes.
std::size_t hill_climb(BlockState& state);

/// Minimum-Σ partition search: agglomerative start plus MCMC refinement,
/// best of cfg.restarts independent runs. Deterministic for a given seed
/// regardless of cfg.jobs.
InferenceResult infer(const Graph& g, Variant v, const InferenceConfig& cfg = {},
                      const QTable& qt = QTable::shared());

/// Partitions visited by a β = 1 chain (one every `thin` sweeps after
/// `burn_in` sweeps), starting from `start`.
std::vector<Partition> sample_partitions(const Graph& g, Variant v, const Partition& start,
                                         int burn_in, int samples, int thin,
                                         std::uint64_t seed,
                                         const QTable& qt = QTable::shared());

/// Fraction of nodes whose labels agree under the best one-to-one matching
/// of blocks of `a` to blocks of `b` (maximum-weight assignment on the
/// contingency table).
double partition_overlap(const Partition& a, const Partition& b);

}  // namespace metablox

#endif  // METABLOX_INFERENCE_HPP_
