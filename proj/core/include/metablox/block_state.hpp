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

#ifndef METABLOX_BLOCK_STATE_HPP_
#define METABLOX_BLOCK_STATE_HPP_

#include <span>
#include <unordered_map>
#include <vector>

#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"
#include "metablox/rng.hpp"

namespace metablox {

/// Mutable partition of a graph with incrementally maintained block
/// statistics and description length.
///
/// Σ decomposes as
///   const + global(B, e_in) + Σ_r block(n_r, e_r, e_rr)
///         + Σ_{r<s} pair(e_rs) + Σ_r Σ_k hist(η_k^r),
/// so a node move or block merge only touches the terms of the blocks and
/// block pairs it changes. Block labels live in [0, N); emptied labels are
/// recycled. Not thread-safe: one state per search thread.
class BlockState {
 public:
  static constexpr BlockId kNewBlock = -1;

  BlockState(const Graph& g, const Partition& p, Variant v,
             const QTable& qt = QTable::shared());

  const Graph& graph() const { return *graph_; }
  Variant variant() const { return variant_; }

  std::size_t num_blocks() const { return active_.size(); }
  std::span<const BlockId> active_blocks() const { return active_; }
  BlockId block_of(NodeId i) const { return labels_[static_cast<std::size_t>(i)]; }
  Count block_size(BlockId r) const { return size_[static_cast<std::size_t>(r)]; }
  Count block_degree(BlockId r) const { return degree_sum_[static_cast<std::size_t>(r)]; }
  /// e_rs; the diagonal holds twice the internal edge count.
  Count edges_between(BlockId r, BlockId s) const;
  std::span<const NodeId> members(BlockId r) const {
    return members_[static_cast<std::size_t>(r)];
  }
  const std::unordered_map<BlockId, Count>& block_neighbors(BlockId r) const {
    return ers_[static_cast<std::size_t>(r)];
  }
  Count e_in() const { return e_in_; }

  /// Tracked Σ (sum of applied deltas since the last resync).
  double sigma() const { return sigma_; }
  /// Σ evaluated from scratch through dl().
  double recompute_sigma() const;
  /// Replaces the tracked Σ with the from-scratch value; returns the drift.
  double resync();

  /// Exact ΔΣ of moving node i to block s (kNewBlock: a fresh block).
  double move_delta(NodeId i, BlockId s) const;
  /// Applies the move, adding `delta` to the tracked Σ. Returns the
  /// destination label.
  BlockId apply_move(NodeId i, BlockId s, double delta);
  BlockId move_node(NodeId i, BlockId s) { return apply_move(i, s, move_delta(i, s)); }

  /// Exact ΔΣ of merging block r into block s.
  double merge_delta(BlockId r, BlockId s) const;
  void merge(BlockId r, BlockId s);

  /// Current assignment, relabelled contiguously in first-appearance order.
  Partition partition() const;
  std::span<const BlockId> raw_labels() const { return labels_; }
  /// Resets to another assignment of the same graph.
  void assign(const Partition& p);

  // Proposal helpers ------------------------------------------------------

  /// Uniformly random active block.
  BlockId random_block(Rng& rng) const;
  /// Node of block r drawn with probability k_u / e_r (r must have e_r > 0).
  NodeId random_stub_node(BlockId r, Rng& rng) const;
  /// Draws s with probability Σ_t (m_t / k_i) (e_ts + ε) / (e_t + ε B), where
  /// m_t counts neighbours of i in block t; uniform when k_i = 0.
  BlockId propose_block(NodeId i, double epsilon, Rng& rng) const;
  /// Probability that propose_block(i, ...) returns s in the current state.
  double proposal_probability(NodeId i, BlockId s, double epsilon) const;
  /// Probability that propose_block(i, ...) would return i's current block r
  /// after i has been moved to s (existing or kNewBlock), given that r is not
  /// emptied by the move.
  double reverse_proposal_probability(NodeId i, BlockId s, double epsilon) const;

 private:
  double block_term(Count n, Count er, Count err) const;
  double pair_term(Count ers) const;
  double hist_term(Count eta) const;
  double global_term(Count B, Count e_in) const;

  // Fills nb_blocks_/nb_count_ with the blocks of i's neighbours.
  void tally_neighbors(NodeId i) const;
  Count tally(BlockId t) const {
    return nb_count_[static_cast<std::size_t>(t)];
  }
  void add_edge_count(BlockId r, BlockId s, Count delta);
  void activate(BlockId r);
  void deactivate(BlockId r);

  const Graph* graph_;
  const QTable* qt_;
  Variant variant_;
  bool degree_corrected_;
  bool has_pair_terms_;

  std::vector<BlockId> labels_;
  std::vector<Count> size_;
  std::vector<Count> degree_sum_;
  std::vector<std::unordered_map<BlockId, Count>> ers_;
  std::vector<std::unordered_map<Count, Count>> hist_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<std::size_t> member_pos_;
  std::vector<BlockId> active_;
  std::vector<std::size_t> active_pos_;
  std::vector<BlockId> free_;
  Count e_in_ = 0;
  double sigma_ = 0.0;

  // Scratch for neighbour tallies.
  mutable std::vector<Count> nb_count_;
  mutable std::vector<BlockId> nb_blocks_;
};

}  // namespace metablox

#endif  // METABLOX_BLOCK_STATE_HPP_
