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

#include <gtest/gtest.h>

#include "metablox/block_state.hpp"
#include "oracle.hpp"

namespace metablox {
namespace {

Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }
  return Graph(n, std::move(edges));
}

TEST(BlockState, TracksDescriptionLength) {
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
  for (const Variant v : kAllVariants) {
    const Partition p({0, 0, 1, 1});
    BlockState st(g, p, v);
    EXPECT_NEAR(st.sigma(), dl(g, p, v).total, 1e-12);
    EXPECT_EQ(st.num_blocks(), 2u);
    EXPECT_EQ(st.partition(), p);
  }
}

TEST(BlockState, NullMoveIsFree) {
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
  BlockState st(g, Partition({0, 0, 1, 1}), Variant::kDc);
  EXPECT_EQ(st.move_delta(0, st.block_of(0)), 0.0);
}

TEST(BlockState, EveryMoveMatchesRecompute) {
  Rng rng(21);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 4 + rng.uniform_index(4);
    const Graph g = random_graph(n, 0.5, rng);
    oracle::for_each_partition(static_cast<int>(n), 3, [&](const std::vector<int>& labels) {
      const Partition p(std::vector<BlockId>(labels.begin(), labels.end()));
      for (const Variant v : kAllVariants) {
        BlockState st(g, p, v);
        const double base = st.sigma();
        for (std::size_t i = 0; i < n; ++i) {
          const auto node = static_cast<NodeId>(i);
          std::vector<BlockId> targets(st.active_blocks().begin(), st.active_blocks().end());
          targets.push_back(BlockState::kNewBlock);
          for (const BlockId s : targets) {
            const BlockId from = st.block_of(node);
            const double delta = st.move_delta(node, s);
            st.apply_move(node, s, delta);
            ASSERT_NEAR(st.sigma(), st.recompute_sigma(), 1e-9) << to_string(v);
            ASSERT_NEAR(st.sigma() - base, delta, 1e-9);
            st.move_node(node, st.block_size(from) == 0 ? BlockState::kNewBlock : from);
            ASSERT_NEAR(st.sigma(), base, 1e-9);
          }
        }
      }
    });
  }
}

TEST(BlockState, MergeMatchesRecompute) {
  const Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
  for (const Variant v : kAllVariants) {
    BlockState st(path, Partition({0, 0, 1, 1}), v);
    const double delta = st.merge_delta(0, 1);
    const double before = st.sigma();
    st.merge(0, 1);
    EXPECT_NEAR(st.sigma() - before, delta, 1e-12);
    EXPECT_NEAR(st.sigma(), dl(path, Partition::single_block(4), v).total, 1e-12);
  }
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const Graph g = random_graph(15, 0.3, rng);
    std::vector<BlockId> raw(15);
    for (auto& x : raw) x = static_cast<BlockId>(rng.uniform_index(5));
    for (const Variant v : kAllVariants) {
      BlockState st(g, Partition::canonical(raw), v);
      while (st.num_blocks() > 1) {
        const BlockId r = st.active_blocks()[0], s = st.active_blocks()[1];
        const double delta = st.merge_delta(r, s);
        const double before = st.sigma();
        st.merge(r, s);
        ASSERT_NEAR(st.sigma() - before, delta, 1e-9);
        ASSERT_NEAR(st.sigma(), st.recompute_sigma(), 1e-9);
      }
    }
  }
}

TEST(BlockState, StatisticsStayConsistent) {
  Rng rng(4);
  const Graph g = random_graph(30, 0.2, rng);
  BlockState st(g, Partition::single_block(30), Variant::kDc);
  for (int step = 0; step < 500; ++step) {
    const auto i = static_cast<NodeId>(rng.uniform_index(30));
    const BlockId s = rng.bernoulli(0.1) ? BlockState::kNewBlock : st.random_block(rng);
    st.move_node(i, s);
  }
  const Partition p = st.partition();
  const BlockStats s = block_stats(g, p);
  check_block_stats(s, 30, g.num_edges());
  EXPECT_EQ(st.num_blocks(), p.num_blocks());
  EXPECT_NEAR(st.sigma(), dl(g, p, Variant::kDc).total, 1e-9);
  EXPECT_LT(std::abs(st.resync()), 1e-9);
}

TEST(BlockState, ProposalDistributionSumsToOne) {
  Rng rng(13);
  const Graph g = random_graph(20, 0.25, rng);
  std::vector<BlockId> raw(20);
  for (auto& x : raw) x = static_cast<BlockId>(rng.uniform_index(4));
  BlockState st(g, Partition::canonical(raw), Variant::kDc);
  for (NodeId i = 0; i < 20; ++i) {
    double total = 0.0;
    for (const BlockId s : st.active_blocks()) total += st.proposal_probability(i, s, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(BlockState, ProposalFrequenciesMatchProbabilities) {
  Rng rng(17);
  const Graph g = random_graph(12, 0.35, rng);
  BlockState st(g, Partition({0, 0, 0, 1, 1, 1, 2, 2, 2, 0, 1, 2}), Variant::kNdc);
  const NodeId i = 4;
  std::map<BlockId, double> freq;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) freq[st.propose_block(i, 1.0, rng)] += 1.0 / draws;
  for (const BlockId s : st.active_blocks()) {
    EXPECT_NEAR(freq[s], st.proposal_probability(i, s, 1.0), 0.005);
  }
}

TEST(BlockState, ReverseProposalMatchesStateAfterMove) {
  Rng rng(19);
  const Graph g = random_graph(14, 0.3, rng);
  std::vector<BlockId> raw(14);
  for (auto& x : raw) x = static_cast<BlockId>(rng.uniform_index(3));
  const Partition p = Partition::canonical(raw);
  for (NodeId i = 0; i < 14; ++i) {
    BlockState st(g, p, Variant::kDc);
    const BlockId r = st.block_of(i);
    if (st.block_size(r) < 2) continue;
    std::vector<BlockId> targets(st.active_blocks().begin(), st.active_blocks().end());
    targets.push_back(BlockState::kNewBlock);
    for (const BlockId s : targets) {
      if (s == r) continue;
      const double predicted = st.reverse_proposal_probability(i, s, 1.0);
      BlockState after(g, p, Variant::kDc);
      after.move_node(i, s);
      EXPECT_NEAR(after.proposal_probability(i, r, 1.0), predicted, 1e-12);
    }
  }
}

}  // namespace
}  // namespace metablox
