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

#include "metablox/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <spdlog/spdlog.h>

#include "metablox/parallel.hpp"

namespace metablox {
namespace {

constexpr double kTieTolerance = 1e-10;

std::uint64_t variant_index(Variant v) { return static_cast<std::uint64_t>(v); }

bool greedy_accept(double delta, Rng& rng) {
  if (delta < -kTieTolerance) return true;
  if (delta > kTieTolerance) return false;
  return rng.bernoulli(0.5);
}

bool metropolis_accept(double beta, double delta, double log_ratio, Rng& rng) {
  if (std::isinf(beta)) return greedy_accept(delta, rng);
  const double log_a = -beta * delta + log_ratio;
  if (log_a >= 0.0) return true;
  return std::log(rng.uniform()) < log_a;
}

// ln(2^n − 2): number of ordered two-sided splits with both sides nonempty.
double log_ordered_splits(Count n) {
  return static_cast<double>(n) * std::numbers::ln2 +
         std::log1p(-std::exp2(1.0 - static_cast<double>(n)));
}

// Probability that the merge proposal picks the unordered pair {r, s}.
double merge_proposal_probability(const BlockState& st, BlockId r, BlockId s,
                                  double epsilon) {
  const auto B = static_cast<double>(st.num_blocks());
  const auto ers = static_cast<double>(st.edges_between(r, s));
  auto leg = [&](BlockId a) {
    const auto out = static_cast<double>(st.block_degree(a) - st.edges_between(a, a));
    return (ers + epsilon) / (out + epsilon * (B - 1.0));
  };
  return (leg(r) + leg(s)) / B;
}

// Draws a merge partner for r: uniform over other blocks with weight ε each,
// otherwise proportional to e_rs.
BlockId propose_merge_partner(const BlockState& st, BlockId r, double epsilon, Rng& rng) {
  const auto B = st.num_blocks();
  const double out =
      static_cast<double>(st.block_degree(r) - st.edges_between(r, r));
  const double uniform_mass = epsilon * static_cast<double>(B - 1);
  if (rng.uniform() * (out + uniform_mass) < uniform_mass) {
    const auto blocks = st.active_blocks();
    for (;;) {
      const BlockId s = blocks[static_cast<std::size_t>(rng.uniform_index(B))];
      if (s != r) return s;
    }
  }
  auto target = static_cast<Count>(rng.uniform_index(static_cast<std::uint64_t>(out)));
  BlockId last = r;
  for (const auto& [s, ers] : st.block_neighbors(r)) {
    if (s == r) continue;
    last = s;
    target -= ers;
    if (target < 0) return s;
  }
  return last;
}

bool merge_step(BlockState& st, Rng& rng, const SweepOptions& opts) {
  if (st.num_blocks() < 2) return false;
  const BlockId r = st.random_block(rng);
  const BlockId s = propose_merge_partner(st, r, opts.epsilon, rng);
  const double delta = st.merge_delta(r, s);
  double log_ratio = 0.0;
  if (!std::isinf(opts.beta)) {
    const double forward = merge_proposal_probability(st, r, s, opts.epsilon);
    const double log_reverse = std::log(2.0) -
                               std::log(static_cast<double>(st.num_blocks() - 1)) -
                               log_ordered_splits(st.block_size(r) + st.block_size(s));
    log_ratio = log_reverse - std::log(forward);
  }
  if (!metropolis_accept(opts.beta, delta, log_ratio, rng)) return false;
  st.merge(r, s);
  return true;
}

bool split_step(BlockState& st, Rng& rng, const SweepOptions& opts, std::vector<NodeId>& side) {
  const BlockId r = st.random_block(rng);
  const Count n = st.block_size(r);
  if (n < 2) return false;
  const auto members = st.members(r);
  side.clear();
  while (side.empty() || static_cast<Count>(side.size()) == n) {
    side.clear();
    for (const NodeId i : members) {
      if (rng.bernoulli(0.5)) side.push_back(i);
    }
  }
  const double log_forward = -std::log(static_cast<double>(st.num_blocks())) +
                             std::log(2.0) - log_ordered_splits(n);
  double delta = 0.0;
  BlockId s = BlockState::kNewBlock;
  for (const NodeId i : side) {
    const double d = st.move_delta(i, s);
    delta += d;
    s = st.apply_move(i, s, d);
  }
  double log_ratio = 0.0;
  if (!std::isinf(opts.beta)) {
    log_ratio = std::log(merge_proposal_probability(st, r, s, opts.epsilon)) - log_forward;
  }
  if (metropolis_accept(opts.beta, delta, log_ratio, rng)) return true;
  st.merge(s, r);
  return false;
}

// Merge and split proposals are drawn from one kernel, each with probability
// 1/2, so that every move has its reverse in the same kernel.
std::size_t merge_split_pass(BlockState& st, Rng& rng, const SweepOptions& opts) {
  std::size_t accepted = 0;
  std::vector<NodeId> side;
  for (int a = 0; a < opts.merge_split_attempts; ++a) {
    const bool ok = rng.bernoulli(0.5) ? merge_step(st, rng, opts)
                                       : split_step(st, rng, opts, side);
    accepted += ok ? 1 : 0;
  }
  return accepted;
}

}  // namespace

void InferenceConfig::validate() const {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(sampling_fraction >= 0.0 && sampling_fraction <= 1.0)) {
    throw std::invalid_argument("sampling_fraction must lie in [0, 1]");
  }
  if (!(agglomeration_ratio > 1.0)) {
    throw std::invalid_argument("agglomeration_ratio must be > 1");
  }
  if (merge_candidates < 1) throw std::invalid_argument("merge_candidates must be >= 1");
  if (level_sweeps < 0) throw std::invalid_argument("level_sweeps must be >= 0");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
}

std::size_t mcmc_sweep(BlockState& st, Rng& rng, const SweepOptions& opts) {
  const Graph& g = st.graph();
  const double p_new = opts.allow_new_blocks ? opts.new_block_probability : 0.0;
  const bool greedy = std::isinf(opts.beta);

  std::vector<NodeId> order(g.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<NodeId>(order));

  std::size_t accepted = 0;
  for (const NodeId i : order) {
    const BlockId r = st.block_of(i);
    const bool fresh = p_new > 0.0 && rng.bernoulli(p_new);
    const BlockId s = fresh ? BlockState::kNewBlock : st.propose_block(i, opts.epsilon, rng);
    if (s == r) continue;
    const bool empties = st.block_size(r) == 1;
    if (fresh && empties) continue;
    // Without fresh-block proposals an emptying move has no reverse.
    if (!greedy && empties && p_new == 0.0) continue;

    const double delta = st.move_delta(i, s);
    double log_ratio = 0.0;
    if (!greedy) {
      const double forward =
          fresh ? p_new : (1.0 - p_new) * st.proposal_probability(i, s, opts.epsilon);
      const double reverse =
          empties ? p_new
                  : (1.0 - p_new) * st.reverse_proposal_probability(i, s, opts.epsilon);
      log_ratio = std::log(reverse) - std::log(forward);
    }
    if (metropolis_accept(opts.beta, delta, log_ratio, rng)) {
      st.apply_move(i, s, delta);
      ++accepted;
    }
  }

  if (opts.merge_split_probability > 0.0) {
    if (rng.bernoulli(opts.merge_split_probability)) accepted += merge_split_pass(st, rng, opts);
  }
  return accepted;
}

Partition agglomerative_init(const Graph& g, Variant v, const InferenceConfig& cfg, Rng& rng,
                             const QTable& qt) {
  const std::size_t n = g.num_nodes();
  std::vector<BlockId> singletons(n);
  std::iota(singletons.begin(), singletons.end(), 0);
  // Planted-partition variants price all between-block edges alike, so
  // their merge scores cannot tell which small blocks belong together; the
  // ladder is built with degree-corrected scores and judged under `v`.
  const Variant ladder = is_planted_partition(v) ? Variant::kDc : v;
  BlockState st(g, Partition(std::move(singletons)), ladder, qt);

  Partition best = st.partition();
  double best_sigma = ladder == v ? st.sigma() : dl(g, best, v, qt).total;

  SweepOptions level_opts;
  level_opts.beta = kGreedy;
  level_opts.epsilon = cfg.epsilon;
  level_opts.allow_new_blocks = false;
  level_opts.merge_split_probability = 0.0;

  struct Candidate {
    double delta;
    BlockId r;
    BlockId s;
  };
  std::vector<Candidate> candidates;
  std::vector<char> touched(n, 0);

  while (st.num_blocks() > 1) {
    const std::size_t B = st.num_blocks();
    auto target = static_cast<std::size_t>(std::floor(static_cast<double>(B) / cfg.agglomeration_ratio));
    target = std::clamp<std::size_t>(target, 1, B - 1);

    candidates.clear();
    const std::vector<BlockId> blocks(st.active_blocks().begin(), st.active_blocks().end());
    for (const BlockId r : blocks) {
      Candidate best_c{std::numeric_limits<double>::infinity(), r, r};
      for (int c = 0; c < cfg.merge_candidates; ++c) {
        BlockId s;
        const double er = static_cast<double>(st.block_degree(r));
        const double uniform_mass = cfg.epsilon * static_cast<double>(B);
        if (rng.uniform() * (er + uniform_mass) < uniform_mass) {
          s = st.random_block(rng);
        } else {
          // Neighbour block, or a neighbour's neighbour block to reach blocks
          // with similar (not necessarily assortative) connection patterns.
          const NodeId u = st.random_stub_node(r, rng);
          const auto un = g.neighbors(u);
          NodeId w = un[static_cast<std::size_t>(rng.uniform_index(un.size()))];
          if (rng.bernoulli(0.5)) {
            const auto wn = g.neighbors(w);
            w = wn[static_cast<std::size_t>(rng.uniform_index(wn.size()))];
          }
          s = st.block_of(w);
        }
        if (s == r) continue;
        const double d = st.merge_delta(r, s);
        if (d < best_c.delta) best_c = {d, r, s};
      }
      if (best_c.s != r) candidates.push_back(best_c);
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.delta, a.r, a.s) < std::tie(b.delta, b.r, b.s);
    });

    std::fill(touched.begin(), touched.end(), 0);
    std::size_t merged = 0;
    for (const auto& c : candidates) {
      if (st.num_blocks() <= target) break;
      auto& tr = touched[static_cast<std::size_t>(c.r)];
      auto& ts = touched[static_cast<std::size_t>(c.s)];
      if (tr || ts) continue;
      st.merge(c.r, c.s);
      tr = ts = 1;
      ++merged;
    }
    if (merged == 0) {
      // Every block drew itself; fall back to the cheapest merge overall.
      const BlockId r = blocks[0];
      BlockId best_s = blocks[1];
      double best_d = st.merge_delta(r, best_s);
      for (std::size_t j = 2; j < blocks.size(); ++j) {
        const double d = st.merge_delta(r, blocks[j]);
        if (d < best_d) best_d = d, best_s = blocks[j];
      }
      st.merge(r, best_s);
    }
    for (int sweep = 0; sweep < cfg.level_sweeps; ++sweep) mcmc_sweep(st, rng, level_opts);
    st.resync();
    const double sigma = ladder == v ? st.sigma() : dl(g, st.partition(), v, qt).total;
    if (sigma < best_sigma) {
      best_sigma = sigma;
      best = st.partition();
    }
  }
  return best;
}

std::size_t hill_climb(BlockState& st) {
  const Graph& g = st.graph();
  std::size_t changes = 0;
  for (;;) {
    std::size_t improved = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(g.num_nodes()); ++i) {
      double best_d = -kTieTolerance;
      BlockId best_s = st.block_of(i);
      const std::vector<BlockId> blocks(st.active_blocks().begin(), st.active_blocks().end());
      for (const BlockId s : blocks) {
        if (s == st.block_of(i)) continue;
        const double d = st.move_delta(i, s);
        if (d < best_d) best_d = d, best_s = s;
      }
      const double d_new = st.move_delta(i, BlockState::kNewBlock);
      if (d_new < best_d && st.block_size(st.block_of(i)) > 1) {
        best_d = d_new;
        best_s = BlockState::kNewBlock;
      }
      if (best_s != st.block_of(i)) {
        st.apply_move(i, best_s, best_d);
        ++improved;
      }
    }
    for (;;) {
      double best_d = -kTieTolerance;
      BlockId best_r = -1, best_s = -1;
      const std::vector<BlockId> blocks(st.active_blocks().begin(), st.active_blocks().end());
      for (std::size_t a = 0; a < blocks.size(); ++a) {
        for (std::size_t b = a + 1; b < blocks.size(); ++b) {
          const double d = st.merge_delta(blocks[a], blocks[b]);
          if (d < best_d) best_d = d, best_r = blocks[a], best_s = blocks[b];
        }
      }
      if (best_r < 0) break;
      st.merge(best_r, best_s);
      ++improved;
    }
    changes += improved;
    if (improved == 0) break;
  }
  return changes;
}

namespace {

struct RestartOutcome {
  Partition partition;
  double sigma = 0.0;
  std::vector<double> trace;
};

RestartOutcome run_restart(const Graph& g, Variant v, const InferenceConfig& cfg,
                           std::size_t restart, const QTable& qt) {
  Rng rng(derive_seed(cfg.seed, stream::kInference, restart * 8 + variant_index(v)));
  BlockState st(g, agglomerative_init(g, v, cfg, rng, qt), v, qt);

  RestartOutcome out;
  out.trace.reserve(static_cast<std::size_t>(cfg.sweeps) + 1);
  double best_sigma = st.sigma();
  std::vector<BlockId> best_labels(st.raw_labels().begin(), st.raw_labels().end());

  SweepOptions opts;
  opts.epsilon = cfg.epsilon;
  const auto sampling_sweeps =
      static_cast<int>(std::lround(cfg.sampling_fraction * static_cast<double>(cfg.sweeps)));
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    opts.beta = sweep < sampling_sweeps ? 1.0 : kGreedy;
    mcmc_sweep(st, rng, opts);
    if ((sweep + 1) % cfg.check_interval == 0) {
      const double drift = st.resync();
      if (std::abs(drift) > 1e-6) {
        spdlog::warn("infer: tracked description length drifted by {:.3g} nats", drift);
      }
    }
    out.trace.push_back(st.sigma());
    if (st.sigma() < best_sigma) {
      best_sigma = st.sigma();
      best_labels.assign(st.raw_labels().begin(), st.raw_labels().end());
    }
  }

  st.assign(Partition::canonical(best_labels));
  hill_climb(st);
  st.resync();
  out.partition = st.partition();
  out.sigma = st.sigma();
  out.trace.push_back(out.sigma);
  return out;
}

}  // namespace

InferenceResult infer(const Graph& g, Variant v, const InferenceConfig& cfg, const QTable& qt) {
  cfg.validate();
  const auto restarts = static_cast<std::size_t>(cfg.restarts);
  std::vector<RestartOutcome> outcomes(restarts);
  parallel_for(restarts, cfg.jobs,
               [&](std::size_t k) { outcomes[k] = run_restart(g, v, cfg, k, qt); });

  InferenceResult result;
  std::size_t best = 0;
  for (std::size_t k = 0; k < restarts; ++k) {
    result.restart_sigmas.push_back(outcomes[k].sigma);
    if (outcomes[k].sigma < outcomes[best].sigma) best = k;
  }
  result.winning_restart = best;
  result.best_partition = std::move(outcomes[best].partition);
  result.sigma_opt = outcomes[best].sigma;
  result.trace = std::move(outcomes[best].trace);
  return result;
}

std::vector<Partition> sample_partitions(const Graph& g, Variant v, const Partition& start,
                                         int burn_in, int samples, int thin,
                                         std::uint64_t seed, const QTable& qt) {
  BlockState st(g, start, v, qt);
  Rng rng(seed);
  SweepOptions opts;
  for (int s = 0; s < burn_in; ++s) mcmc_sweep(st, rng, opts);
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(std::max(0, samples)));
  for (int k = 0; k < samples; ++k) {
    for (int s = 0; s < std::max(1, thin); ++s) mcmc_sweep(st, rng, opts);
    out.push_back(st.partition());
  }
  return out;
}

namespace {

// Maximum-weight assignment of rows to distinct columns (rows <= cols),
// O(rows^2 cols) Hungarian algorithm on costs −w.
Count max_assignment(const std::vector<std::vector<Count>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows == 0 ? 0 : w[0].size();
  if (rows == 0) return 0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = -static_cast<double>(w[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Count total = 0;
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) total += w[p[j] - 1][j - 1];
  }
  return total;
}

}  // namespace

double partition_overlap(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions differ in length");
  if (a.size() == 0) return 1.0;
  const bool flip = a.num_blocks() > b.num_blocks();
  const Partition& rows = flip ? b : a;
  const Partition& cols = flip ? a : b;
  std::vector<std::vector<Count>> w(rows.num_blocks(), std::vector<Count>(cols.num_blocks(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++w[static_cast<std::size_t>(rows[i])][static_cast<std::size_t>(cols[i])];
  }
  return static_cast<double>(max_assignment(w)) / static_cast<double>(a.size());
}

}  // namespace metablox
