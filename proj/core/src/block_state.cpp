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

#include "metablox/block_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metablox {

BlockState::BlockState(const Graph& g, const Partition& p, Variant v, const QTable& qt)
    : graph_(&g),
      qt_(&qt),
      variant_(v),
      degree_corrected_(is_degree_corrected(v)),
      has_pair_terms_(!is_planted_partition(v)) {
  if (degree_corrected_) {
    qt.reserve(2 * static_cast<std::int64_t>(g.num_edges()),
               static_cast<std::int64_t>(g.num_nodes()));
  }
  assign(p);
}

void BlockState::assign(const Partition& p) {
  const Graph& g = *graph_;
  const std::size_t n = g.num_nodes();
  if (p.size() != n) throw std::invalid_argument("partition does not match graph size");
  const std::size_t B = p.num_blocks();

  labels_.assign(p.labels().begin(), p.labels().end());
  size_.assign(n, 0);
  degree_sum_.assign(n, 0);
  ers_.assign(n, {});
  hist_.assign(degree_corrected_ ? n : 0, {});
  members_.assign(n, {});
  member_pos_.assign(n, 0);
  active_.clear();
  active_pos_.assign(n, 0);
  free_.clear();
  for (std::size_t r = n; r-- > B;) free_.push_back(static_cast<BlockId>(r));
  for (std::size_t r = 0; r < B; ++r) activate(static_cast<BlockId>(r));
  nb_count_.assign(n, 0);
  nb_blocks_.clear();
  e_in_ = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(labels_[i]);
    ++size_[r];
    degree_sum_[r] += g.degrees()[i];
    member_pos_[i] = members_[r].size();
    members_[r].push_back(static_cast<NodeId>(i));
    if (degree_corrected_) ++hist_[r][g.degrees()[i]];
  }
  for (const auto& e : g.edges()) {
    const BlockId r = labels_[static_cast<std::size_t>(e.u)];
    const BlockId t = labels_[static_cast<std::size_t>(e.v)];
    add_edge_count(r, t, r == t ? 2 : 1);
    if (r == t) ++e_in_;
  }
  sigma_ = recompute_sigma();
}

Count BlockState::edges_between(BlockId r, BlockId s) const {
  const auto& row = ers_[static_cast<std::size_t>(r)];
  const auto it = row.find(s);
  return it == row.end() ? 0 : it->second;
}

void BlockState::add_edge_count(BlockId r, BlockId s, Count delta) {
  auto bump = [delta](std::unordered_map<BlockId, Count>& row, BlockId key) {
    auto it = row.try_emplace(key, 0).first;
    it->second += delta;
    if (it->second == 0) row.erase(it);
  };
  bump(ers_[static_cast<std::size_t>(r)], s);
  if (r != s) bump(ers_[static_cast<std::size_t>(s)], r);
}

void BlockState::activate(BlockId r) {
  active_pos_[static_cast<std::size_t>(r)] = active_.size();
  active_.push_back(r);
}

void BlockState::deactivate(BlockId r) {
  const std::size_t pos = active_pos_[static_cast<std::size_t>(r)];
  const BlockId last = active_.back();
  active_[pos] = last;
  active_pos_[static_cast<std::size_t>(last)] = pos;
  active_.pop_back();
}

double BlockState::recompute_sigma() const {
  return dl(*graph_, partition(), variant_, *qt_).total;
}

double BlockState::resync() {
  const double fresh = recompute_sigma();
  const double drift = sigma_ - fresh;
  sigma_ = fresh;
  return drift;
}

Partition BlockState::partition() const { return Partition::canonical(labels_); }

// ---------------------------------------------------------------------------
// Σ terms

double BlockState::block_term(Count n, Count er, Count err) const {
  if (n == 0) return 0.0;
  if (variant_ == Variant::kNdc) {
    const double lik = er > 0 ? static_cast<double>(er) * std::log(static_cast<double>(n)) : 0.0;
    return lik - log_double_factorial_even(err) - log_factorial(n);
  }
  double acc = log_factorial(er) - log_double_factorial_even(err) + qt_->log_q(er, n);
  if (variant_ == Variant::kPpUniform) acc += log_factorial(err / 2);
  return acc;
}

double BlockState::pair_term(Count ers) const {
  return has_pair_terms_ ? -log_factorial(ers) : 0.0;
}

double BlockState::hist_term(Count eta) const {
  return degree_corrected_ ? -log_factorial(eta) : 0.0;
}

double BlockState::global_term(Count B, Count e_in) const {
  const auto N = static_cast<Count>(graph_->num_nodes());
  const auto E = static_cast<Count>(graph_->num_edges());
  double acc = log_binomial(N - 1, B - 1);
  if (!is_planted_partition(variant_)) return acc + log_multiset(B * (B + 1) / 2, E);

  const Count e_out = E - e_in;
  acc += -log_factorial(e_out);
  if (e_out > 0) acc += static_cast<double>(e_out) * log_binomial(B, 2);
  if (B > 1) acc += std::log(static_cast<double>(E) + 1.0);
  if (variant_ == Variant::kPpUniform) {
    acc += -log_factorial(e_in) + static_cast<double>(e_in) * std::log(static_cast<double>(B));
  } else {
    acc += log_binomial(B + e_in - 1, e_in);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Moves

void BlockState::tally_neighbors(NodeId i) const {
  for (const BlockId t : nb_blocks_) nb_count_[static_cast<std::size_t>(t)] = 0;
  nb_blocks_.clear();
  for (const NodeId j : graph_->neighbors(i)) {
    const BlockId t = labels_[static_cast<std::size_t>(j)];
    if (nb_count_[static_cast<std::size_t>(t)]++ == 0) nb_blocks_.push_back(t);
  }
}

double BlockState::move_delta(NodeId i, BlockId s) const {
  const BlockId r = block_of(i);
  if (s == r) return 0.0;
  const Count nr = block_size(r);
  const bool fresh = s == kNewBlock;
  if (fresh && nr == 1) return 0.0;

  tally_neighbors(i);
  const Count k = graph_->degree(i);
  const Count mr = tally(r);
  const Count ms = fresh ? 0 : tally(s);
  const auto B = static_cast<Count>(num_blocks());
  const Count B_after = B - (nr == 1 ? 1 : 0) + (fresh ? 1 : 0);
  const Count ein_after = e_in_ - mr + ms;

  double d = global_term(B_after, ein_after) - global_term(B, e_in_);

  const Count er = block_degree(r);
  const Count err = edges_between(r, r);
  d += block_term(nr - 1, er - k, err - 2 * mr) - block_term(nr, er, err);

  const Count ns = fresh ? 0 : block_size(s);
  const Count es = fresh ? 0 : block_degree(s);
  const Count ess = fresh ? 0 : edges_between(s, s);
  d += block_term(ns + 1, es + k, ess + 2 * ms) - block_term(ns, es, ess);

  if (has_pair_terms_) {
    for (const BlockId t : nb_blocks_) {
      if (t == r || t == s) continue;
      const Count mt = tally(t);
      const Count ert = edges_between(r, t);
      const Count est = fresh ? 0 : edges_between(s, t);
      d += pair_term(ert - mt) - pair_term(ert);
      d += pair_term(est + mt) - pair_term(est);
    }
    const Count ers = fresh ? 0 : edges_between(r, s);
    d += pair_term(ers + mr - ms) - pair_term(ers);
  }

  if (degree_corrected_) {
    const auto& hr = hist_[static_cast<std::size_t>(r)];
    const Count c = hr.at(k);
    d += hist_term(c - 1) - hist_term(c);
    Count cs = 0;
    if (!fresh) {
      const auto& hs = hist_[static_cast<std::size_t>(s)];
      if (const auto it = hs.find(k); it != hs.end()) cs = it->second;
    }
    d += hist_term(cs + 1) - hist_term(cs);
  }
  return d;
}

BlockId BlockState::apply_move(NodeId i, BlockId s, double delta) {
  const BlockId r = block_of(i);
  if (s == r) return r;
  if (s == kNewBlock && block_size(r) == 1) return r;

  tally_neighbors(i);
  if (s == kNewBlock) {
    s = free_.back();
    free_.pop_back();
    activate(s);
  }
  const Count k = graph_->degree(i);
  for (const BlockId t : nb_blocks_) {
    const Count mt = tally(t);
    if (t == r) {
      add_edge_count(r, r, -2 * mt);
      add_edge_count(r, s, mt);
    } else if (t == s) {
      add_edge_count(r, s, -mt);
      add_edge_count(s, s, 2 * mt);
    } else {
      add_edge_count(r, t, -mt);
      add_edge_count(s, t, mt);
    }
  }
  e_in_ += tally(s) - tally(r);

  const auto ru = static_cast<std::size_t>(r);
  const auto su = static_cast<std::size_t>(s);
  const auto iu = static_cast<std::size_t>(i);
  degree_sum_[ru] -= k;
  degree_sum_[su] += k;
  --size_[ru];
  ++size_[su];

  auto& from = members_[ru];
  const std::size_t pos = member_pos_[iu];
  from[pos] = from.back();
  member_pos_[static_cast<std::size_t>(from[pos])] = pos;
  from.pop_back();
  member_pos_[iu] = members_[su].size();
  members_[su].push_back(i);

  if (degree_corrected_) {
    auto it = hist_[ru].find(k);
    if (--it->second == 0) hist_[ru].erase(it);
    ++hist_[su][k];
  }
  labels_[iu] = s;
  if (size_[ru] == 0) {
    deactivate(r);
    free_.push_back(r);
  }
  sigma_ += delta;
  return s;
}

double BlockState::merge_delta(BlockId r, BlockId s) const {
  if (r == s) return 0.0;
  const auto B = static_cast<Count>(num_blocks());
  const Count ers = edges_between(r, s);
  double d = global_term(B - 1, e_in_ + ers) - global_term(B, e_in_);

  const Count nr = block_size(r), er = block_degree(r), err = edges_between(r, r);
  const Count ns = block_size(s), es = block_degree(s), ess = edges_between(s, s);
  d += block_term(nr + ns, er + es, err + ess + 2 * ers) - block_term(nr, er, err) -
       block_term(ns, es, ess);

  if (has_pair_terms_) {
    for (const auto& [t, ert] : ers_[static_cast<std::size_t>(r)]) {
      if (t == r || t == s) continue;
      const Count est = edges_between(s, t);
      d += pair_term(est + ert) - pair_term(est) - pair_term(ert);
    }
    d -= pair_term(ers);
  }
  if (degree_corrected_) {
    const auto& hs = hist_[static_cast<std::size_t>(s)];
    for (const auto& [k, c] : hist_[static_cast<std::size_t>(r)]) {
      Count cs = 0;
      if (const auto it = hs.find(k); it != hs.end()) cs = it->second;
      d += hist_term(c + cs) - hist_term(c) - hist_term(cs);
    }
  }
  return d;
}

void BlockState::merge(BlockId r, BlockId s) {
  if (r == s) return;
  const std::vector<NodeId> moving(members(r).begin(), members(r).end());
  for (const NodeId i : moving) move_node(i, s);
}

// ---------------------------------------------------------------------------
// Proposals

BlockId BlockState::random_block(Rng& rng) const {
  return active_[static_cast<std::size_t>(rng.uniform_index(active_.size()))];
}

NodeId BlockState::random_stub_node(BlockId r, Rng& rng) const {
  const auto& m = members_[static_cast<std::size_t>(r)];
  const auto kmax = static_cast<double>(graph_->max_degree());
  for (int attempt = 0; attempt < 4096; ++attempt) {
    const NodeId u = m[static_cast<std::size_t>(rng.uniform_index(m.size()))];
    if (rng.uniform() * kmax < static_cast<double>(graph_->degree(u))) return u;
  }
  // Rejection is slow for blocks of low-degree nodes; sample exactly.
  Count target = static_cast<Count>(rng.uniform_index(
      static_cast<std::uint64_t>(block_degree(r))));
  for (const NodeId u : m) {
    target -= graph_->degree(u);
    if (target < 0) return u;
  }
  return m.back();
}

BlockId BlockState::propose_block(NodeId i, double epsilon, Rng& rng) const {
  const auto nbrs = graph_->neighbors(i);
  if (nbrs.empty()) return random_block(rng);
  const NodeId j = nbrs[static_cast<std::size_t>(rng.uniform_index(nbrs.size()))];
  const BlockId t = block_of(j);
  const double uniform_mass = epsilon * static_cast<double>(num_blocks());
  if (rng.uniform() * (static_cast<double>(block_degree(t)) + uniform_mass) < uniform_mass) {
    return random_block(rng);
  }
  const NodeId u = random_stub_node(t, rng);
  const auto un = graph_->neighbors(u);
  return block_of(un[static_cast<std::size_t>(rng.uniform_index(un.size()))]);
}

double BlockState::proposal_probability(NodeId i, BlockId s, double epsilon) const {
  const Count k = graph_->degree(i);
  const auto B = static_cast<double>(num_blocks());
  if (k == 0) return 1.0 / B;
  tally_neighbors(i);
  double p = 0.0;
  for (const BlockId t : nb_blocks_) {
    p += static_cast<double>(tally(t)) *
         (static_cast<double>(edges_between(t, s)) + epsilon) /
         (static_cast<double>(block_degree(t)) + epsilon * B);
  }
  return p / static_cast<double>(k);
}

double BlockState::reverse_proposal_probability(NodeId i, BlockId s, double epsilon) const {
  const BlockId r = block_of(i);
  const bool fresh = s == kNewBlock;
  const Count k = graph_->degree(i);
  const auto B_after = static_cast<double>(num_blocks() + (fresh ? 1 : 0));
  if (k == 0) return 1.0 / B_after;
  tally_neighbors(i);
  const Count mr = tally(r);
  const Count ms = fresh ? 0 : tally(s);
  double p = 0.0;
  for (const BlockId t : nb_blocks_) {
    const Count mt = tally(t);
    Count et = block_degree(t);
    Count etr = 0;
    if (t == r) {
      et -= k;
      etr = edges_between(r, r) - 2 * mr;
    } else if (t == s) {
      et += k;
      etr = edges_between(s, r) + mr - ms;
    } else {
      etr = edges_between(t, r) - mt;
    }
    p += static_cast<double>(mt) * (static_cast<double>(etr) + epsilon) /
         (static_cast<double>(et) + epsilon * B_after);
  }
  return p / static_cast<double>(k);
}

}  // namespace metablox
