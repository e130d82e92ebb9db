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

#include "metablox/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace metablox {

namespace {

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

void check_edges(Count num_edges) {
  if (num_edges < 1) throw std::invalid_argument("edge count must be >= 1");
}

// Labels with the given block sizes, randomly laid out over node ids.
std::vector<BlockId> shuffled_labels(std::span<const Count> sizes, Rng& rng) {
  std::vector<BlockId> labels;
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    labels.insert(labels.end(), static_cast<std::size_t>(sizes[r]), static_cast<BlockId>(r));
  }
  rng.shuffle(std::span<BlockId>(labels));
  return labels;
}

// Appends `quota` distinct uniform node pairs between `a` and `b` (within `a`
// when `same`).
void place_edges(std::span<const NodeId> a, std::span<const NodeId> b, bool same, Count quota,
                 Rng& rng, std::vector<Edge>& out) {
  if (quota == 0) return;
  const auto na = static_cast<Count>(a.size());
  const auto nb = static_cast<Count>(b.size());
  const Count available = same ? na * (na - 1) / 2 : na * nb;
  if (quota > available) {
    throw std::invalid_argument("block-pair edge quota " + std::to_string(quota) +
                                " exceeds the " + std::to_string(available) +
                                " available node pairs");
  }
  auto make = [](NodeId u, NodeId v) { return u < v ? Edge{u, v} : Edge{v, u}; };
  if (quota * 3 > available) {
    std::vector<Edge> all;
    all.reserve(static_cast<std::size_t>(available));
    for (Count i = 0; i < na; ++i) {
      for (Count j = same ? i + 1 : 0; j < (same ? na : nb); ++j) {
        all.push_back(make(a[static_cast<std::size_t>(i)],
                           (same ? a : b)[static_cast<std::size_t>(j)]));
      }
    }
    for (Count k = 0; k < quota; ++k) {
      const auto j = static_cast<std::size_t>(k) +
                     static_cast<std::size_t>(rng.uniform_index(all.size() - static_cast<std::size_t>(k)));
      std::swap(all[static_cast<std::size_t>(k)], all[j]);
      out.push_back(all[static_cast<std::size_t>(k)]);
    }
    return;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(quota) * 2);
  const auto& other = same ? a : b;
  while (static_cast<Count>(seen.size()) < quota) {
    const NodeId u = a[static_cast<std::size_t>(rng.uniform_index(a.size()))];
    const NodeId v = other[static_cast<std::size_t>(rng.uniform_index(other.size()))];
    if (u == v) continue;
    const Edge e = make(u, v);
    const auto key = (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
    if (seen.insert(key).second) out.push_back(e);
  }
}

std::vector<std::vector<NodeId>> members_of(std::span<const BlockId> labels, std::size_t blocks) {
  std::vector<std::vector<NodeId>> members(blocks);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<NodeId>(i));
  }
  return members;
}

// Edge-unit weights of the unordered block pairs r <= s, row-major.
std::vector<double> pair_weights(const BlockMatrix& m) {
  std::vector<double> w;
  for (std::size_t r = 0; r < m.planted_blocks; ++r) {
    for (std::size_t s = r; s < m.planted_blocks; ++s) {
      w.push_back(r == s ? m.at(r, r) / 2.0 : m.at(r, s));
    }
  }
  return w;
}

// Position of the unordered pair {r, s} in the row-major r <= s ordering.
std::size_t pair_index(std::size_t r, std::size_t s, std::size_t blocks) {
  if (r > s) std::swap(r, s);
  return r * blocks - r * (r - 1) / 2 + (s - r);
}

}  // namespace

BlockMatrix::BlockMatrix(std::size_t blocks, std::vector<double> values)
    : planted_blocks(blocks), theta(std::move(values)) {
  if (blocks == 0 || theta.size() != blocks * blocks) {
    throw std::invalid_argument("block matrix must be B×B with B >= 1");
  }
  for (std::size_t r = 0; r < blocks; ++r) {
    for (std::size_t s = 0; s < blocks; ++s) {
      if (!(at(r, s) >= 0.0) || !std::isfinite(at(r, s))) {
        throw std::invalid_argument("block matrix entries must be finite and nonnegative");
      }
      if (at(r, s) != at(s, r)) throw std::invalid_argument("block matrix must be symmetric");
    }
  }
  if (!(total() > 0.0)) throw std::invalid_argument("block matrix has zero mass");
}

double BlockMatrix::total() const { return std::accumulate(theta.begin(), theta.end(), 0.0); }

BlockMatrix theta_bc(Count num_edges, double mu) { return theta_bc(num_edges, mu, 2); }

BlockMatrix theta_bc(Count num_edges, double mu, std::size_t blocks) {
  check_edges(num_edges);
  check_unit(mu, "mu");
  if (blocks < 2) throw std::invalid_argument("theta_bc needs at least 2 blocks");
  const double scale = 2.0 * static_cast<double>(num_edges);
  std::vector<double> theta(blocks * blocks, scale * mu / static_cast<double>(blocks - 1));
  for (std::size_t r = 0; r < blocks; ++r) theta[r * blocks + r] = scale * (1.0 - mu);
  return BlockMatrix(blocks, std::move(theta));
}

BlockMatrix theta_cp(Count num_edges, double lambda) {
  check_edges(num_edges);
  check_unit(lambda, "lambda");
  const double scale = 2.0 * static_cast<double>(num_edges);
  return BlockMatrix(2, {scale * (1.0 - lambda), scale * 0.5, scale * 0.5, scale * lambda});
}

Count SyntheticSpec::target_edges() const {
  return static_cast<Count>(
      std::llround(static_cast<double>(num_nodes) * expected_degree / 2.0));
}

void SyntheticSpec::validate() const {
  if (num_nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  if (!(expected_degree > 0.0)) throw std::invalid_argument("expected degree must be > 0");
  check_unit(rho, "rho");
  if (matrices.empty()) throw std::invalid_argument("no block matrix given");
  for (const auto& m : matrices) {
    if (m.planted_blocks > num_nodes) {
      throw std::invalid_argument("more planted blocks than nodes");
    }
  }
}

std::vector<Count> largest_remainder(std::span<const double> weights, Count total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<Count> out(weights.size(), 0);
  if (weights.empty() || total == 0) return out;
  if (!(sum > 0.0)) throw std::invalid_argument("weights sum to zero");
  std::vector<double> remainder(weights.size());
  Count assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double share = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<Count>(std::floor(share));
    remainder[i] = share - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size(), ++assigned) {
    ++out[order[k]];
  }
  return out;
}

std::vector<Count> balanced_sizes(std::size_t num_nodes, std::size_t blocks) {
  std::vector<Count> sizes(blocks, static_cast<Count>(num_nodes / blocks));
  for (std::size_t r = 0; r < num_nodes % blocks; ++r) ++sizes[r];
  return sizes;
}

SbmSample sbm_generate(const SyntheticSpec& spec) {
  spec.validate();
  const BlockMatrix& m = spec.matrices.front();
  const std::size_t B = m.planted_blocks;
  Rng rng(derive_seed(spec.seed, stream::kSynthetic, 0));

  const auto sizes = balanced_sizes(spec.num_nodes, B);
  auto labels = shuffled_labels(sizes, rng);
  const auto members = members_of(labels, B);
  const auto weights = pair_weights(m);
  const auto quotas = largest_remainder(weights, spec.target_edges());

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(spec.target_edges()));
  std::size_t k = 0;
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t s = r; s < B; ++s, ++k) {
      place_edges(members[r], members[s], r == s, quotas[k], rng, edges);
    }
  }
  return {Graph(spec.num_nodes, std::move(edges)), Partition::canonical(labels)};
}

ScbmSample scbm_generate(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.matrices.size() != 2 || spec.matrices[0].planted_blocks != 2 ||
      spec.matrices[1].planted_blocks != 2) {
    throw std::invalid_argument("scbm_generate needs two 2×2 block matrices");
  }
  constexpr std::size_t kCells = 4;
  constexpr std::size_t kCellPairs = kCells * (kCells + 1) / 2;
  auto bc_of = [](std::size_t c) { return c / 2; };
  auto cp_of = [](std::size_t c) { return c % 2; };

  Rng rng(derive_seed(spec.seed, stream::kSynthetic, 0));
  const auto sizes = balanced_sizes(spec.num_nodes, kCells);
  const auto cells = shuffled_labels(sizes, rng);
  const auto members = members_of(cells, kCells);

  const auto E = static_cast<double>(spec.target_edges());
  std::array<std::vector<double>, 2> targets;
  for (std::size_t t = 0; t < 2; ++t) {
    targets[t] = pair_weights(spec.matrices[t]);
    const double sum = std::accumulate(targets[t].begin(), targets[t].end(), 0.0);
    for (double& x : targets[t]) x *= E / sum;
  }

  std::array<std::size_t, kCellPairs> cell_a{}, cell_b{};
  std::array<double, kCellPairs> x{};
  std::size_t k = 0;
  for (std::size_t c = 0; c < kCells; ++c) {
    for (std::size_t d = c; d < kCells; ++d, ++k) {
      cell_a[k] = c;
      cell_b[k] = d;
      const auto nc = static_cast<double>(sizes[c]);
      const auto nd = static_cast<double>(sizes[d]);
      x[k] = c == d ? nc * (nc - 1.0) / 2.0 : nc * nd;
    }
  }

  auto marginal_of = [&](std::size_t t, std::size_t pair) {
    const auto proj = [&](std::size_t c) { return t == 0 ? bc_of(c) : cp_of(c); };
    return pair_index(proj(cell_a[pair]), proj(cell_b[pair]), 2);
  };

  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-8;
  bool converged = false;
  for (int it = 0; it < kMaxIterations && !converged; ++it) {
    for (std::size_t t = 0; t < 2; ++t) {
      std::array<double, 3> sums{};
      for (std::size_t p = 0; p < kCellPairs; ++p) sums[marginal_of(t, p)] += x[p];
      for (std::size_t p = 0; p < kCellPairs; ++p) {
        const auto m = marginal_of(t, p);
        x[p] = sums[m] > 0.0 ? x[p] * targets[t][m] / sums[m] : 0.0;
      }
    }
    converged = true;
    for (std::size_t t = 0; t < 2 && converged; ++t) {
      std::array<double, 3> sums{};
      for (std::size_t p = 0; p < kCellPairs; ++p) sums[marginal_of(t, p)] += x[p];
      for (std::size_t m = 0; m < 3; ++m) {
        if (std::abs(sums[m] - targets[t][m]) > kTolerance * std::max(targets[t][m], 1.0)) {
          converged = false;
        }
      }
    }
  }
  if (!converged) {
    throw std::runtime_error("proportional fitting did not converge: marginals of the two "
                             "block matrices are infeasible for this cell layout");
  }

  const auto quotas = largest_remainder(x, spec.target_edges());
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(spec.target_edges()));
  for (std::size_t p = 0; p < kCellPairs; ++p) {
    place_edges(members[cell_a[p]], members[cell_b[p]], cell_a[p] == cell_b[p], quotas[p], rng,
                edges);
  }

  std::vector<BlockId> bc(spec.num_nodes), cp(spec.num_nodes);
  for (std::size_t i = 0; i < spec.num_nodes; ++i) {
    bc[i] = static_cast<BlockId>(bc_of(static_cast<std::size_t>(cells[i])));
    cp[i] = static_cast<BlockId>(cp_of(static_cast<std::size_t>(cells[i])));
  }
  return {Graph(spec.num_nodes, std::move(edges)), Partition::canonical(bc),
          Partition::canonical(cp)};
}

Partition correlated_metadata(const Partition& planted, double rho, Rng& rng) {
  check_unit(rho, "rho");
  const double keep = (1.0 + rho) / 2.0;
  const auto B = static_cast<std::uint64_t>(planted.num_blocks());
  std::vector<BlockId> labels(planted.size());
  for (std::size_t i = 0; i < planted.size(); ++i) {
    const BlockId own = planted[i];
    if (B < 2 || rng.bernoulli(keep)) {
      labels[i] = own;
      continue;
    }
    auto other = static_cast<BlockId>(rng.uniform_index(B - 1));
    if (other >= own) ++other;
    labels[i] = other;
  }
  return Partition::canonical(labels);
}

}  // namespace metablox
