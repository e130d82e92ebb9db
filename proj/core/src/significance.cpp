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

#include "metablox/significance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "metablox/parallel.hpp"

namespace metablox {

Partition permute_labels(const Partition& d, Rng& rng) {
  std::vector<BlockId> labels(d.labels().begin(), d.labels().end());
  rng.shuffle(std::span<BlockId>(labels));
  return Partition(std::move(labels));
}

PermutationEnsemble randomized_dl_distribution(const Graph& g, const Partition& d, Variant v,
                                               std::size_t n_p, std::uint64_t seed,
                                               double alpha, std::size_t jobs,
                                               const QTable& qt) {
  if (d.size() != g.num_nodes()) {
    throw std::invalid_argument("metadata partition does not cover the graph");
  }
  PermutationEnsemble ens;
  ens.variant = v;
  ens.n_p = n_p;
  ens.alpha = alpha;
  ens.seed = seed;
  ens.dls.resize(n_p);
  if (is_degree_corrected(v)) qt.reserve(2 * static_cast<Count>(g.num_edges()), static_cast<Count>(g.num_nodes()));
  parallel_for(n_p, jobs, [&](std::size_t k) {
    Rng rng(derive_seed(seed, stream::kPermutation, k));
    ens.dls[k] = dl(g, permute_labels(d, rng), v, qt).total;
  });
  return ens;
}

double sigma_rand(const PermutationEnsemble& ens) {
  if (ens.dls.empty()) throw std::invalid_argument("empty permutation ensemble");
  const double position = ens.alpha * static_cast<double>(ens.dls.size());
  if (!(position >= 1.0 - 1e-9)) {
    throw std::invalid_argument(fmt::format(
        "alpha·n_p = {:.4g} < 1: increase the number of permutations to at least {}", position,
        static_cast<long long>(std::ceil(1.0 / ens.alpha))));
  }
  const auto rank = static_cast<std::size_t>(std::ceil(position - 1e-9));
  std::vector<double> sorted = ens.dls;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

double bestest_pvalue(double sigma_d, const PermutationEnsemble& ens) {
  if (ens.dls.empty()) throw std::invalid_argument("empty permutation ensemble");
  const auto n = static_cast<double>(ens.dls.size());
  const auto hits = std::count_if(ens.dls.begin(), ens.dls.end(),
                                  [&](double x) { return x <= sigma_d; });
  return std::max(static_cast<double>(hits) / n, 1.0 / n);
}

void write_ensemble_csv(std::ostream& out, const PermutationEnsemble& ens) {
  out << "dl_nats\n";
  for (const double x : ens.dls) out << fmt::format("{:.17g}\n", x);
}

}  // namespace metablox
