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

#ifndef METABLOX_SIGNIFICANCE_HPP_
#define METABLOX_SIGNIFICANCE_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"
#include "metablox/rng.hpp"

namespace metablox {

/// Description lengths of label-permuted copies of a metadata partition.
/// The observed labeling itself is not one of the draws.
struct PermutationEnsemble {
  Variant variant = Variant::kDc;
  std::size_t n_p = 500;
  std::vector<double> dls;
  double alpha = 0.01;
  std::uint64_t seed = 0;
};

/// Uniformly random rearrangement of the label sequence (category sizes kept).
Partition permute_labels(const Partition& d, Rng& rng);

/// Scores n_p permutations of `d` under `v`. Permutation k draws from the
/// stream derive_seed(seed, kPermutation, k), so results do not depend on
/// `jobs`.
PermutationEnsemble randomized_dl_distribution(const Graph& g, const Partition& d, Variant v,
                                               std::size_t n_p, std::uint64_t seed,
                                               double alpha = 0.01, std::size_t jobs = 1,
                                               const QTable& qt = QTable::shared());

/// ⌈α·n_p⌉-th smallest ensemble value. Throws std::invalid_argument when
/// α·n_p < 1 or the ensemble is empty.
double sigma_rand(const PermutationEnsemble& ens);

/// Fraction of ensemble values ≤ sigma_d, floored at 1/n_p.
double bestest_pvalue(double sigma_d, const PermutationEnsemble& ens);

/// One value per line under a `dl_nats` header.
void write_ensemble_csv(std::ostream& out, const PermutationEnsemble& ens);

}  // namespace metablox

#endif  // METABLOX_SIGNIFICANCE_HPP_
