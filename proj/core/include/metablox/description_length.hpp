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

#ifndef METABLOX_DESCRIPTION_LENGTH_HPP_
#define METABLOX_DESCRIPTION_LENGTH_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "metablox/combinatorics.hpp"
#include "metablox/graph.hpp"

namespace metablox {

/// Microcanonical SBM flavour used to score a partition.
enum class Variant {
  kNdc,           ///< non-degree-corrected
  kDc,            ///< degree-corrected
  kPpUniform,     ///< assortative planted partition, uniform edge prior
  kPpNonuniform,  ///< assortative planted partition, non-uniform edge prior
};

inline constexpr std::array<Variant, 4> kAllVariants{
    Variant::kNdc, Variant::kDc, Variant::kPpUniform, Variant::kPpNonuniform};

/// "ndc" | "dc" | "pp-uniform" | "pp-nonuniform".
std::string_view to_string(Variant v);
/// JSON key form: "ndc" | "dc" | "pp_uniform" | "pp_nonuniform".
std::string_view json_key(Variant v);
/// Accepts the to_string() tokens; std::nullopt otherwise.
std::optional<Variant> parse_variant(std::string_view token);

constexpr bool is_degree_corrected(Variant v) { return v != Variant::kNdc; }
constexpr bool is_planted_partition(Variant v) {
  return v == Variant::kPpUniform || v == Variant::kPpNonuniform;
}

/// Description length Σ split by factor of the joint distribution (nats).
struct DLBreakdown {
  Variant variant = Variant::kNdc;
  double likelihood_nats = 0.0;
  double edge_prior_nats = 0.0;
  double degree_prior_nats = 0.0;     ///< 0 for NDC
  double partition_prior_nats = 0.0;
  double pp_hyperprior_nats = 0.0;    ///< (1 - δ_{B,1}) ln(E + 1) for PP, else 0
  double total = 0.0;
};

/// −ln P(A | e, b) of the NDC model for a simple graph.
double ndc_likelihood(const Graph& g, const BlockStats& s);

/// −ln P(A | e, k, b) of the DC model for a simple graph (also used by PP).
double dc_likelihood(const Graph& g, const BlockStats& s);

/// −ln of the edge-count prior; for PP this includes the (1 − δ_{B,1}) ln(E+1)
/// hyperprior on (e_in, e_out).
double edge_matrix_prior(const BlockStats& s, Variant v, Count num_edges);

/// −ln P(k | e, b): degree-histogram multinomial plus Σ_r ln q(e_r, n_r).
double degree_prior(const BlockStats& s, const QTable& qt = QTable::shared());

/// −ln P(b) = ln N! − Σ_r ln n_r! + ln C(N−1, B−1) + ln N.
double partition_prior(const Partition& p, std::size_t num_nodes);
double partition_prior(const BlockStats& s, std::size_t num_nodes);

/// Description length of `g` under partition `p` and variant `v`. Metadata
/// partitions and inferred partitions go through this same function.
/// Throws std::invalid_argument if `p` does not fit `g`.
DLBreakdown dl(const Graph& g, const Partition& p, Variant v,
               const QTable& qt = QTable::shared());
DLBreakdown dl(const Graph& g, const BlockStats& s, Variant v,
               const QTable& qt = QTable::shared());

/// Λ = exp(−(σ1 − σ2)); Λ > 1 iff σ1 < σ2.
double posterior_odds(double sigma_1, double sigma_2);

}  // namespace metablox

#endif  // METABLOX_DESCRIPTION_LENGTH_HPP_
