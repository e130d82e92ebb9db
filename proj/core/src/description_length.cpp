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

#include "metablox/description_length.hpp"

#include <cmath>
#include <stdexcept>

namespace metablox {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kNdc: return "ndc";
    case Variant::kDc: return "dc";
    case Variant::kPpUniform: return "pp-uniform";
    case Variant::kPpNonuniform: return "pp-nonuniform";
  }
  return "?";
}

std::string_view json_key(Variant v) {
  switch (v) {
    case Variant::kNdc: return "ndc";
    case Variant::kDc: return "dc";
    case Variant::kPpUniform: return "pp_uniform";
    case Variant::kPpNonuniform: return "pp_nonuniform";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view token) {
  for (const Variant v : kAllVariants) {
    if (token == to_string(v)) return v;
  }
  return std::nullopt;
}

namespace {

// −Σ_{r<s} ln e_rs! − Σ_r ln e_rr!!, shared by both likelihoods.
double edge_count_term(const BlockStats& s) {
  double acc = 0.0;
  for (std::size_t r = 0; r < s.num_blocks; ++r) {
    acc -= log_double_factorial_even(s.e(r, r));
    for (std::size_t t = r + 1; t < s.num_blocks; ++t) acc -= log_factorial(s.e(r, t));
  }
  return acc;
}

}  // namespace

double ndc_likelihood(const Graph&, const BlockStats& s) {
  double acc = edge_count_term(s);
  for (std::size_t r = 0; r < s.num_blocks; ++r) {
    if (s.block_degree_sums[r] > 0) {
      acc += static_cast<double>(s.block_degree_sums[r]) *
             std::log(static_cast<double>(s.block_sizes[r]));
    }
  }
  return acc;
}

double dc_likelihood(const Graph& g, const BlockStats& s) {
  double acc = edge_count_term(s);
  for (std::size_t r = 0; r < s.num_blocks; ++r) acc += log_factorial(s.block_degree_sums[r]);
  for (const Count k : g.degrees()) acc -= log_factorial(k);
  return acc;
}

double edge_matrix_prior(const BlockStats& s, Variant v, Count num_edges) {
  const auto B = static_cast<Count>(s.num_blocks);
  if (!is_planted_partition(v)) return log_multiset(B * (B + 1) / 2, num_edges);

  const double hyper = B > 1 ? std::log(static_cast<double>(num_edges) + 1.0) : 0.0;
  // e_out ln C(B,2) with the convention 0 * ln 0 = 0 at B = 1.
  const double out_cells =
      s.e_out > 0 ? static_cast<double>(s.e_out) * log_binomial(B, 2) : 0.0;
  double pairs = 0.0;
  for (std::size_t r = 0; r < s.num_blocks; ++r) {
    for (std::size_t t = r + 1; t < s.num_blocks; ++t) pairs += log_factorial(s.e(r, t));
  }
  double acc = -log_factorial(s.e_out) + out_cells + pairs + hyper;
  if (v == Variant::kPpUniform) {
    acc += -log_factorial(s.e_in) + static_cast<double>(s.e_in) * std::log(static_cast<double>(B));
    for (std::size_t r = 0; r < s.num_blocks; ++r) acc += log_factorial(s.e(r, r) / 2);
  } else {
    acc += log_binomial(B + s.e_in - 1, s.e_in);
  }
  return acc;
}

double degree_prior(const BlockStats& s, const QTable& qt) {
  double acc = 0.0;
  for (std::size_t r = 0; r < s.num_blocks; ++r) {
    acc += log_factorial(s.block_sizes[r]);
    for (const auto& [k, eta] : s.degree_histograms[r]) acc -= log_factorial(eta);
    acc += qt.log_q(s.block_degree_sums[r], s.block_sizes[r]);
  }
  return acc;
}

namespace {
double partition_prior_from_sizes(std::span<const Count> sizes, std::size_t num_nodes) {
  const auto N = static_cast<Count>(num_nodes);
  const auto B = static_cast<Count>(sizes.size());
  double acc = log_factorial(N) + log_binomial(N - 1, B - 1) + std::log(static_cast<double>(N));
  for (const Count n : sizes) acc -= log_factorial(n);
  return acc;
}
}  // namespace

double partition_prior(const Partition& p, std::size_t num_nodes) {
  const auto sizes = p.block_sizes();
  return partition_prior_from_sizes(sizes, num_nodes);
}

double partition_prior(const BlockStats& s, std::size_t num_nodes) {
  return partition_prior_from_sizes(s.block_sizes, num_nodes);
}

DLBreakdown dl(const Graph& g, const BlockStats& s, Variant v, const QTable& qt) {
  check_block_stats(s, g.num_nodes(), g.num_edges());
  const auto E = static_cast<Count>(g.num_edges());
  DLBreakdown out;
  out.variant = v;
  out.partition_prior_nats = partition_prior(s, g.num_nodes());
  if (v == Variant::kNdc) {
    out.likelihood_nats = ndc_likelihood(g, s);
  } else {
    out.likelihood_nats = dc_likelihood(g, s);
    out.degree_prior_nats = degree_prior(s, qt);
  }
  out.edge_prior_nats = edge_matrix_prior(s, v, E);
  if (is_planted_partition(v) && s.num_blocks > 1) {
    out.pp_hyperprior_nats = std::log(static_cast<double>(E) + 1.0);
    out.edge_prior_nats -= out.pp_hyperprior_nats;
  }
  out.total = out.likelihood_nats + out.edge_prior_nats + out.degree_prior_nats +
              out.partition_prior_nats + out.pp_hyperprior_nats;
  return out;
}

DLBreakdown dl(const Graph& g, const Partition& p, Variant v, const QTable& qt) {
  return dl(g, block_stats(g, p), v, qt);
}

double posterior_odds(double sigma_1, double sigma_2) {
  return std::exp(-(sigma_1 - sigma_2));
}

}  // namespace metablox
