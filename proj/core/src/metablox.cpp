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

#include "metablox/metablox.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "metablox/parallel.hpp"
#include "metablox/significance.hpp"

namespace metablox {

namespace {

nlohmann::json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

std::string optional_csv(const std::optional<double>& x) {
  return x ? fmt::format("{:.17g}", *x) : std::string();
}

}  // namespace

GammaResult compute_gamma(double sigma_d, double sigma_opt, double sigma_rand) {
  GammaResult out;
  const double denominator = sigma_rand - sigma_opt;
  if (!(denominator > 0.0)) {
    out.flags.emplace_back(kFlagDegenerateDenominator);
    return out;
  }
  out.gamma = (sigma_d - sigma_opt) / denominator;
  if (sigma_d < sigma_opt) out.flags.emplace_back(kFlagBelowOptimum);
  return out;
}

std::optional<double> edge_compression(double sigma_opt, Count num_edges) {
  if (num_edges <= 0) return std::nullopt;
  return sigma_opt / static_cast<double>(num_edges);
}

VariantReport assess_metadata(const Graph& g, const Partition& d, Variant v,
                              const InferenceResult& optimum, std::size_t n_permutations,
                              double alpha, std::uint64_t permutation_seed, const QTable& qt) {
  VariantReport r;
  r.variant = v;
  r.sigma_d = dl(g, d, v, qt).total;
  r.sigma_opt = optimum.sigma_opt;
  r.optimum = optimum.best_partition;
  const PermutationEnsemble ens =
      randomized_dl_distribution(g, d, v, n_permutations, permutation_seed, alpha, 1, qt);
  r.sigma_rand = sigma_rand(ens);
  r.pvalue = bestest_pvalue(r.sigma_d, ens);
  r.delta = r.sigma_d - r.sigma_opt;
  r.delta_star = r.sigma_rand - r.sigma_opt;
  GammaResult gamma = compute_gamma(r.sigma_d, r.sigma_opt, r.sigma_rand);
  r.gamma = gamma.gamma;
  r.flags = std::move(gamma.flags);
  r.relevant = r.gamma && *r.gamma < 1.0;
  r.edge_compression = edge_compression(r.sigma_opt, static_cast<Count>(g.num_edges()));
  if (!r.edge_compression) r.flags.emplace_back(kFlagNoEdges);
  return r;
}

const VariantReport* MetabloxReport::find(Variant v) const {
  for (const auto& r : variants) {
    if (r.variant == v) return &r;
  }
  return nullptr;
}

MetabloxReport metablox(const Graph& g, const Partition& d, const MetabloxConfig& cfg,
                        const QTable& qt) {
  if (d.size() != g.num_nodes()) {
    throw std::invalid_argument("metadata partition does not cover the graph");
  }
  if (cfg.variants.empty()) throw std::invalid_argument("no variants requested");
  InferenceConfig icfg = cfg.inference;
  icfg.seed = cfg.seed;
  icfg.validate();

  MetabloxReport report;
  report.seed = cfg.seed;
  report.n_permutations = cfg.n_permutations;
  report.alpha = cfg.alpha;
  report.sweeps = icfg.sweeps;
  report.restarts = icfg.restarts;
  report.num_nodes = g.num_nodes();
  report.num_edges = g.num_edges();
  report.variants.resize(cfg.variants.size());

  // Fail on a bad (α, n_p) before any inference runs.
  sigma_rand(PermutationEnsemble{Variant::kDc, cfg.n_permutations,
                                 std::vector<double>(std::max<std::size_t>(cfg.n_permutations, 1)),
                                 cfg.alpha, cfg.seed});

  parallel_for(cfg.variants.size(), cfg.jobs, [&](std::size_t k) {
    const Variant v = cfg.variants[k];
    report.variants[k] = assess_metadata(g, d, v, infer(g, v, icfg, qt), cfg.n_permutations,
                                         cfg.alpha, cfg.seed, qt);
  });

  for (const auto& r : report.variants) {
    for (const auto& f : r.flags) report.flags.push_back(fmt::format("{}:{}", to_string(r.variant), f));
    if (!r.edge_compression) continue;
    const VariantReport* best = report.best_compressing_variant
                                    ? report.find(*report.best_compressing_variant)
                                    : nullptr;
    if (!best || *r.edge_compression < *best->edge_compression) {
      report.best_compressing_variant = r.variant;
    }
  }
  return report;
}

nlohmann::json to_json(const MetabloxReport& report) {
  using nlohmann::json;
  json j = json::object();
  json gamma = json::object(), compression = json::object(), sd = json::object(),
       so = json::object(), sr = json::object(), delta = json::object(),
       delta_star = json::object(), pvalue = json::object(), relevant = json::object(),
       blocks = json::object();
  for (const auto& r : report.variants) {
    const std::string key(json_key(r.variant));
    gamma[key] = optional_number(r.gamma);
    compression[key] = optional_number(r.edge_compression);
    sd[key] = r.sigma_d;
    so[key] = r.sigma_opt;
    sr[key] = r.sigma_rand;
    delta[key] = r.delta;
    delta_star[key] = r.delta_star;
    pvalue[key] = r.pvalue;
    relevant[key] = r.relevant;
    blocks[key] = r.optimum.num_blocks();
  }
  j["gamma"] = std::move(gamma);
  j["edge_compression"] = std::move(compression);
  j["sigma"] = {{"d", std::move(sd)}, {"opt", std::move(so)}, {"rand", std::move(sr)}};
  j["delta"] = std::move(delta);
  j["delta_star"] = std::move(delta_star);
  j["pvalue"] = std::move(pvalue);
  j["relevant"] = std::move(relevant);
  j["num_blocks_opt"] = std::move(blocks);
  j["flags"] = report.flags;
  j["best_compressing_variant"] = report.best_compressing_variant
                                      ? json(std::string(to_string(*report.best_compressing_variant)))
                                      : json(nullptr);
  j["seed"] = report.seed;
  j["n_permutations"] = report.n_permutations;
  j["alpha"] = report.alpha;
  j["sweeps"] = report.sweeps;
  j["restarts"] = report.restarts;
  j["num_nodes"] = report.num_nodes;
  j["num_edges"] = report.num_edges;
  return j;
}

std::string csv_header() {
  return "network,metadata,variant,gamma,edge_compression,sigma_d,sigma_opt,sigma_rand,"
         "delta,delta_star,pvalue,relevant,num_blocks_opt,num_nodes,num_edges,seed,"
         "n_permutations,alpha";
}

std::string csv_rows(const MetabloxReport& report, const std::string& network,
                     const std::string& metadata) {
  std::string out;
  for (const auto& r : report.variants) {
    out += fmt::format("{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{},{},{},{}\n",
                       network, metadata, to_string(r.variant), optional_csv(r.gamma),
                       optional_csv(r.edge_compression), r.sigma_d, r.sigma_opt, r.sigma_rand,
                       r.delta, r.delta_star, r.pvalue, r.relevant ? 1 : 0,
                       r.optimum.num_blocks(), report.num_nodes, report.num_edges, report.seed,
                       report.n_permutations, report.alpha);
  }
  return out;
}

}  // namespace metablox
