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

#include "metablox_tools/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "metablox/description_length.hpp"
#include "metablox/graph.hpp"
#include "metablox/inference.hpp"
#include "metablox/metablox.hpp"
#include "metablox/rng.hpp"
#include "metablox/significance.hpp"
#include "metablox/synthetic.hpp"
#include "metablox_tools/experiments.hpp"
#include "metablox_tools/lawfirm.hpp"
#include "metablox_tools/manifest.hpp"

namespace metablox::tools {

namespace fs = std::filesystem;

namespace {

/// Raised for option combinations CLI11 cannot check by itself.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::size_t jobs = 1;
  std::string log_level = "info";
};

struct OutputOptions {
  std::string output;
  std::string manifest;
};

struct InputOptions {
  bool drop_missing = false;
  bool add_unknown_nodes = false;
  bool strict = false;
};

struct SearchOptions {
  std::uint64_t seed = 42;
  int sweeps = 1000;
  int restarts = 5;
};

struct DlOptions {
  std::string graph, partition, variant;
};

struct InferOptions {
  std::string graph, variant = "dc", partition_out, trace_out;
};

struct MetabloxOptions {
  std::string graph, metadata, csv, pp = "nonuniform", network_name, metadata_name;
  std::vector<std::string> variants{"ndc", "dc", "pp"};
  std::size_t n_permutations = 500;
  double alpha = 0.01;
};

struct SignificanceOptions {
  std::string graph, metadata, variant = "dc", ensemble_out;
  std::size_t n_permutations = 500;
  double alpha = 0.01;
  std::uint64_t seed = 42;
};

struct SynthOptions {
  std::string model = "sbm", outdir;
  std::size_t nodes = 100, blocks = 2;
  double degree = 10.0, mu = 0.1, lambda = 0.05, rho = 1.0;
  std::uint64_t seed = 1;
};

struct ReplicateOptions {
  std::string experiment, outdir;
  ExperimentOptions experiment_options;
};

struct FetchOptions {
  std::string outdir, url{kLawfirmUrl}, from_dir, sha256;
  long timeout = 120;
};

Variant to_variant(const std::string& token, const std::string& pp) {
  if (token == "pp") return pp == "uniform" ? Variant::kPpUniform : Variant::kPpNonuniform;
  if (const auto v = parse_variant(token)) return *v;
  throw UsageError(fmt::format("unknown variant '{}'", token));
}

const CLI::Validator& variant_check() {
  static const CLI::IsMember kCheck({"ndc", "dc", "pp-uniform", "pp-nonuniform"});
  return kCheck;
}

Graph read_graph(const std::string& path, const InputOptions& in) {
  LoadOptions opts;
  opts.policy = in.strict ? SimplifyPolicy::kStrict : SimplifyPolicy::kCollapse;
  return load_edge_list_file(path, opts);
}

AlignedMetadata read_metadata(const Graph& g, const std::string& path, const InputOptions& in) {
  return align_metadata(g, load_metadata_csv_file(path),
                        in.drop_missing ? MissingLabelPolicy::kDropMissing
                                        : MissingLabelPolicy::kError,
                        in.add_unknown_nodes ? UnknownNodePolicy::kAddIsolated
                                             : UnknownNodePolicy::kError);
}

/// Sends a JSON report to the output file or `out`, and writes the manifest
/// when one is requested (always next to a file output).
class Reporter {
 public:
  Reporter(std::string command, const std::vector<std::string>& args, const OutputOptions& o,
           std::ostream& out)
      : out_(out), options_(o) {
    manifest_.command = std::move(command);
    manifest_.arguments = args;
    manifest_.started_at = utc_timestamp();
    if (options_.manifest.empty() && !options_.output.empty()) {
      options_.manifest = options_.output + ".manifest.json";
    }
  }

  RunManifest& manifest() { return manifest_; }
  bool has_manifest() const { return !options_.manifest.empty(); }

  void side_output(const fs::path& path, std::string_view contents) {
    write_file(path, contents);
    manifest_.outputs.push_back(path.string());
  }

  void finish(nlohmann::json report) {
    if (has_manifest()) report["manifest"] = fs::path(options_.manifest).filename().string();
    const std::string text = report.dump(2) + "\n";
    if (options_.output.empty()) {
      out_ << text;
    } else {
      side_output(options_.output, text);
    }
    write_manifest();
  }

  void write_manifest() {
    if (!has_manifest()) return;
    manifest_.finished_at = utc_timestamp();
    manifest_.write(options_.manifest);
  }

 private:
  std::ostream& out_;
  OutputOptions options_;
  RunManifest manifest_;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("-o,--output", o.output, "Write the JSON report to this file");
  cmd->add_option("--manifest", o.manifest,
                  "Run manifest path (default: <output>.manifest.json)");
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_flag("--drop-missing", in.drop_missing,
                "Restrict to the subgraph of nodes that have a label");
  cmd->add_flag("--add-unknown-nodes", in.add_unknown_nodes,
                "Add labelled nodes missing from the edge list as isolated nodes");
  cmd->add_flag("--strict", in.strict, "Reject self-loops and parallel edges");
}

void add_search_options(CLI::App* cmd, SearchOptions& s) {
  cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  cmd->add_option("--sweeps", s.sweeps, "MCMC sweeps per restart")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", s.restarts, "Independent inference runs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

InferenceConfig inference_config(const SearchOptions& s, std::size_t jobs) {
  InferenceConfig cfg;
  cfg.seed = s.seed;
  cfg.sweeps = s.sweeps;
  cfg.restarts = s.restarts;
  cfg.jobs = jobs;
  return cfg;
}

void check_permutation_budget(std::size_t n_p, double alpha) {
  if (n_p == 0) throw UsageError("--n-permutations must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
  if (alpha * static_cast<double>(n_p) < 1.0 - 1e-9) {
    throw UsageError(fmt::format("alpha * n_permutations = {} < 1; raise --n-permutations",
                                 alpha * static_cast<double>(n_p)));
  }
}

nlohmann::json breakdown_json(const DLBreakdown& b, const Partition& p) {
  return {{"variant", std::string(to_string(b.variant))},
          {"num_blocks", p.num_blocks()},
          {"likelihood", b.likelihood_nats},
          {"edge_prior", b.edge_prior_nats},
          {"degree_prior", b.degree_prior_nats},
          {"partition_prior", b.partition_prior_nats},
          {"pp_hyperprior", b.pp_hyperprior_nats},
          {"total", b.total}};
}

std::string partition_csv(const Graph& g, const Partition& p) {
  std::ostringstream s;
  write_metadata_csv(s, g, p);
  return s.str();
}

int cmd_dl(const DlOptions& o, const InputOptions& in, const OutputOptions& oo,
           const std::vector<std::string>& args, std::ostream& out) {
  Reporter rep("dl", args, oo, out);
  const Graph g = read_graph(o.graph, in);
  const Partition p = load_partition_file(o.partition, g);
  rep.manifest().add_input(o.graph);
  rep.manifest().add_input(o.partition);
  rep.finish(breakdown_json(dl(g, p, to_variant(o.variant, "")), p));
  return kExitOk;
}

int cmd_infer(const InferOptions& o, const InputOptions& in, const SearchOptions& s,
              const OutputOptions& oo, const GlobalOptions& go,
              const std::vector<std::string>& args, std::ostream& out) {
  Reporter rep("infer", args, oo, out);
  rep.manifest().seed = s.seed;
  const Graph g = read_graph(o.graph, in);
  rep.manifest().add_input(o.graph);
  const Variant v = to_variant(o.variant, "");
  const InferenceResult r = infer(g, v, inference_config(s, go.jobs));
  if (!o.partition_out.empty()) rep.side_output(o.partition_out, partition_csv(g, r.best_partition));
  if (!o.trace_out.empty()) {
    std::string trace = "step,dl_nats\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) trace += fmt::format("{},{:.17g}\n", i, r.trace[i]);
    rep.side_output(o.trace_out, trace);
  }
  const DLBreakdown b = dl(g, r.best_partition, v);
  rep.finish({{"variant", std::string(to_string(v))},
              {"sigma_opt", r.sigma_opt},
              {"num_blocks", r.best_partition.num_blocks()},
              {"breakdown", breakdown_json(b, r.best_partition)},
              {"restart_sigmas", r.restart_sigmas},
              {"winning_restart", r.winning_restart},
              {"edge_compression", g.num_edges() > 0
                                       ? nlohmann::json(r.sigma_opt / static_cast<double>(g.num_edges()))
                                       : nlohmann::json(nullptr)},
              {"seed", s.seed},
              {"sweeps", s.sweeps},
              {"restarts", s.restarts},
              {"num_nodes", g.num_nodes()},
              {"num_edges", g.num_edges()}});
  return kExitOk;
}

int cmd_metablox(const MetabloxOptions& o, const InputOptions& in, const SearchOptions& s,
                 const OutputOptions& oo, const GlobalOptions& go,
                 const std::vector<std::string>& args, std::ostream& out) {
  check_permutation_budget(o.n_permutations, o.alpha);
  MetabloxConfig cfg;
  cfg.variants.clear();
  for (const auto& token : o.variants) {
    const Variant v = to_variant(token, o.pp);
    if (std::find(cfg.variants.begin(), cfg.variants.end(), v) != cfg.variants.end()) {
      throw UsageError(fmt::format("variant '{}' listed twice", token));
    }
    cfg.variants.push_back(v);
  }
  cfg.n_permutations = o.n_permutations;
  cfg.alpha = o.alpha;
  cfg.seed = s.seed;
  cfg.inference = inference_config(s, 1);
  cfg.jobs = go.jobs;

  Reporter rep("metablox", args, oo, out);
  rep.manifest().seed = s.seed;
  const Graph raw = read_graph(o.graph, in);
  const AlignedMetadata md = read_metadata(raw, o.metadata, in);
  rep.manifest().add_input(o.graph);
  rep.manifest().add_input(o.metadata);
  const MetabloxReport report = metablox(md.graph, md.partition, cfg);
  if (!o.csv.empty()) {
    const std::string network = o.network_name.empty() ? fs::path(o.graph).stem().string() : o.network_name;
    const std::string metadata =
        o.metadata_name.empty() ? fs::path(o.metadata).stem().string() : o.metadata_name;
    rep.side_output(o.csv, csv_header() + "\n" + csv_rows(report, network, metadata));
  }
  nlohmann::json j = to_json(report);
  j["dropped_nodes"] = md.dropped_nodes;
  j["added_isolated_nodes"] = md.added_isolated;
  rep.finish(std::move(j));
  return kExitOk;
}

int cmd_significance(const SignificanceOptions& o, const InputOptions& in,
                     const OutputOptions& oo, const GlobalOptions& go,
                     const std::vector<std::string>& args, std::ostream& out) {
  check_permutation_budget(o.n_permutations, o.alpha);
  Reporter rep("significance", args, oo, out);
  rep.manifest().seed = o.seed;
  const Graph raw = read_graph(o.graph, in);
  const AlignedMetadata md = read_metadata(raw, o.metadata, in);
  rep.manifest().add_input(o.graph);
  rep.manifest().add_input(o.metadata);
  const Variant v = to_variant(o.variant, "");
  const PermutationEnsemble ens =
      randomized_dl_distribution(md.graph, md.partition, v, o.n_permutations, o.seed, o.alpha, go.jobs);
  const double sd = dl(md.graph, md.partition, v).total;
  if (!o.ensemble_out.empty()) {
    std::ostringstream csv;
    write_ensemble_csv(csv, ens);
    rep.side_output(o.ensemble_out, csv.str());
  }
  rep.finish({{"variant", std::string(to_string(v))},
              {"sigma_d", sd},
              {"sigma_rand", sigma_rand(ens)},
              {"pvalue", bestest_pvalue(sd, ens)},
              {"n_permutations", o.n_permutations},
              {"alpha", o.alpha},
              {"seed", o.seed},
              {"num_nodes", md.graph.num_nodes()},
              {"num_edges", md.graph.num_edges()}});
  return kExitOk;
}

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  if (o.outdir.empty()) throw UsageError("--outdir is required");
  SyntheticSpec spec;
  spec.num_nodes = o.nodes;
  spec.expected_degree = o.degree;
  spec.seed = o.seed;
  spec.rho = o.rho;
  const Count edges = spec.target_edges();
  const fs::path dir(o.outdir);
  OutputOptions oo;
  oo.manifest = (dir / "manifest.json").string();
  Reporter rep("synth", args, oo, out);
  rep.manifest().seed = o.seed;

  Graph g;
  Partition primary;
  nlohmann::json report = {{"model", o.model}, {"seed", o.seed}, {"rho", o.rho}};
  if (o.model == "sbm") {
    spec.matrices = {theta_bc(edges, o.mu, o.blocks)};
    auto sample = sbm_generate(spec);
    g = std::move(sample.graph);
    primary = std::move(sample.planted);
    rep.side_output(dir / "planted.csv", partition_csv(g, primary));
    report["mu"] = o.mu;
    report["blocks"] = o.blocks;
  } else if (o.model == "scbm") {
    spec.matrices = {theta_bc(edges, o.mu), theta_cp(edges, o.lambda)};
    auto sample = scbm_generate(spec);
    g = std::move(sample.graph);
    primary = std::move(sample.bc);
    rep.side_output(dir / "bc.csv", partition_csv(g, primary));
    rep.side_output(dir / "cp.csv", partition_csv(g, sample.cp));
    Rng cp_rng(derive_seed(o.seed, stream::kMetadata, 1));
    rep.side_output(dir / "metadata_cp.csv",
                    partition_csv(g, correlated_metadata(sample.cp, o.rho, cp_rng)));
    report["mu"] = o.mu;
    report["lambda"] = o.lambda;
  } else {
    throw UsageError(fmt::format("unknown model '{}'", o.model));
  }
  Rng rng(derive_seed(o.seed, stream::kMetadata, 0));
  rep.side_output(dir / "metadata.csv", partition_csv(g, correlated_metadata(primary, o.rho, rng)));
  std::ostringstream edges_out;
  write_edge_list(edges_out, g);
  rep.side_output(dir / "graph.txt", edges_out.str());
  report["num_nodes"] = g.num_nodes();
  report["num_edges"] = g.num_edges();
  report["outdir"] = dir.string();
  rep.finish(std::move(report));
  return kExitOk;
}

int cmd_replicate(const ReplicateOptions& o, const GlobalOptions& go,
                  const std::vector<std::string>& args, std::ostream& out) {
  ExperimentOptions eo = o.experiment_options;
  eo.jobs = go.jobs;
  try {
    eo.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir(o.outdir);
  OutputOptions oo;
  oo.manifest = (dir / (o.experiment + "_manifest.json")).string();
  Reporter rep("replicate", args, oo, out);
  rep.manifest().seed = eo.seed;
  const ExperimentResult result = run_experiment(o.experiment, eo);
  std::ostringstream csv, summary;
  write_rows_csv(csv, result.rows);
  write_summary(summary, result);
  rep.side_output(dir / (o.experiment + ".csv"), csv.str());
  rep.side_output(dir / (o.experiment + "_summary.txt"), summary.str());
  rep.write_manifest();
  out << summary.str();
  return kExitOk;
}

fs::path default_cache_dir() {
  if (const char* dir = std::getenv("METABLOX_CACHE_DIR"); dir && *dir) return dir;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".cache" / "metablox";
  }
  return fs::current_path() / ".metablox-cache";
}

int cmd_fetch(const FetchOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const fs::path dir = o.outdir.empty() ? default_cache_dir() / "lawfirm" : fs::path(o.outdir);
  OutputOptions oo;
  oo.manifest = (dir / "manifest.json").string();
  Reporter rep("fetch-lawfirm", args, oo, out);

  std::map<std::string, std::string> files;
  std::string source;
  if (!o.from_dir.empty()) {
    source = o.from_dir;
    files = read_dat_dir(o.from_dir);
  } else {
    source = o.url;
    spdlog::info("downloading {}", o.url);
    const std::string archive = http_get(o.url, o.timeout);
    const std::string digest = sha256_hex(archive);
    if (!o.sha256.empty() && digest != o.sha256) {
      throw std::runtime_error(
          fmt::format("checksum mismatch for {}: expected {}, got {}", o.url, o.sha256, digest));
    }
    rep.manifest().inputs.push_back({o.url, digest});
    files = unzip(archive);
  }
  const LawfirmData data = parse_lawfirm(files);
  nlohmann::json networks = nlohmann::json::object();
  for (const auto& [name, g] : data.networks) {
    networks[name] = {{"num_nodes", g.num_nodes()}, {"num_edges", g.num_edges()}};
  }
  for (const auto& path : write_lawfirm(data, dir)) rep.manifest().outputs.push_back(path.string());
  nlohmann::json attributes = nlohmann::json::array();
  for (const auto& [name, labels] : data.attributes) attributes.push_back(name);
  rep.finish({{"source", source},
              {"outdir", dir.string()},
              {"networks", networks},
              {"attributes", attributes},
              {"symmetrization", "undirected edge wherever either direction is present"}});
  return kExitOk;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, const std::string& level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  sink->set_pattern("[%l] %v");
  auto logger = std::make_shared<spdlog::logger>("metablox", sink);
  logger->set_level(spdlog::level::from_str(level));
  return logger;
}

/// Restores the previous default logger on scope exit.
class LoggerScope {
 public:
  explicit LoggerScope(std::shared_ptr<spdlog::logger> logger)
      : previous_(spdlog::default_logger()) {
    spdlog::set_default_logger(std::move(logger));
  }
  ~LoggerScope() { spdlog::set_default_logger(previous_); }
  LoggerScope(const LoggerScope&) = delete;
  LoggerScope& operator=(const LoggerScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metadata relevance for network block structure", "metablox"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the command-line options");
  app.allow_config_extras(false);

  GlobalOptions go;
  app.add_option("-j,--jobs", go.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--log-level", go.log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str()
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  InputOptions in;
  OutputOptions oo;
  SearchOptions search;

  DlOptions dl_opts;
  auto* dl_cmd = app.add_subcommand("dl", "Description length of a partition");
  dl_cmd->add_option("graph", dl_opts.graph, "Edge list")->required()->check(CLI::ExistingFile);
  dl_cmd->add_option("partition", dl_opts.partition, "Partition file")
      ->required()
      ->check(CLI::ExistingFile);
  dl_cmd->add_option("-v,--variant", dl_opts.variant, "SBM variant")->required()->check(variant_check());
  add_input_options(dl_cmd, in);
  add_output_options(dl_cmd, oo);

  InferOptions infer_opts;
  auto* infer_cmd = app.add_subcommand("infer", "Minimum description length partition");
  infer_cmd->add_option("graph", infer_opts.graph, "Edge list")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("-v,--variant", infer_opts.variant, "SBM variant")
      ->capture_default_str()
      ->check(variant_check());
  infer_cmd->add_option("--partition-out", infer_opts.partition_out, "Write node,block CSV");
  infer_cmd->add_option("--trace-out", infer_opts.trace_out, "Write the Σ trace as CSV");
  add_search_options(infer_cmd, search);
  add_input_options(infer_cmd, in);
  add_output_options(infer_cmd, oo);

  MetabloxOptions mb;
  auto* mb_cmd = app.add_subcommand("metablox", "Metablox vector of a metadata partition");
  mb_cmd->add_option("graph", mb.graph, "Edge list")->required()->check(CLI::ExistingFile);
  mb_cmd->add_option("metadata", mb.metadata, "node,label CSV")->required()->check(CLI::ExistingFile);
  mb_cmd->add_option("--variants", mb.variants, "ndc, dc, pp, pp-uniform, pp-nonuniform")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"ndc", "dc", "pp", "pp-uniform", "pp-nonuniform"}));
  mb_cmd->add_option("--pp", mb.pp, "Prior used for the 'pp' variant")
      ->capture_default_str()
      ->check(CLI::IsMember({"uniform", "nonuniform"}));
  mb_cmd->add_option("-n,--n-permutations", mb.n_permutations, "Label permutations")
      ->capture_default_str();
  mb_cmd->add_option("--alpha", mb.alpha, "Quantile of the permutation ensemble")
      ->capture_default_str();
  mb_cmd->add_option("--csv", mb.csv, "Also write one CSV row per variant");
  mb_cmd->add_option("--network-name", mb.network_name, "Network column of the CSV");
  mb_cmd->add_option("--metadata-name", mb.metadata_name, "Metadata column of the CSV");
  add_search_options(mb_cmd, search);
  add_input_options(mb_cmd, in);
  add_output_options(mb_cmd, oo);

  SignificanceOptions sig;
  auto* sig_cmd = app.add_subcommand("significance", "Permutation ensemble and BESTest p-value");
  sig_cmd->add_option("graph", sig.graph, "Edge list")->required()->check(CLI::ExistingFile);
  sig_cmd->add_option("metadata", sig.metadata, "node,label CSV")->required()->check(CLI::ExistingFile);
  sig_cmd->add_option("-v,--variant", sig.variant, "SBM variant")
      ->capture_default_str()
      ->check(variant_check());
  sig_cmd->add_option("-n,--n-permutations", sig.n_permutations, "Label permutations")
      ->capture_default_str();
  sig_cmd->add_option("--alpha", sig.alpha, "Quantile of the permutation ensemble")
      ->capture_default_str();
  sig_cmd->add_option("--seed", sig.seed, "Permutation seed")->capture_default_str();
  sig_cmd->add_option("--ensemble-out", sig.ensemble_out, "Write the ensemble as CSV");
  add_input_options(sig_cmd, in);
  add_output_options(sig_cmd, oo);

  SynthOptions syn;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a planted network with metadata");
  syn_cmd->add_option("--model", syn.model, "sbm or scbm")
      ->capture_default_str()
      ->check(CLI::IsMember({"sbm", "scbm"}));
  syn_cmd->add_option("-N,--nodes", syn.nodes, "Number of nodes")->capture_default_str();
  syn_cmd->add_option("-k,--degree", syn.degree, "Expected mean degree")->capture_default_str();
  syn_cmd->add_option("-B,--blocks", syn.blocks, "Planted blocks (sbm)")->capture_default_str();
  syn_cmd->add_option("--mu", syn.mu, "Fraction of edges between communities")
      ->capture_default_str();
  syn_cmd->add_option("--lambda", syn.lambda, "Core-periphery mixing (scbm)")->capture_default_str();
  syn_cmd->add_option("--rho", syn.rho, "Metadata correlation with the planted partition")
      ->capture_default_str();
  syn_cmd->add_option("--seed", syn.seed, "Seed")->capture_default_str();
  syn_cmd->add_option("--outdir", syn.outdir, "Output directory")->required();

  ReplicateOptions rp;
  auto* rp_cmd = app.add_subcommand("replicate", "Run a synthetic experiment and its property checks");
  std::vector<std::string> names;
  for (const auto name : experiment_names()) names.emplace_back(name);
  rp_cmd->add_option("experiment", rp.experiment, "Experiment")->required()->check(CLI::IsMember(names));
  rp_cmd->add_option("--outdir", rp.outdir, "Output directory")->required();
  auto& eo = rp.experiment_options;
  rp_cmd->add_option("--scale", eo.scale, "Replicate-count factor in (0, 1]")->capture_default_str();
  rp_cmd->add_option("--seed", eo.seed, "Master seed")->capture_default_str();
  rp_cmd->add_option("-n,--n-permutations", eo.n_permutations, "0 = scaled default")
      ->capture_default_str();
  rp_cmd->add_option("--alpha", eo.alpha, "Quantile of the permutation ensemble")
      ->capture_default_str();
  rp_cmd->add_option("--sweeps", eo.sweeps, "MCMC sweeps per restart")->capture_default_str();
  rp_cmd->add_option("--restarts", eo.restarts, "Inference restarts")->capture_default_str();
  rp_cmd->add_option("--networks", eo.networks, "Networks per cell, 0 = scaled default")
      ->capture_default_str();
  rp_cmd->add_option("--sizes", eo.sizes, "Network sizes (fig7)")->delimiter(',');
  rp_cmd->add_option("--blocks", eo.blocks, "Block counts (fig8)")->delimiter(',');
  rp_cmd->add_option("--rho-step", eo.rho_step, "ρ grid step (fig3)")->capture_default_str();

  FetchOptions fo;
  auto* fetch_cmd = app.add_subcommand("fetch-lawfirm", "Download and convert the law firm networks");
  fetch_cmd->add_option("--outdir", fo.outdir, "Output directory (default: cache dir/lawfirm)");
  fetch_cmd->add_option("--url", fo.url, "Archive URL")->capture_default_str();
  fetch_cmd->add_option("--from-dir", fo.from_dir, "Use already extracted .dat files")
      ->check(CLI::ExistingDirectory);
  fetch_cmd->add_option("--sha256", fo.sha256, "Expected archive checksum");
  fetch_cmd->add_option("--timeout", fo.timeout, "Download timeout in seconds")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  LoggerScope scope(make_logger(err, go.log_level));
  try {
    if (*dl_cmd) return cmd_dl(dl_opts, in, oo, args, out);
    if (*infer_cmd) return cmd_infer(infer_opts, in, search, oo, go, args, out);
    if (*mb_cmd) return cmd_metablox(mb, in, search, oo, go, args, out);
    if (*sig_cmd) return cmd_significance(sig, in, oo, go, args, out);
    if (*syn_cmd) return cmd_synth(syn, args, out);
    if (*rp_cmd) return cmd_replicate(rp, go, args, out);
    if (*fetch_cmd) return cmd_fetch(fo, args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace metablox::tools
