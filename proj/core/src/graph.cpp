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

#include "metablox/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

namespace metablox {

namespace {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = std::to_string(i);
  return names;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits one CSV record. Handles double-quoted fields with "" escapes; does
// not support embedded newlines.
std::vector<std::string> split_csv(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", lineno);
  fields.emplace_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges,
             std::vector<std::string> names)
    : edges_(std::move(edges)), names_(std::move(names)) {
  if (names_.empty()) names_ = default_names(num_nodes);
  if (names_.size() != num_nodes) {
    throw std::invalid_argument("node name count does not match node count");
  }
  const auto n = static_cast<NodeId>(num_nodes);
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("self-loop in simple graph");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate edge in simple graph");
  }

  degrees_.assign(num_nodes, 0);
  for (const auto& e : edges_) {
    ++degrees_[static_cast<std::size_t>(e.u)];
    ++degrees_[static_cast<std::size_t>(e.v)];
  }
  offsets_.assign(num_nodes + 1, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    offsets_[i + 1] = offsets_[i] + static_cast<std::size_t>(degrees_[i]);
  }
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[static_cast<std::size_t>(e.u)]++] = e.v;
    adjacency_[fill[static_cast<std::size_t>(e.v)]++] = e.u;
  }
  max_degree_ = degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());

  index_.reserve(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (!index_.emplace(names_[i], static_cast<NodeId>(i)).second) {
      throw std::invalid_argument("duplicate node name '" + names_[i] + "'");
    }
  }
}

std::optional<NodeId> Graph::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Graph Graph::induced_subgraph(std::span<const NodeId> keep) const {
  std::vector<NodeId> remap(num_nodes(), -1);
  std::vector<std::string> names;
  names.reserve(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    remap[static_cast<std::size_t>(keep[j])] = static_cast<NodeId>(j);
    names.push_back(names_[static_cast<std::size_t>(keep[j])]);
  }
  std::vector<Edge> edges;
  for (const auto& e : edges_) {
    const NodeId a = remap[static_cast<std::size_t>(e.u)];
    const NodeId b = remap[static_cast<std::size_t>(e.v)];
    if (a >= 0 && b >= 0) edges.push_back({a, b});
  }
  return Graph(keep.size(), std::move(edges), std::move(names));
}

Graph Graph::with_isolated_nodes(std::span<const std::string> extra) const {
  std::vector<std::string> names = names_;
  names.insert(names.end(), extra.begin(), extra.end());
  const std::size_t n = names.size();
  return Graph(n, edges_, std::move(names));
}

// ---------------------------------------------------------------------------
// Edge-list IO

Graph load_edge_list(std::istream& in, const LoadOptions& options,
                     LoadReport* report) {
  LoadReport local;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> names;
  std::vector<Edge> edges;
  std::set<Edge> seen;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.emplace(token, static_cast<NodeId>(names.size()));
    if (inserted) names.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    std::istringstream fields{std::string(view)};
    std::string a, b, extra;
    if (!(fields >> a >> b)) {
      throw ParseError("expected two node tokens", lineno);
    }
    if (fields >> extra) {
      throw ParseError("expected two node tokens, found more", lineno);
    }
    ++local.lines_read;
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    if (u == v) {
      if (options.policy == SimplifyPolicy::kStrict) {
        throw ParseError("self-loop on node '" + a + "'", lineno);
      }
      ++local.self_loops_dropped;
      continue;
    }
    const Edge e{std::min(u, v), std::max(u, v)};
    if (!seen.insert(e).second) {
      if (options.policy == SimplifyPolicy::kStrict) {
        throw ParseError("parallel edge '" + a + " " + b + "'", lineno);
      }
      ++local.duplicates_collapsed;
      continue;
    }
    edges.push_back(e);
  }
  if (names.empty()) throw ParseError("edge list is empty", 0);

  if (local.self_loops_dropped > 0) {
    spdlog::warn("edge list: dropped {} self-loop(s)", local.self_loops_dropped);
  }
  if (local.duplicates_collapsed > 0) {
    spdlog::warn("edge list: collapsed {} parallel edge(s)",
                 local.duplicates_collapsed);
  }
  if (report) *report = local;
  const std::size_t n = names.size();
  return Graph(n, std::move(edges), std::move(names));
}

Graph load_edge_list_file(const std::filesystem::path& path,
                          const LoadOptions& options, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  return load_edge_list(in, options, report);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& e : g.edges()) {
    out << g.name(e.u) << ' ' << g.name(e.v) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<BlockId> labels) : labels_(std::move(labels)) {
  BlockId max_label = -1;
  for (const BlockId b : labels_) {
    if (b < 0) throw std::invalid_argument("negative block label");
    max_label = std::max(max_label, b);
  }
  num_blocks_ = static_cast<std::size_t>(max_label + 1);
  std::vector<bool> present(num_blocks_, false);
  for (const BlockId b : labels_) present[static_cast<std::size_t>(b)] = true;
  if (std::find(present.begin(), present.end(), false) != present.end()) {
    throw std::invalid_argument("block labels are not contiguous");
  }
}

Partition Partition::canonical(std::span<const BlockId> raw) {
  std::unordered_map<BlockId, BlockId> remap;
  std::vector<BlockId> labels;
  labels.reserve(raw.size());
  for (const BlockId b : raw) {
    auto [it, inserted] = remap.emplace(b, static_cast<BlockId>(remap.size()));
    labels.push_back(it->second);
  }
  return Partition(std::move(labels));
}

Partition Partition::single_block(std::size_t n) {
  return Partition(std::vector<BlockId>(n, 0));
}

std::vector<Count> Partition::block_sizes() const {
  std::vector<Count> sizes(num_blocks_, 0);
  for (const BlockId b : labels_) ++sizes[static_cast<std::size_t>(b)];
  return sizes;
}

Partition relabel_partition(std::span<const std::string> raw_labels) {
  if (raw_labels.empty()) throw std::invalid_argument("empty label sequence");
  std::unordered_map<std::string, BlockId> remap;
  std::vector<BlockId> labels;
  labels.reserve(raw_labels.size());
  for (const auto& token : raw_labels) {
    auto [it, inserted] = remap.emplace(token, static_cast<BlockId>(remap.size()));
    labels.push_back(it->second);
  }
  return Partition(std::move(labels));
}

// ---------------------------------------------------------------------------
// BlockStats

BlockStats block_stats(const Graph& g, const Partition& p) {
  if (p.size() != g.num_nodes()) {
    throw std::invalid_argument("partition length " + std::to_string(p.size()) +
                                " does not match graph size " +
                                std::to_string(g.num_nodes()));
  }
  BlockStats s;
  const std::size_t B = p.num_blocks();
  s.num_blocks = B;
  s.edge_counts.assign(B * B, 0);
  s.block_sizes.assign(B, 0);
  s.block_degree_sums.assign(B, 0);
  s.degree_histograms.assign(B, {});
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto r = static_cast<std::size_t>(p[i]);
    ++s.block_sizes[r];
    s.block_degree_sums[r] += g.degrees()[i];
    ++s.degree_histograms[r][g.degrees()[i]];
  }
  for (const auto& e : g.edges()) {
    const auto r = static_cast<std::size_t>(p[static_cast<std::size_t>(e.u)]);
    const auto t = static_cast<std::size_t>(p[static_cast<std::size_t>(e.v)]);
    if (r == t) {
      s.edge_counts[r * B + r] += 2;
      ++s.e_in;
    } else {
      ++s.edge_counts[r * B + t];
      ++s.edge_counts[t * B + r];
      ++s.e_out;
    }
  }
  return s;
}

void check_block_stats(const BlockStats& s, std::size_t num_nodes,
                       std::size_t num_edges) {
  const std::size_t B = s.num_blocks;
  auto fail = [](const char* what) { throw std::logic_error(what); };
  if (s.edge_counts.size() != B * B || s.block_sizes.size() != B ||
      s.block_degree_sums.size() != B || s.degree_histograms.size() != B) {
    fail("BlockStats: inconsistent dimensions");
  }
  Count total = 0, diag = 0, nodes = 0;
  for (std::size_t r = 0; r < B; ++r) {
    Count row = 0;
    for (std::size_t t = 0; t < B; ++t) {
      if (s.e(r, t) != s.e(t, r)) fail("BlockStats: e not symmetric");
      row += s.e(r, t);
    }
    if (row != s.block_degree_sums[r]) fail("BlockStats: e_r != sum_s e_rs");
    if (s.e(r, r) % 2 != 0) fail("BlockStats: odd diagonal entry");
    total += row;
    diag += s.e(r, r);
    nodes += s.block_sizes[r];
    Count hist_nodes = 0, hist_degree = 0;
    for (const auto& [k, eta] : s.degree_histograms[r]) {
      hist_nodes += eta;
      hist_degree += k * eta;
    }
    if (hist_nodes != s.block_sizes[r] || hist_degree != s.block_degree_sums[r]) {
      fail("BlockStats: degree histogram inconsistent with block");
    }
  }
  if (total != 2 * static_cast<Count>(num_edges)) fail("BlockStats: sum e != 2E");
  if (nodes != static_cast<Count>(num_nodes)) fail("BlockStats: sum n != N");
  if (s.e_in + s.e_out != static_cast<Count>(num_edges)) {
    fail("BlockStats: e_in + e_out != E");
  }
  if (2 * s.e_in != diag) fail("BlockStats: 2 e_in != trace(e)");
}

// ---------------------------------------------------------------------------
// Metadata

MetadataTable load_metadata_csv(std::istream& in) {
  MetadataTable table;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, lineno);
    if (header) {
      header = false;
      if (fields.size() != 2) throw ParseError("expected header 'node,label'", lineno);
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected two fields", lineno);
    if (fields[0].empty()) throw ParseError("empty node id", lineno);
    if (!seen.emplace(fields[0], lineno).second) {
      throw ParseError("node '" + fields[0] + "' labelled more than once", lineno);
    }
    table.rows.emplace_back(std::move(fields[0]), std::move(fields[1]));
  }
  if (header) throw ParseError("metadata file is empty", 0);
  return table;
}

MetadataTable load_metadata_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metadata file " + path.string());
  return load_metadata_csv(in);
}

namespace {
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}
}  // namespace

void write_metadata_csv(std::ostream& out, const Graph& g, const Partition& p,
                        std::span<const std::string> label_names) {
  out << "node,label\n";
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto b = static_cast<std::size_t>(p[i]);
    out << csv_quote(g.node_names()[i]) << ','
        << (b < label_names.size() ? csv_quote(label_names[b]) : std::to_string(b))
        << '\n';
  }
}

AlignedMetadata align_metadata(const Graph& g, const MetadataTable& table,
                               MissingLabelPolicy missing,
                               UnknownNodePolicy unknown) {
  AlignedMetadata out;
  std::vector<std::string> extra;
  std::vector<std::string> extra_labels;
  std::vector<std::optional<std::string>> label_of(g.num_nodes());
  for (const auto& [node, label] : table.rows) {
    if (const auto idx = g.index_of(node)) {
      label_of[static_cast<std::size_t>(*idx)] = label;
    } else if (unknown == UnknownNodePolicy::kAddIsolated) {
      extra.push_back(node);
      extra_labels.push_back(label);
    } else {
      throw std::invalid_argument("metadata names node '" + node +
                                  "' which is not in the graph");
    }
  }

  Graph graph = extra.empty() ? g : g.with_isolated_nodes(extra);
  for (auto& l : extra_labels) label_of.emplace_back(std::move(l));
  out.added_isolated = extra.size();
  if (!extra.empty()) {
    spdlog::warn("metadata: added {} labelled node(s) absent from the edge list "
                 "as isolated nodes", extra.size());
  }

  std::vector<NodeId> keep;
  for (std::size_t i = 0; i < label_of.size(); ++i) {
    if (label_of[i]) {
      keep.push_back(static_cast<NodeId>(i));
    } else if (missing == MissingLabelPolicy::kError) {
      throw std::invalid_argument("node '" + graph.name(static_cast<NodeId>(i)) +
                                  "' has no metadata label");
    }
  }
  if (keep.empty()) throw std::invalid_argument("no node carries a metadata label");
  out.dropped_nodes = label_of.size() - keep.size();
  if (out.dropped_nodes > 0) {
    spdlog::warn("metadata: dropped {} unlabelled node(s); using induced subgraph",
                 out.dropped_nodes);
    graph = graph.induced_subgraph(keep);
  }

  std::vector<std::string> tokens;
  tokens.reserve(keep.size());
  for (const NodeId i : keep) tokens.push_back(*label_of[static_cast<std::size_t>(i)]);
  out.partition = relabel_partition(tokens);
  out.category_names.resize(out.partition.num_blocks());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.category_names[static_cast<std::size_t>(out.partition[i])] = tokens[i];
  }
  out.graph = std::move(graph);
  return out;
}

Partition load_partition_file(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file " + path.string());
  std::string first;
  std::streampos start = in.tellg();
  while (std::getline(in, first) && trim(first).empty()) {
  }
  in.clear();
  in.seekg(start);
  if (first.find(',') != std::string::npos) {
    const auto aligned = align_metadata(g, load_metadata_csv(in));
    return aligned.partition;
  }
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  if (tokens.size() != g.num_nodes()) {
    throw ParseError("partition file has " + std::to_string(tokens.size()) +
                         " labels for " + std::to_string(g.num_nodes()) + " nodes",
                     0);
  }
  return relabel_partition(tokens);
}

}  // namespace metablox
