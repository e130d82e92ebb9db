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

#ifndef METABLOX_GRAPH_HPP_
#define METABLOX_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace metablox {

using NodeId = std::int32_t;
using BlockId = std::int32_t;
using Count = std::int64_t;

/// Input text could not be parsed. `line()` is 1-based, 0 when not
/// attributable to a single line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Undirected edge with u < v.
struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on dense node ids [0, N). Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Validates the simple-graph invariants and throws std::invalid_argument
  /// on self-loops, duplicate pairs or out-of-range ids. Edges are stored
  /// canonically (u < v, sorted). Empty `names` yields "0".."N-1".
  Graph(std::size_t num_nodes, std::vector<Edge> edges,
        std::vector<std::string> names = {});

  std::size_t num_nodes() const { return degrees_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Count> degrees() const { return degrees_; }
  Count degree(NodeId i) const { return degrees_[static_cast<std::size_t>(i)]; }
  Count max_degree() const { return max_degree_; }

  std::span<const NodeId> neighbors(NodeId i) const {
    const auto b = offsets_[static_cast<std::size_t>(i)];
    const auto e = offsets_[static_cast<std::size_t>(i) + 1];
    return {adjacency_.data() + b, adjacency_.data() + e};
  }

  const std::vector<std::string>& node_names() const { return names_; }
  const std::string& name(NodeId i) const {
    return names_[static_cast<std::size_t>(i)];
  }
  std::optional<NodeId> index_of(std::string_view name) const;

  /// Subgraph induced by `keep` (ascending, unique); names carried over.
  Graph induced_subgraph(std::span<const NodeId> keep) const;

  /// Same graph with `extra` isolated nodes appended under the given names.
  Graph with_isolated_nodes(std::span<const std::string> extra) const;

 private:
  std::vector<Edge> edges_;
  std::vector<Count> degrees_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  Count max_degree_ = 0;
};

/// How non-simple input is treated by load_edge_list.
enum class SimplifyPolicy {
  kCollapse,  ///< drop self-loops, collapse parallel edges, count both
  kStrict,    ///< any self-loop or parallel edge is a ParseError
};

struct LoadOptions {
  SimplifyPolicy policy = SimplifyPolicy::kCollapse;
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
  std::size_t warning_count() const {
    return self_loops_dropped + duplicates_collapsed;
  }
};

/// Parses a whitespace-separated edge list ('#' starts a comment). Node
/// tokens are arbitrary strings, indexed in first-appearance order. Both
/// orientations of a pair count as the same undirected edge.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {},
                     LoadReport* report = nullptr);
Graph load_edge_list_file(const std::filesystem::path& path,
                          const LoadOptions& options = {},
                          LoadReport* report = nullptr);

/// Writes `u v` lines using external node names.
void write_edge_list(std::ostream& out, const Graph& g);

/// Node-to-block assignment with contiguous labels [0, B).
class Partition {
 public:
  Partition() = default;

  /// Throws std::invalid_argument unless every value in [0, B) occurs, where
  /// B = max label + 1, and no label is negative.
  explicit Partition(std::vector<BlockId> labels);

  /// Relabels arbitrary non-negative ids contiguously in first-appearance
  /// order.
  static Partition canonical(std::span<const BlockId> raw);

  /// The partition with every node in block 0.
  static Partition single_block(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  std::size_t num_blocks() const { return num_blocks_; }
  BlockId operator[](std::size_t i) const { return labels_[i]; }
  std::span<const BlockId> labels() const { return labels_; }
  std::vector<Count> block_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<BlockId> labels_;
  std::size_t num_blocks_ = 0;
};

/// Maps categorical tokens to contiguous block indices in first-appearance
/// order. Throws std::invalid_argument on an empty sequence.
Partition relabel_partition(std::span<const std::string> raw_labels);

/// Sufficient statistics of a (graph, partition) pair.
///
/// `edge_counts` is the dense B x B matrix e with e_rs the number of edges
/// between r and s, and e_rr twice the number of edges inside r.
struct BlockStats {
  std::size_t num_blocks = 0;
  std::vector<Count> edge_counts;
  std::vector<Count> block_sizes;
  std::vector<Count> block_degree_sums;
  std::vector<std::map<Count, Count>> degree_histograms;
  Count e_in = 0;
  Count e_out = 0;

  Count e(std::size_t r, std::size_t s) const {
    return edge_counts[r * num_blocks + s];
  }
  Count num_edges() const { return e_in + e_out; }
};

/// Throws std::invalid_argument if p.size() != g.num_nodes().
BlockStats block_stats(const Graph& g, const Partition& p);

/// Throws std::logic_error if `s` violates a BlockStats invariant for a
/// graph with N nodes and E edges.
void check_block_stats(const BlockStats& s, std::size_t num_nodes,
                       std::size_t num_edges);

// ---------------------------------------------------------------------------
// Metadata tables

/// Parsed `node,label` CSV rows in file order.
struct MetadataTable {
  std::vector<std::pair<std::string, std::string>> rows;
};

/// Reads a two-column CSV with a header line. Fields may be double-quoted.
/// Duplicate node ids are a ParseError.
MetadataTable load_metadata_csv(std::istream& in);
MetadataTable load_metadata_csv_file(const std::filesystem::path& path);
void write_metadata_csv(std::ostream& out, const Graph& g, const Partition& p,
                        std::span<const std::string> label_names = {});

enum class MissingLabelPolicy {
  kError,        ///< a graph node without a label is an error
  kDropMissing,  ///< restrict to the subgraph induced by labelled nodes
};

enum class UnknownNodePolicy {
  kError,        ///< a labelled node absent from the graph is an error
  kAddIsolated,  ///< add it to the graph as an isolated node
};

/// Graph and metadata partition over the same node set.
struct AlignedMetadata {
  Graph graph;
  Partition partition;
  std::vector<std::string> category_names;  ///< block id -> label token
  std::size_t dropped_nodes = 0;
  std::size_t added_isolated = 0;
};

/// Aligns metadata rows with graph nodes. Throws std::invalid_argument when
/// the policies forbid a mismatch.
AlignedMetadata align_metadata(const Graph& g, const MetadataTable& table,
                               MissingLabelPolicy missing = MissingLabelPolicy::kError,
                               UnknownNodePolicy unknown = UnknownNodePolicy::kError);

/// Reads a partition file: either a metadata-style CSV (`node,label` with
/// header) keyed by node name, or one label token per line in node order.
Partition load_partition_file(const std::filesystem::path& path, const Graph& g);

}  // namespace metablox

#endif  // METABLOX_GRAPH_HPP_
