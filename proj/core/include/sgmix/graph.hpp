#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sgmix {

using NodeId = std::uint32_t;
using Label = std::uint16_t;

/// Per-node role bits as stored in masks.bin. At most one bit set per node.
enum Role : std::uint8_t {
  kRoleNone = 0,
  kRoleTrain = 1,
  kRoleVal = 2,
  kRoleTest = 4,
};

/// Compressed sparse rows over node ids. offsets has num_rows + 1 entries.
struct Csr {
  std::vector<std::uint64_t> offsets;
  std::vector<NodeId> cols;

  std::size_t num_rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t num_entries() const { return cols.size(); }

  std::span<const NodeId> row(std::size_t u) const {
    return {cols.data() + offsets[u], cols.data() + offsets[u + 1]};
  }

  bool has_edge(NodeId u, NodeId v) const;

  friend bool operator==(const Csr&, const Csr&) = default;
};

/// Builds symmetric simple-graph CSR from an undirected edge list.
/// Both directions are materialized, duplicates are removed, columns sorted.
/// Self-loops are rejected.
Csr csr_from_undirected_edges(std::size_t num_nodes,
                              std::span<const std::pair<NodeId, NodeId>> edges);

/// Immutable node-attributed graph with train/val/test masks.
/// The stored edge list is symmetric, deduplicated, and self-loop free;
/// self-loops exist only in the normalized view below.
struct Graph {
  std::string name;
  NodeId num_nodes = 0;
  std::uint32_t num_features = 0;
  std::uint32_t num_classes = 0;
  Csr adjacency;
  std::vector<float> features;  // row-major num_nodes x num_features
  std::vector<Label> labels;
  std::vector<std::uint8_t> masks;  // Role bits

  std::span<const float> feature_row(NodeId u) const {
    return {features.data() + static_cast<std::size_t>(u) * num_features, num_features};
  }

  std::size_t degree(NodeId u) const { return adjacency.row(u).size(); }

  std::vector<NodeId> nodes_with_role(Role r) const;

  /// Bit-exact equality, including feature payload bits.
  friend bool operator==(const Graph& a, const Graph& b);
};

/// Validated construction from raw parts; symmetrizes and deduplicates edges.
Graph build_graph(std::string name, NodeId num_nodes, std::uint32_t num_features,
                  std::uint32_t num_classes,
                  std::span<const std::pair<NodeId, NodeId>> edges,
                  std::vector<float> features, std::vector<Label> labels,
                  std::vector<std::uint8_t> masks);

/// Throws DataError if any Graph invariant is violated.
void validate_graph(const Graph& g);

/// Symmetrically normalized adjacency with self-loops:
/// weight(u,v) = 1 / sqrt(d(u) * d(v)) with degrees counted self-loop included.
struct NormalizedAdjacency {
  Csr structure;  // includes the diagonal
  std::vector<double> weights;

  std::size_t num_nodes() const { return structure.num_rows(); }
};

NormalizedAdjacency normalize(const Graph& g);

/// Same, from a bare self-loop-free CSR (used for ego and mixed subgraphs).
NormalizedAdjacency normalize_csr(const Csr& adjacency);

/// On-disk bundle directory: meta.json + edges.bin + features.bin +
/// labels.bin + masks.bin. All integers little-endian; see README for the
/// exact layout.
Graph load_bundle(const std::filesystem::path& dir);
void save_bundle(const Graph& g, const std::filesystem::path& dir);

}  // namespace sgmix
