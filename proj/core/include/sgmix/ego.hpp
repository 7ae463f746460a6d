#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgmix/graph.hpp"

namespace sgmix {

/// r-hop ego subgraph: every node reachable from the center within r hops,
/// plus all parent-graph edges among them. Node order is sorted by global id
/// so downstream mean pooling is order-independent.
struct EgoGraph {
  NodeId center_global = 0;
  std::uint32_t radius = 0;
  std::vector<NodeId> nodes_global;  // sorted, includes the center
  Csr local_edges;                   // induced, over local indices, no self-loops
  std::uint32_t center_local = 0;

  std::size_t size() const { return nodes_global.size(); }
  bool contains(NodeId global) const;
};

EgoGraph extract_ego(const Graph& g, NodeId center, std::uint32_t radius);

/// Batched extraction; result[i] == extract_ego(g, centers[i], radius).
/// Fans out across worker threads when jobs != 1.
std::vector<EgoGraph> extract_all(const Graph& g, std::span<const NodeId> centers,
                                  std::uint32_t radius, unsigned jobs = 1);

}  // namespace sgmix
