#include "sgmix/ego.hpp"

#include <algorithm>

#include "sgmix/error.hpp"
#include "sgmix/parallel.hpp"

namespace sgmix {

bool EgoGraph::contains(NodeId global) const {
  return std::binary_search(nodes_global.begin(), nodes_global.end(), global);
}

EgoGraph extract_ego(const Graph& g, NodeId center, std::uint32_t radius) {
  if (center >= g.num_nodes)
    throw DataError("extract_ego: center " + std::to_string(center) + " out of range");

  EgoGraph ego;
  ego.center_global = center;
  ego.radius = radius;

  // BFS frontier expansion up to depth r.
  constexpr std::uint32_t kUnseen = ~0u;
  std::vector<std::uint32_t> dist(g.num_nodes, kUnseen);
  std::vector<NodeId> frontier{center};
  dist[center] = 0;
  ego.nodes_global.push_back(center);
  for (std::uint32_t depth = 0; depth < radius && !frontier.empty(); ++depth) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : g.adjacency.row(u)) {
        if (dist[v] == kUnseen) {
          dist[v] = depth + 1;
          next.push_back(v);
          ego.nodes_global.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(ego.nodes_global.begin(), ego.nodes_global.end());
  ego.center_local = static_cast<std::uint32_t>(
      std::lower_bound(ego.nodes_global.begin(), ego.nodes_global.end(), center) -
      ego.nodes_global.begin());

  // Induced edges, remapped to local indices.
  const std::size_t k = ego.nodes_global.size();
  ego.local_edges.offsets.assign(k + 1, 0);
  std::vector<NodeId> local_cols;
  for (std::size_t lu = 0; lu < k; ++lu) {
    for (NodeId v : g.adjacency.row(ego.nodes_global[lu])) {
      const auto it = std::lower_bound(ego.nodes_global.begin(), ego.nodes_global.end(), v);
      if (it != ego.nodes_global.end() && *it == v)
        local_cols.push_back(static_cast<NodeId>(it - ego.nodes_global.begin()));
    }
    ego.local_edges.offsets[lu + 1] = local_cols.size();
  }
  ego.local_edges.cols = std::move(local_cols);
  return ego;
}

std::vector<EgoGraph> extract_all(const Graph& g, std::span<const NodeId> centers,
                                  std::uint32_t radius, unsigned jobs) {
  for (NodeId c : centers) {
    if (c >= g.num_nodes)
      throw DataError("extract_all: center " + std::to_string(c) + " out of range");
  }
  std::vector<EgoGraph> out(centers.size());
  parallel_for(centers.size(), jobs,
               [&](std::size_t i) { out[i] = extract_ego(g, centers[i], radius); });
  return out;
}

}  // namespace sgmix
