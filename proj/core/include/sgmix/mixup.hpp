#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sgmix/ego.hpp"
#include "sgmix/graph.hpp"
#include "sgmix/rng.hpp"

namespace sgmix {

struct MixupPair {
  NodeId i = 0;
  NodeId j = 0;
  double lambda = std::numeric_limits<double>::quiet_NaN();  // NaN = unset
  Label label_i = 0;
  Label label_j = 0;
};

/// Pairs a uniformly random permutation of the labeled nodes consecutively
/// and keeps the first floor(epsilon * |labeled| / 2) pairs; each node
/// appears in at most one pair. lambda is left unset.
std::vector<MixupPair> sample_pairs(std::span<const NodeId> labeled,
                                    std::span<const Label> labels, double epsilon,
                                    RngStream& rng);

/// lambda * x_i + (1 - lambda) * x_j, elementwise (double intermediate,
/// float result).
std::vector<float> mix_features(std::span<const float> x_i, std::span<const float> x_j,
                                double lambda);

/// One mixed subgraph: both ego node sets minus the two centers, a virtual
/// node (local index 0) carrying interpolated features and wired to the
/// centers' direct neighbors, and the union of the egos' induced edges.
struct MixedSubgraph {
  MixupPair pair;
  std::uint32_t radius = 0;
  std::vector<NodeId> nodes_global;  // sorted, centers excluded
  std::vector<float> virtual_features;
  Csr local_edges;  // local index 0 is the virtual node; no self-loops

  std::size_t num_local_nodes() const { return nodes_global.size() + 1; }
};

MixedSubgraph build_mixed_subgraph(const EgoGraph& ego_i, const EgoGraph& ego_j,
                                   const Graph& g, const MixupPair& pair);

/// Block-diagonal concatenation of mixed subgraphs. Virtual node k sits at
/// batch index block_offsets[k]; real-node features are copied from the
/// parent graph.
struct VirtualGraphBatch {
  std::vector<std::size_t> block_offsets;
  std::size_t num_nodes = 0;
  std::uint32_t num_features = 0;
  std::vector<float> features;  // num_nodes x num_features
  Csr adjacency;                // no cross-block edges
  std::vector<std::size_t> virtual_indices;
  std::vector<MixupPair> pairs;
};

VirtualGraphBatch assemble_batch(std::span<const MixedSubgraph> mixed, const Graph& g);

}  // namespace sgmix
