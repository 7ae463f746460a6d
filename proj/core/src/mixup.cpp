#include "sgmix/mixup.hpp"

#include <algorithm>
#include <cmath>

#include "sgmix/error.hpp"

namespace sgmix {

std::vector<MixupPair> sample_pairs(std::span<const NodeId> labeled,
                                    std::span<const Label> labels, double epsilon,
                                    RngStream& rng) {
  if (labeled.size() < 2) throw DataError("sample_pairs: need at least 2 labeled nodes");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DataError("sample_pairs: epsilon must be in (0, 1]");

  std::vector<NodeId> perm(labeled.begin(), labeled.end());
  rng.shuffle(perm);

  // Tiny slack so exact grid values like 0.1 * n / 2 do not round down.
  const auto num_pairs = static_cast<std::size_t>(
      std::floor(epsilon * static_cast<double>(labeled.size()) / 2.0 + 1e-9));
  std::vector<MixupPair> pairs;
  pairs.reserve(num_pairs);
  for (std::size_t k = 0; k < num_pairs; ++k) {
    MixupPair p;
    p.i = perm[2 * k];
    p.j = perm[2 * k + 1];
    p.label_i = labels[p.i];
    p.label_j = labels[p.j];
    pairs.push_back(p);
  }
  return pairs;
}

std::vector<float> mix_features(std::span<const float> x_i, std::span<const float> x_j,
                                double lambda) {
  if (x_i.size() != x_j.size()) throw DataError("mix_features: length mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw UsageError("mix_features: lambda must be in [0, 1]");
  std::vector<float> out(x_i.size());
  const double one_minus = 1.0 - lambda;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<float>(lambda * static_cast<double>(x_i[k]) +
                                one_minus * static_cast<double>(x_j[k]));
  }
  return out;
}

MixedSubgraph build_mixed_subgraph(const EgoGraph& ego_i, const EgoGraph& ego_j,
                                   const Graph& g, const MixupPair& pair) {
  if (ego_i.radius != ego_j.radius)
    throw UsageError("build_mixed_subgraph: ego radii differ");
  if (ego_i.center_global != pair.i || ego_j.center_global != pair.j)
    throw UsageError("build_mixed_subgraph: pair does not match ego centers");
  if (!(pair.lambda >= 0.0 && pair.lambda <= 1.0))
    throw UsageError("build_mixed_subgraph: pair.lambda not set or out of range");

  MixedSubgraph out;
  out.pair = pair;
  out.radius = ego_i.radius;

  // Node union minus both centers; overlap nodes enter once.
  std::set_union(ego_i.nodes_global.begin(), ego_i.nodes_global.end(),
                 ego_j.nodes_global.begin(), ego_j.nodes_global.end(),
                 std::back_inserter(out.nodes_global));
  std::erase_if(out.nodes_global, [&](NodeId v) { return v == pair.i || v == pair.j; });

  auto local_of = [&](NodeId global) -> NodeId {
    const auto it =
        std::lower_bound(out.nodes_global.begin(), out.nodes_global.end(), global);
    return static_cast<NodeId>(1 + (it - out.nodes_global.begin()));
  };
  auto in_mix = [&](NodeId global) {
    return std::binary_search(out.nodes_global.begin(), out.nodes_global.end(), global);
  };

  std::vector<std::pair<NodeId, NodeId>> edges;

  // Virtual node inherits the centers' direct neighborhoods. A collapsed
  // i-j edge would be a self-loop and is dropped here.
  std::vector<NodeId> virtual_nbrs;
  const auto row_i = g.adjacency.row(pair.i);
  const auto row_j = g.adjacency.row(pair.j);
  std::set_union(row_i.begin(), row_i.end(), row_j.begin(), row_j.end(),
                 std::back_inserter(virtual_nbrs));
  for (NodeId v : virtual_nbrs) {
    if (v != pair.i && v != pair.j && in_mix(v)) edges.emplace_back(0, local_of(v));
  }

  // Real-real edges: parent edges whose endpoints co-reside in at least one
  // of the two ego graphs (the egos are induced, so co-membership suffices).
  for (NodeId u : out.nodes_global) {
    for (NodeId v : g.adjacency.row(u)) {
      if (v <= u || !in_mix(v)) continue;
      const bool in_i = ego_i.contains(u) && ego_i.contains(v);
      const bool in_j = ego_j.contains(u) && ego_j.contains(v);
      if (in_i || in_j) edges.emplace_back(local_of(u), local_of(v));
    }
  }

  out.local_edges = csr_from_undirected_edges(out.num_local_nodes(), edges);
  out.virtual_features = mix_features(g.feature_row(pair.i), g.feature_row(pair.j), pair.lambda);
  return out;
}

VirtualGraphBatch assemble_batch(std::span<const MixedSubgraph> mixed, const Graph& g) {
  if (mixed.empty()) throw DataError("assemble_batch: empty subgraph list");

  VirtualGraphBatch batch;
  batch.num_features = g.num_features;
  batch.block_offsets.reserve(mixed.size());
  std::size_t total = 0;
  for (const auto& m : mixed) {
    if (m.virtual_features.size() != g.num_features)
      throw DataError("assemble_batch: feature width mismatch");
    batch.block_offsets.push_back(total);
    total += m.num_local_nodes();
  }
  batch.num_nodes = total;

  batch.features.resize(total * g.num_features);
  batch.adjacency.offsets.assign(total + 1, 0);
  std::size_t entries = 0;
  for (std::size_t b = 0; b < mixed.size(); ++b) {
    const auto& m = mixed[b];
    const std::size_t off = batch.block_offsets[b];
    batch.virtual_indices.push_back(off);
    batch.pairs.push_back(m.pair);

    std::copy(m.virtual_features.begin(), m.virtual_features.end(),
              batch.features.begin() + off * g.num_features);
    for (std::size_t k = 0; k < m.nodes_global.size(); ++k) {
      const auto src = g.feature_row(m.nodes_global[k]);
      std::copy(src.begin(), src.end(),
                batch.features.begin() + (off + 1 + k) * g.num_features);
    }

    for (std::size_t lu = 0; lu < m.num_local_nodes(); ++lu) {
      entries += m.local_edges.row(lu).size();
      batch.adjacency.offsets[off + lu + 1] = entries;
    }
  }
  batch.adjacency.cols.reserve(entries);
  for (std::size_t b = 0; b < mixed.size(); ++b) {
    const auto& m = mixed[b];
    const std::size_t off = batch.block_offsets[b];
    for (std::size_t lu = 0; lu < m.num_local_nodes(); ++lu) {
      for (NodeId lv : m.local_edges.row(lu))
        batch.adjacency.cols.push_back(static_cast<NodeId>(off + lv));
    }
  }
  return batch;
}

}  // namespace sgmix
