#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "sgmix/ego.hpp"
#include "sgmix/error.hpp"
#include "sgmix/mixup.hpp"
#include "support/oracles.hpp"

using namespace sgmix;

namespace {

std::vector<NodeId> iota_nodes(NodeId n) {
  std::vector<NodeId> v(n);
  for (NodeId k = 0; k < n; ++k) v[k] = k;
  return v;
}

MixupPair make_pair(const Graph& g, NodeId i, NodeId j, double lambda) {
  MixupPair p;
  p.i = i;
  p.j = j;
  p.lambda = lambda;
  p.label_i = g.labels[i];
  p.label_j = g.labels[j];
  return p;
}

/// Canonical (sorted) local edge list, virtual node mapped to its own marker.
std::set<std::pair<NodeId, NodeId>> canonical_edges(const MixedSubgraph& m) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (std::size_t lu = 0; lu < m.num_local_nodes(); ++lu) {
    for (NodeId lv : m.local_edges.row(lu)) {
      if (lv <= lu) continue;
      out.insert({static_cast<NodeId>(lu), lv});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sample_pairs keeps floor(epsilon * n / 2) disjoint pairs") {
  auto nodes = iota_nodes(140);
  std::vector<Label> labels(140, 0);

  SUBCASE("epsilon 1 pairs everyone") {
    auto rng = RngStream(1);
    const auto pairs = sample_pairs(nodes, labels, 1.0, rng);
    CHECK(pairs.size() == 70);
    std::set<NodeId> seen;
    for (const auto& p : pairs) {
      CHECK(p.i != p.j);
      seen.insert(p.i);
      seen.insert(p.j);
      CHECK(std::isnan(p.lambda));
    }
    CHECK(seen.size() == 140);
  }
  SUBCASE("epsilon 0.5 halves the pair count") {
    auto rng = RngStream(1);
    CHECK(sample_pairs(nodes, labels, 0.5, rng).size() == 35);
  }
  SUBCASE("odd counts floor; one node left unpaired") {
    auto three = iota_nodes(3);
    auto rng = RngStream(1);
    const auto pairs = sample_pairs(three, labels, 1.0, rng);
    CHECK(pairs.size() == 1);
  }
  SUBCASE("validation") {
    auto one = iota_nodes(1);
    auto rng = RngStream(1);
    CHECK_THROWS_AS(sample_pairs(one, labels, 1.0, rng), DataError);
    CHECK_THROWS_AS(sample_pairs(nodes, labels, 0.0, rng), DataError);
    CHECK_THROWS_AS(sample_pairs(nodes, labels, 1.5, rng), DataError);
  }
}

TEST_CASE("sample_pairs matching frequencies are uniform over unordered pairs") {
  // n=10 labeled nodes: each unordered pair is matched with probability
  // 5/45 = 1/9 per draw, so counts over 1000 seeds are Binomial(1000, 1/9).
  auto nodes = iota_nodes(10);
  std::vector<Label> labels(10, 0);
  std::map<std::pair<NodeId, NodeId>, int> counts;
  const int num_draws = 1000;
  for (int s = 0; s < num_draws; ++s) {
    auto rng = RngStream(static_cast<std::uint64_t>(s));
    for (const auto& p : sample_pairs(nodes, labels, 1.0, rng)) {
      counts[{std::min(p.i, p.j), std::max(p.i, p.j)}]++;
    }
  }
  CHECK(counts.size() == 45);
  const double mean = num_draws * 5.0 / 45.0;
  const double sigma = std::sqrt(num_draws * (1.0 / 9.0) * (8.0 / 9.0));
  for (const auto& [pair, c] : counts) {
    CAPTURE(pair.first);
    CAPTURE(pair.second);
    CHECK(std::abs(c - mean) < 5.0 * sigma);
  }
}

TEST_CASE("mix_features endpoints and arithmetic") {
  const std::vector<float> xi{1.0f, 0.0f};
  const std::vector<float> xj{0.0f, 2.0f};
  CHECK(mix_features(xi, xj, 1.0) == xi);
  const auto mid = mix_features(xi, xj, 0.25);
  CHECK(mid[0] == doctest::Approx(0.25f));
  CHECK(mid[1] == doctest::Approx(1.5f));
  CHECK_THROWS_AS(mix_features(xi, std::vector<float>{1.0f}, 0.5), DataError);
  CHECK_THROWS_AS(mix_features(xi, xj, 1.5), UsageError);
}

TEST_CASE("mix_features matches the per-scalar oracle exactly") {
  auto rng = RngStream(8);
  std::vector<float> xi(64), xj(64);
  for (auto& v : xi) v = static_cast<float>(rng.normal());
  for (auto& v : xj) v = static_cast<float>(rng.normal());
  const double lambda = 0.37;
  const auto got = mix_features(xi, xj, lambda);
  for (std::size_t k = 0; k < 64; ++k) {
    const float want = static_cast<float>(lambda * static_cast<double>(xi[k]) +
                                          (1.0 - lambda) * static_cast<double>(xj[k]));
    CHECK(got[k] == want);  // same arithmetic order: 0 ulps
  }
}

TEST_CASE("build_mixed_subgraph: two disjoint stars") {
  // i=0 with leaves {1,2}; j=3 with leaf {4}
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {0, 2}, {3, 4}};
  std::vector<float> x(5 * 2, 1.0f);
  const Graph g = build_graph("stars", 5, 2, 2, edges, x, {0, 0, 0, 1, 1},
                              std::vector<std::uint8_t>(5, kRoleTrain));
  const auto ei = extract_ego(g, 0, 1);
  const auto ej = extract_ego(g, 3, 1);
  const auto m = build_mixed_subgraph(ei, ej, g, make_pair(g, 0, 3, 0.5));

  CHECK(m.nodes_global == std::vector<NodeId>{1, 2, 4});
  // virtual node local 0 connects to all three leaves, no real-real edges
  CHECK(m.local_edges.row(0).size() == 3);
  CHECK(canonical_edges(m) ==
        std::set<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("build_mixed_subgraph: adjacent centers collapse without a self-loop") {
  // i=0 adjacent to j=1; 0 also adjacent to a=2, 1 to b=3
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {0, 2}, {1, 3}};
  std::vector<float> x(4 * 1, 0.0f);
  const Graph g = build_graph("adj", 4, 1, 2, edges, x, {0, 0, 1, 1},
                              std::vector<std::uint8_t>(4, kRoleTrain));
  const auto m = build_mixed_subgraph(extract_ego(g, 0, 1), extract_ego(g, 1, 1), g,
                                      make_pair(g, 0, 1, 0.5));
  CHECK(m.nodes_global == std::vector<NodeId>{2, 3});
  CHECK(canonical_edges(m) == std::set<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}});
}

TEST_CASE("build_mixed_subgraph: r=0 gives an isolated virtual node") {
  auto rng = RngStream(12);
  const Graph g = testsup::random_graph(20, 0.2, 3, 2, rng);
  const auto m = build_mixed_subgraph(extract_ego(g, 2, 0), extract_ego(g, 9, 0), g,
                                      make_pair(g, 2, 9, 0.3));
  CHECK(m.nodes_global.empty());
  CHECK(m.num_local_nodes() == 1);
  CHECK(m.local_edges.num_entries() == 0);
}

TEST_CASE("build_mixed_subgraph rejects mismatched inputs") {
  auto rng = RngStream(13);
  const Graph g = testsup::random_graph(20, 0.2, 3, 2, rng);
  const auto e1 = extract_ego(g, 1, 1);
  const auto e2 = extract_ego(g, 5, 2);
  CHECK_THROWS_AS(build_mixed_subgraph(e1, e2, g, make_pair(g, 1, 5, 0.5)), UsageError);
  const auto e5 = extract_ego(g, 5, 1);
  CHECK_THROWS_AS(build_mixed_subgraph(e1, e5, g, make_pair(g, 1, 6, 0.5)), UsageError);
  MixupPair unset = make_pair(g, 1, 5, 0.5);
  unset.lambda = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_mixed_subgraph(e1, e5, g, unset), UsageError);
}

TEST_CASE("build_mixed_subgraph equals the set-algebra oracle on random graphs") {
  auto rng = RngStream(14);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testsup::random_graph(30 + trial % 20, 0.1, 2, 3, rng);
    const NodeId i = static_cast<NodeId>(rng.next_below(g.num_nodes));
    NodeId j = static_cast<NodeId>(rng.next_below(g.num_nodes));
    if (i == j) continue;
    const std::uint32_t r = 1 + static_cast<std::uint32_t>(rng.next_below(2));

    const auto m = build_mixed_subgraph(extract_ego(g, i, r), extract_ego(g, j, r), g,
                                        make_pair(g, i, j, 0.5));
    const auto oracle = testsup::mixed_subgraph_oracle(g, i, j, r);

    CHECK(m.nodes_global == oracle.nodes);

    std::set<NodeId> got_virt;
    std::set<std::pair<NodeId, NodeId>> got_real;
    for (std::size_t lu = 0; lu < m.num_local_nodes(); ++lu) {
      for (NodeId lv : m.local_edges.row(lu)) {
        if (lv <= lu) continue;
        if (lu == 0) {
          got_virt.insert(m.nodes_global[lv - 1]);
        } else {
          const NodeId a = m.nodes_global[lu - 1];
          const NodeId b = m.nodes_global[lv - 1];
          got_real.insert({std::min(a, b), std::max(a, b)});
        }
      }
    }
    CHECK(got_virt == oracle.virt_neighbors);
    CHECK(got_real == oracle.real_edges);

    // degree and node-count identities
    CHECK(m.local_edges.row(0).size() == oracle.virt_neighbors.size());
    const auto ei = extract_ego(g, i, r);
    const auto ej = extract_ego(g, j, r);
    std::set<NodeId> uni(ei.nodes_global.begin(), ei.nodes_global.end());
    uni.insert(ej.nodes_global.begin(), ej.nodes_global.end());
    CHECK(m.num_local_nodes() == uni.size() - 2 + 1);
  }
}

TEST_CASE("structural symmetry: swapping the pair and complementing lambda") {
  auto rng = RngStream(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testsup::random_graph(25, 0.15, 4, 2, rng);
    const NodeId i = static_cast<NodeId>(rng.next_below(g.num_nodes));
    NodeId j = static_cast<NodeId>(rng.next_below(g.num_nodes));
    if (i == j) continue;
    // dyadic lambda so 1 - (1 - lambda) reproduces lambda exactly
    const double lambda = static_cast<double>(rng.next_below(256)) / 256.0;

    const auto ei = extract_ego(g, i, 1);
    const auto ej = extract_ego(g, j, 1);
    const auto fwd = build_mixed_subgraph(ei, ej, g, make_pair(g, i, j, lambda));
    const auto rev = build_mixed_subgraph(ej, ei, g, make_pair(g, j, i, 1.0 - lambda));

    CHECK(fwd.nodes_global == rev.nodes_global);
    CHECK(canonical_edges(fwd) == canonical_edges(rev));
    CHECK(fwd.virtual_features == rev.virtual_features);  // exact
  }
}

TEST_CASE("assemble_batch lays blocks out disjointly") {
  auto rng = RngStream(16);
  const Graph g = testsup::random_graph(40, 0.12, 3, 2, rng);

  std::vector<MixedSubgraph> mixed;
  mixed.push_back(build_mixed_subgraph(extract_ego(g, 0, 1), extract_ego(g, 20, 1), g,
                                       make_pair(g, 0, 20, 0.5)));
  mixed.push_back(build_mixed_subgraph(extract_ego(g, 5, 1), extract_ego(g, 30, 1), g,
                                       make_pair(g, 5, 30, 0.25)));
  const auto batch = assemble_batch(mixed, g);

  REQUIRE(batch.block_offsets.size() == 2);
  CHECK(batch.block_offsets[0] == 0);
  CHECK(batch.block_offsets[1] == mixed[0].num_local_nodes());
  CHECK(batch.num_nodes == mixed[0].num_local_nodes() + mixed[1].num_local_nodes());
  CHECK(batch.virtual_indices == std::vector<std::size_t>{batch.block_offsets[0],
                                                          batch.block_offsets[1]});

  // no edge crosses a block boundary
  for (std::size_t u = 0; u < batch.num_nodes; ++u) {
    const bool u_first = u < batch.block_offsets[1];
    for (NodeId v : batch.adjacency.row(u)) {
      CHECK(u_first == (v < batch.block_offsets[1]));
    }
  }

  // virtual rows carry mixed features, real rows copy the parent graph
  for (std::size_t b = 0; b < 2; ++b) {
    const auto off = batch.block_offsets[b];
    for (std::uint32_t f = 0; f < g.num_features; ++f) {
      CHECK(batch.features[off * g.num_features + f] == mixed[b].virtual_features[f]);
    }
    for (std::size_t k = 0; k < mixed[b].nodes_global.size(); ++k) {
      const auto src = g.feature_row(mixed[b].nodes_global[k]);
      for (std::uint32_t f = 0; f < g.num_features; ++f)
        CHECK(batch.features[(off + 1 + k) * g.num_features + f] == src[f]);
    }
  }

  SUBCASE("single block batch is the block at offset 0") {
    const auto solo = assemble_batch(std::span(mixed.data(), 1), g);
    CHECK(solo.num_nodes == mixed[0].num_local_nodes());
    CHECK(solo.adjacency == mixed[0].local_edges);
  }
  SUBCASE("empty list is rejected") {
    CHECK_THROWS_AS(assemble_batch({}, g), DataError);
  }
}
