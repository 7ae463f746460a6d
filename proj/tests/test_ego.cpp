#include <doctest.h>

#include <set>

#include "sgmix/ego.hpp"
#include "sgmix/error.hpp"
#include "support/oracles.hpp"

using namespace sgmix;

namespace {

Graph path_graph(NodeId n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  std::vector<float> features(n, 0.0f);
  std::vector<Label> labels(n, 0);
  std::vector<std::uint8_t> masks(n, 0);
  return build_graph("path", n, 1, 1, edges, features, labels, masks);
}

std::set<std::pair<NodeId, NodeId>> global_edge_set(const EgoGraph& ego) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (std::size_t lu = 0; lu < ego.size(); ++lu) {
    for (NodeId lv : ego.local_edges.row(lu)) {
      const NodeId a = ego.nodes_global[lu];
      const NodeId b = ego.nodes_global[lv];
      out.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("extract_ego on a path graph") {
  const Graph g = path_graph(5);

  SUBCASE("center 2, r=1") {
    const EgoGraph ego = extract_ego(g, 2, 1);
    CHECK(ego.nodes_global == std::vector<NodeId>{1, 2, 3});
    CHECK(ego.center_local == 1);
    CHECK(global_edge_set(ego) == std::set<std::pair<NodeId, NodeId>>{{1, 2}, {2, 3}});
  }
  SUBCASE("center 0, r=2") {
    const EgoGraph ego = extract_ego(g, 0, 2);
    CHECK(ego.nodes_global == std::vector<NodeId>{0, 1, 2});
    CHECK(global_edge_set(ego) == std::set<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}});
  }
  SUBCASE("r=0 is the bare center") {
    const EgoGraph ego = extract_ego(g, 3, 0);
    CHECK(ego.nodes_global == std::vector<NodeId>{3});
    CHECK(ego.local_edges.num_entries() == 0);
    CHECK(ego.center_local == 0);
  }
  SUBCASE("center out of range") {
    CHECK_THROWS_AS(extract_ego(g, 5, 1), DataError);
  }
}

TEST_CASE("ego node set equals the matrix-power reachability oracle") {
  auto rng = RngStream(31);
  const Graph g = testsup::random_graph(40, 0.08, 2, 2, rng);
  const auto reach = testsup::reach_within(g, 3);
  for (NodeId c = 0; c < g.num_nodes; c += 5) {
    const EgoGraph ego = extract_ego(g, c, 3);
    std::vector<bool> in_ego(g.num_nodes, false);
    for (NodeId v : ego.nodes_global) in_ego[v] = true;
    for (NodeId v = 0; v < g.num_nodes; ++v) {
      CAPTURE(c);
      CAPTURE(v);
      CHECK(in_ego[v] == reach[c][v]);
    }
  }
}

TEST_CASE("ego edges are exactly the induced parent edges") {
  auto rng = RngStream(32);
  const Graph g = testsup::random_graph(50, 0.1, 2, 2, rng);
  for (NodeId c = 0; c < g.num_nodes; c += 7) {
    const EgoGraph ego = extract_ego(g, c, 2);
    const auto edges = global_edge_set(ego);
    // every pair of ego nodes: local edge presence == parent edge presence
    for (NodeId a : ego.nodes_global) {
      for (NodeId b : ego.nodes_global) {
        if (a >= b) continue;
        const bool in_parent = g.adjacency.has_edge(a, b);
        CHECK(edges.count({a, b}) == (in_parent ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("ego radius monotonicity") {
  auto rng = RngStream(33);
  const Graph g = testsup::random_graph(45, 0.07, 2, 2, rng);
  for (NodeId c = 0; c < g.num_nodes; c += 9) {
    std::vector<NodeId> prev;
    for (std::uint32_t r = 0; r <= 4; ++r) {
      const EgoGraph ego = extract_ego(g, c, r);
      CHECK(std::includes(ego.nodes_global.begin(), ego.nodes_global.end(), prev.begin(),
                          prev.end()));
      prev = ego.nodes_global;
    }
  }
}

TEST_CASE("extract_all matches sequential extraction and is order-preserving") {
  auto rng = RngStream(34);
  const Graph g = testsup::random_graph(80, 0.05, 2, 3, rng);
  std::vector<NodeId> centers;
  for (NodeId c = 0; c < g.num_nodes; c += 3) centers.push_back(c);

  const auto parallel = extract_all(g, centers, 2, /*jobs=*/4);
  REQUIRE(parallel.size() == centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const EgoGraph solo = extract_ego(g, centers[k], 2);
    CHECK(parallel[k].center_global == solo.center_global);
    CHECK(parallel[k].center_local == solo.center_local);
    CHECK(parallel[k].nodes_global == solo.nodes_global);
    CHECK(parallel[k].local_edges == solo.local_edges);
  }

  CHECK(extract_all(g, {}, 2).empty());
}

TEST_CASE("repeated extraction yields identical structures") {
  auto rng = RngStream(35);
  const Graph g = testsup::random_graph(30, 0.15, 2, 2, rng);
  const EgoGraph a = extract_ego(g, 11, 2);
  const EgoGraph b = extract_ego(g, 11, 2);
  CHECK(a.nodes_global == b.nodes_global);
  CHECK(a.local_edges == b.local_edges);
}
