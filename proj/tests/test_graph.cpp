#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sgmix/error.hpp"
#include "sgmix/graph.hpp"
#include "sgmix/sbm.hpp"
#include "support/oracles.hpp"

using namespace sgmix;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  auto dir = fs::temp_directory_path() / (std::string("sgmix_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Graph tiny_graph() {
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 2}};
  std::vector<float> features{0.5f, -1.0f, 2.0f};
  std::vector<Label> labels{0, 1, 0};
  std::vector<std::uint8_t> masks{kRoleTrain, kRoleVal, kRoleTest};
  return build_graph("tiny", 3, 1, 2, edges, features, labels, masks);
}

}  // namespace

TEST_CASE("build_graph symmetrizes and deduplicates") {
  std::vector<std::pair<NodeId, NodeId>> edges{{1, 0}, {0, 1}, {0, 1}};
  Graph g = build_graph("t", 2, 0, 1, edges, {}, {0, 0}, {0, 0});
  REQUIRE(g.adjacency.row(0).size() == 1);
  CHECK(g.adjacency.row(0)[0] == 1);
  REQUIRE(g.adjacency.row(1).size() == 1);
  CHECK(g.adjacency.row(1)[0] == 0);
}

TEST_CASE("build_graph rejects self-loops and bad labels") {
  std::vector<std::pair<NodeId, NodeId>> loop{{1, 1}};
  CHECK_THROWS_AS(build_graph("t", 2, 0, 1, loop, {}, {0, 0}, {0, 0}), DataError);
  std::vector<std::pair<NodeId, NodeId>> ok{{0, 1}};
  CHECK_THROWS_AS(build_graph("t", 2, 0, 1, ok, {}, {0, 1}, {0, 0}), DataError);   // label >= C
  CHECK_THROWS_AS(build_graph("t", 2, 0, 1, ok, {}, {0, 0}, {0, 3}), DataError);   // two roles
  CHECK_THROWS_AS(build_graph("t", 2, 0, 1, ok, {}, {0, 0}, {0, 8}), DataError);   // bad bit
}

TEST_CASE("bundle round-trip is exact") {
  const auto dir = temp_dir("roundtrip");
  SbmSpec spec;
  spec.block_sizes = {20, 15};
  spec.p_in = 0.3;
  spec.p_out = 0.05;
  spec.feature_dim = 5;
  spec.seed = 42;
  const Graph g = generate_sbm(spec);
  save_bundle(g, dir);
  const Graph back = load_bundle(dir);
  CHECK(back == g);
}

TEST_CASE("save_bundle is byte-identical across calls") {
  const auto dir_a = temp_dir("bytes_a");
  const auto dir_b = temp_dir("bytes_b");
  const Graph g = tiny_graph();
  save_bundle(g, dir_a);
  save_bundle(g, dir_b);
  for (const char* name : {"meta.json", "edges.bin", "features.bin", "labels.bin", "masks.bin"}) {
    std::ifstream fa(dir_a / name, std::ios::binary);
    std::ifstream fb(dir_b / name, std::ios::binary);
    std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CAPTURE(name);
    CHECK(a == b);
  }
}

TEST_CASE("bundle format: single-node graph payloads") {
  const auto dir = temp_dir("format");
  Graph g = build_graph("one", 1, 1, 1, {}, {0.5f}, {0}, {kRoleTrain});
  save_bundle(g, dir);
  CHECK(fs::file_size(dir / "features.bin") == 4);  // exactly one float payload
  CHECK(fs::file_size(dir / "edges.bin") == 8);     // count field only
  CHECK(fs::file_size(dir / "labels.bin") == 2);
  CHECK(fs::file_size(dir / "masks.bin") == 1);
}

TEST_CASE("load_bundle symmetrizes single-direction edge lists") {
  const auto dir = temp_dir("sym");
  Graph g = build_graph("two", 2, 0, 1, {{0, 1}}, {}, {0, 0}, {0, 0});
  save_bundle(g, dir);
  const Graph back = load_bundle(dir);
  REQUIRE(back.adjacency.row(0).size() == 1);
  CHECK(back.adjacency.row(0)[0] == 1);
  REQUIRE(back.adjacency.row(1).size() == 1);
  CHECK(back.adjacency.row(1)[0] == 0);
}

TEST_CASE("load_bundle flags corruption and missing files") {
  const auto dir = temp_dir("corrupt");
  const Graph g = tiny_graph();
  save_bundle(g, dir);

  SUBCASE("truncated features payload") {
    const auto size = fs::file_size(dir / "features.bin");
    fs::resize_file(dir / "features.bin", size - 1);
    CHECK_THROWS_AS(load_bundle(dir), DataError);
  }
  SUBCASE("missing file") {
    fs::remove(dir / "labels.bin");
    CHECK_THROWS_AS(load_bundle(dir), DataError);
  }
  SUBCASE("edge count field inconsistent with payload") {
    std::ofstream f(dir / "edges.bin", std::ios::binary | std::ios::trunc);
    const std::uint64_t claimed = 3;
    f.write(reinterpret_cast<const char*>(&claimed), 8);
    f.close();
    CHECK_THROWS_AS(load_bundle(dir), DataError);
  }
  SUBCASE("self-loop in edges.bin") {
    std::ofstream f(dir / "edges.bin", std::ios::binary | std::ios::trunc);
    const std::uint64_t count = 1;
    const std::uint32_t uv[2] = {1, 1};
    f.write(reinterpret_cast<const char*>(&count), 8);
    f.write(reinterpret_cast<const char*>(uv), 8);
    f.close();
    CHECK_THROWS_AS(load_bundle(dir), DataError);
  }
}

TEST_CASE("normalize: closed-form small cases") {
  SUBCASE("single isolated node has weight exactly 1") {
    Graph g = build_graph("iso", 1, 0, 1, {}, {}, {0}, {0});
    const auto adj = normalize(g);
    REQUIRE(adj.weights.size() == 1);
    CHECK(adj.weights[0] == 1.0);
  }
  SUBCASE("two nodes, one edge: all four weights 0.5") {
    Graph g = build_graph("pair", 2, 0, 1, {{0, 1}}, {}, {0, 0}, {0, 0});
    const auto adj = normalize(g);
    REQUIRE(adj.weights.size() == 4);
    for (double w : adj.weights) CHECK(w == doctest::Approx(0.5));
  }
  SUBCASE("path 0-1-2: weight(0,1) = 1/sqrt(6)") {
    Graph g = build_graph("path", 3, 0, 1, {{0, 1}, {1, 2}}, {}, {0, 0, 0}, {0, 0, 0});
    const auto adj = normalize(g);
    // row 0: cols {0, 1}
    CHECK(adj.structure.cols[0] == 0);
    CHECK(adj.structure.cols[1] == 1);
    CHECK(adj.weights[1] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  }
}

TEST_CASE("normalize: symmetry and the degree-weighted row-sum identity") {
  auto rng = RngStream(17);
  const Graph g = testsup::random_graph(60, 0.08, 3, 2, rng);
  const auto adj = normalize(g);

  std::vector<double> deg(g.num_nodes);
  for (NodeId u = 0; u < g.num_nodes; ++u) deg[u] = static_cast<double>(g.degree(u) + 1);

  auto weight_of = [&](NodeId u, NodeId v) {
    for (std::uint64_t e = adj.structure.offsets[u]; e < adj.structure.offsets[u + 1]; ++e) {
      if (adj.structure.cols[e] == v) return adj.weights[e];
    }
    return 0.0;
  };

  for (NodeId u = 0; u < g.num_nodes; ++u) {
    double sum = 0.0;
    for (std::uint64_t e = adj.structure.offsets[u]; e < adj.structure.offsets[u + 1]; ++e) {
      const NodeId v = adj.structure.cols[e];
      CHECK(adj.weights[e] == weight_of(v, u));  // exact symmetry
      sum += adj.weights[e] * std::sqrt(deg[v] / deg[u]);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("generate_sbm: forced and empty edge regimes") {
  SUBCASE("p_in=1, p_out=0 on blocks [3,3] gives two disjoint triangles") {
    SbmSpec spec;
    spec.block_sizes = {3, 3};
    spec.p_in = 1.0;
    spec.p_out = 0.0;
    spec.feature_dim = 2;
    spec.seed = 1;
    const Graph g = generate_sbm(spec);
    CHECK(g.adjacency.num_entries() == 12);  // 6 undirected edges
    for (NodeId u = 0; u < 6; ++u) {
      for (NodeId v : g.adjacency.row(u)) CHECK(g.labels[u] == g.labels[v]);
      CHECK(g.degree(u) == 2);
    }
  }
  SUBCASE("p_in=p_out=0 gives zero edges") {
    SbmSpec spec;
    spec.block_sizes = {4, 4};
    spec.p_in = 0.0;
    spec.p_out = 0.0;
    spec.feature_dim = 2;
    spec.seed = 1;
    CHECK(generate_sbm(spec).adjacency.num_entries() == 0);
  }
  SUBCASE("empty block list is rejected") {
    SbmSpec spec;
    spec.block_sizes = {};
    CHECK_THROWS_AS(generate_sbm(spec), DataError);
  }
  SUBCASE("p_out > p_in is rejected") {
    SbmSpec spec;
    spec.block_sizes = {3, 3};
    spec.p_in = 0.1;
    spec.p_out = 0.5;
    CHECK_THROWS_AS(generate_sbm(spec), DataError);
  }
}

TEST_CASE("generate_sbm: same seed is bit-identical, different seed is not") {
  SbmSpec spec;
  spec.block_sizes = {30, 30};
  spec.p_in = 0.2;
  spec.p_out = 0.02;
  spec.feature_dim = 4;
  spec.seed = 77;
  const Graph a = generate_sbm(spec);
  const Graph b = generate_sbm(spec);
  CHECK(a == b);
  spec.seed = 78;
  CHECK_FALSE(generate_sbm(spec) == a);
}

TEST_CASE("generate_sbm: Monte Carlo intra-block edge count matches the binomial mean") {
  // blocks [50,50], p_in=0.1: per block Binomial(C(50,2)=1225, 0.1),
  // mean 122.5, var 110.25. Mean over 1000 seeds x 2 blocks should sit
  // within 3 sigma of the mean of per-block counts.
  SbmSpec spec;
  spec.block_sizes = {50, 50};
  spec.p_in = 0.1;
  spec.p_out = 0.01;
  spec.feature_dim = 2;

  double total = 0.0;
  const int num_seeds = 1000;
  for (int s = 0; s < num_seeds; ++s) {
    spec.seed = static_cast<std::uint64_t>(s);
    const Graph g = generate_sbm(spec);
    std::size_t intra[2] = {0, 0};
    for (NodeId u = 0; u < g.num_nodes; ++u) {
      for (NodeId v : g.adjacency.row(u)) {
        if (v > u && g.labels[u] == g.labels[v]) intra[g.labels[u]]++;
      }
    }
    total += static_cast<double>(intra[0] + intra[1]);
  }
  const double mean_per_block = total / (2.0 * num_seeds);
  const double sigma_of_mean = std::sqrt(1225.0 * 0.1 * 0.9 / (2.0 * num_seeds));
  CHECK(std::abs(mean_per_block - 122.5) < 3.0 * sigma_of_mean);
}

TEST_CASE("generate_sbm: mask recipe") {
  SbmSpec spec;
  spec.block_sizes = {50, 50, 50};
  spec.p_in = 0.1;
  spec.p_out = 0.01;
  spec.feature_dim = 4;
  spec.seed = 3;
  const Graph g = generate_sbm(spec);
  std::size_t train = 0, val = 0, test = 0;
  std::size_t train_per_class[3] = {0, 0, 0};
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (g.masks[u] & kRoleTrain) {
      ++train;
      ++train_per_class[g.labels[u]];
    }
    if (g.masks[u] & kRoleVal) ++val;
    if (g.masks[u] & kRoleTest) ++test;
  }
  CHECK(train == 60);
  for (auto c : train_per_class) CHECK(c == 20);
  CHECK(val == 45);  // min(500, remaining/2)
  CHECK(test == 45);

  SUBCASE("small blocks cap the per-class train count") {
    SbmSpec small;
    small.block_sizes = {8, 30};
    small.p_in = 0.5;
    small.p_out = 0.0;
    small.feature_dim = 2;
    small.seed = 5;
    const Graph h = generate_sbm(small);
    std::size_t per_class[2] = {0, 0};
    for (NodeId u = 0; u < h.num_nodes; ++u) {
      if (h.masks[u] & kRoleTrain) ++per_class[h.labels[u]];
    }
    CHECK(per_class[0] == 8);
    CHECK(per_class[1] == 20);
  }
}
