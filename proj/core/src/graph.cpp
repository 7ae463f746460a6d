#include "sgmix/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sgmix/error.hpp"

namespace sgmix {

namespace {

// --- little-endian scalar encoding -----------------------------------------

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing or unreadable file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

// --- CSR --------------------------------------------------------------------

bool Csr::has_edge(NodeId u, NodeId v) const {
  const auto r = row(u);
  return std::binary_search(r.begin(), r.end(), v);
}

Csr csr_from_undirected_edges(std::size_t num_nodes,
                              std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes)
      throw DataError("edge endpoint out of range: (" + std::to_string(u) + ", " +
                      std::to_string(v) + ")");
    if (u == v) throw DataError("self-loop not allowed: node " + std::to_string(u));
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Csr out;
  out.offsets.assign(num_nodes + 1, 0);
  out.cols.reserve(directed.size());
  for (const auto& [u, v] : directed) out.offsets[u + 1]++;
  for (std::size_t i = 0; i < num_nodes; ++i) out.offsets[i + 1] += out.offsets[i];
  for (const auto& [u, v] : directed) out.cols.push_back(v);
  return out;
}

// --- Graph ------------------------------------------------------------------

std::vector<NodeId> Graph::nodes_with_role(Role r) const {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < num_nodes; ++u) {
    if (masks[u] & r) out.push_back(u);
  }
  return out;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.name != b.name || a.num_nodes != b.num_nodes || a.num_features != b.num_features ||
      a.num_classes != b.num_classes)
    return false;
  if (a.adjacency != b.adjacency || a.labels != b.labels || a.masks != b.masks) return false;
  if (a.features.size() != b.features.size()) return false;
  // Bitwise comparison so round-trips are checked to the last mantissa bit.
  return std::memcmp(a.features.data(), b.features.data(),
                     a.features.size() * sizeof(float)) == 0;
}

Graph build_graph(std::string name, NodeId num_nodes, std::uint32_t num_features,
                  std::uint32_t num_classes,
                  std::span<const std::pair<NodeId, NodeId>> edges,
                  std::vector<float> features, std::vector<Label> labels,
                  std::vector<std::uint8_t> masks) {
  Graph g;
  g.name = std::move(name);
  g.num_nodes = num_nodes;
  g.num_features = num_features;
  g.num_classes = num_classes;
  g.adjacency = csr_from_undirected_edges(num_nodes, edges);
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.masks = std::move(masks);
  validate_graph(g);
  return g;
}

void validate_graph(const Graph& g) {
  if (g.num_classes == 0) throw DataError("graph must have at least one class");
  if (g.adjacency.num_rows() != g.num_nodes) throw DataError("adjacency row count != num_nodes");
  if (g.features.size() != static_cast<std::size_t>(g.num_nodes) * g.num_features)
    throw DataError("feature payload size mismatch");
  if (g.labels.size() != g.num_nodes) throw DataError("label count mismatch");
  if (g.masks.size() != g.num_nodes) throw DataError("mask count mismatch");

  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (g.labels[u] >= g.num_classes)
      throw DataError("label out of range at node " + std::to_string(u));
    const std::uint8_t m = g.masks[u];
    if (m & ~static_cast<std::uint8_t>(kRoleTrain | kRoleVal | kRoleTest))
      throw DataError("unknown mask bits at node " + std::to_string(u));
    if (std::popcount(m) > 1)
      throw DataError("multiple roles set at node " + std::to_string(u));
  }

  for (NodeId u = 0; u < g.num_nodes; ++u) {
    const auto r = g.adjacency.row(u);
    if (!std::is_sorted(r.begin(), r.end())) throw DataError("unsorted adjacency row");
    if (std::adjacent_find(r.begin(), r.end()) != r.end())
      throw DataError("duplicate edge in adjacency row");
    for (NodeId v : r) {
      if (v >= g.num_nodes) throw DataError("adjacency column out of range");
      if (v == u) throw DataError("stored self-loop at node " + std::to_string(u));
      if (!g.adjacency.has_edge(v, u))
        throw DataError("asymmetric edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
  }
}

// --- Normalization ----------------------------------------------------------

NormalizedAdjacency normalize_csr(const Csr& adjacency) {
  const std::size_t n = adjacency.num_rows();
  NormalizedAdjacency out;
  out.structure.offsets.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u)
    out.structure.offsets[u + 1] = out.structure.offsets[u] + adjacency.row(u).size() + 1;
  out.structure.cols.resize(out.structure.offsets[n]);
  out.weights.resize(out.structure.offsets[n]);

  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t u = 0; u < n; ++u)
    inv_sqrt_deg[u] = 1.0 / std::sqrt(static_cast<double>(adjacency.row(u).size() + 1));

  for (std::size_t u = 0; u < n; ++u) {
    std::size_t k = out.structure.offsets[u];
    bool diag_placed = false;
    for (NodeId v : adjacency.row(u)) {
      if (!diag_placed && v > u) {
        out.structure.cols[k] = static_cast<NodeId>(u);
        out.weights[k] = inv_sqrt_deg[u] * inv_sqrt_deg[u];
        ++k;
        diag_placed = true;
      }
      out.structure.cols[k] = v;
      out.weights[k] = inv_sqrt_deg[u] * inv_sqrt_deg[v];
      ++k;
    }
    if (!diag_placed) {
      out.structure.cols[k] = static_cast<NodeId>(u);
      out.weights[k] = inv_sqrt_deg[u] * inv_sqrt_deg[u];
    }
  }
  return out;
}

NormalizedAdjacency normalize(const Graph& g) { return normalize_csr(g.adjacency); }

// --- Bundle I/O ---------------------------------------------------------------

Graph load_bundle(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("meta.json parse error: " + std::string(e.what()));
  }
  if (!meta.is_object() || !meta.contains("name") || !meta.contains("num_nodes") ||
      !meta.contains("num_features") || !meta.contains("num_classes"))
    throw DataError("meta.json missing required keys");

  Graph g;
  try {
    g.name = meta.at("name").get<std::string>();
    g.num_nodes = meta.at("num_nodes").get<NodeId>();
    g.num_features = meta.at("num_features").get<std::uint32_t>();
    g.num_classes = meta.at("num_classes").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("meta.json field type error: " + std::string(e.what()));
  }

  const std::string edge_bytes = read_file(dir / "edges.bin");
  if (edge_bytes.size() < 8) throw DataError("edges.bin truncated (no count field)");
  const auto* ep = reinterpret_cast<const unsigned char*>(edge_bytes.data());
  const std::uint64_t num_edges = get_u64(ep);
  if (edge_bytes.size() != 8 + num_edges * 8)
    throw DataError("edges.bin size does not match edge count");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(num_edges);
  for (std::uint64_t e = 0; e < num_edges; ++e) {
    const NodeId u = get_u32(ep + 8 + e * 8);
    const NodeId v = get_u32(ep + 8 + e * 8 + 4);
    edges.emplace_back(u, v);
  }

  const std::string feat_bytes = read_file(dir / "features.bin");
  const std::size_t want_feat = static_cast<std::size_t>(g.num_nodes) * g.num_features * 4;
  if (feat_bytes.size() != want_feat)
    throw DataError("features.bin size mismatch: expected " + std::to_string(want_feat) +
                    " bytes, got " + std::to_string(feat_bytes.size()));
  g.features.resize(static_cast<std::size_t>(g.num_nodes) * g.num_features);
  const auto* fp = reinterpret_cast<const unsigned char*>(feat_bytes.data());
  for (std::size_t i = 0; i < g.features.size(); ++i) g.features[i] = get_f32(fp + i * 4);

  const std::string label_bytes = read_file(dir / "labels.bin");
  if (label_bytes.size() != static_cast<std::size_t>(g.num_nodes) * 2)
    throw DataError("labels.bin size mismatch");
  g.labels.resize(g.num_nodes);
  const auto* lp = reinterpret_cast<const unsigned char*>(label_bytes.data());
  for (std::size_t i = 0; i < g.labels.size(); ++i) g.labels[i] = get_u16(lp + i * 2);

  const std::string mask_bytes = read_file(dir / "masks.bin");
  if (mask_bytes.size() != g.num_nodes) throw DataError("masks.bin size mismatch");
  g.masks.assign(mask_bytes.begin(), mask_bytes.end());

  g.adjacency = csr_from_undirected_edges(g.num_nodes, edges);
  validate_graph(g);
  return g;
}

void save_bundle(const Graph& g, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create bundle directory: " + dir.string());

  nlohmann::json meta;
  meta["name"] = g.name;
  meta["num_nodes"] = g.num_nodes;
  meta["num_features"] = g.num_features;
  meta["num_classes"] = g.num_classes;
  write_file(dir / "meta.json", meta.dump(2) + "\n");

  // Each undirected edge appears exactly once with src < dst.
  std::string edge_bytes;
  std::uint64_t num_edges = 0;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    for (NodeId v : g.adjacency.row(u)) {
      if (u < v) ++num_edges;
    }
  }
  edge_bytes.reserve(8 + num_edges * 8);
  put_u64(edge_bytes, num_edges);
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    for (NodeId v : g.adjacency.row(u)) {
      if (u < v) {
        put_u32(edge_bytes, u);
        put_u32(edge_bytes, v);
      }
    }
  }
  write_file(dir / "edges.bin", edge_bytes);

  std::string feat_bytes;
  feat_bytes.reserve(g.features.size() * 4);
  for (float f : g.features) put_f32(feat_bytes, f);
  write_file(dir / "features.bin", feat_bytes);

  std::string label_bytes;
  label_bytes.reserve(g.labels.size() * 2);
  for (Label l : g.labels) put_u16(label_bytes, l);
  write_file(dir / "labels.bin", label_bytes);

  std::string mask_bytes(g.masks.begin(), g.masks.end());
  write_file(dir / "masks.bin", mask_bytes);
}

}  // namespace sgmix
