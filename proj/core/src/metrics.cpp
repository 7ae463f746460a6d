#include <algorithm>
#include <cmath>

#include "sgmix/ego.hpp"
#include "sgmix/error.hpp"
#include "sgmix/train.hpp"

namespace sgmix {

namespace {

DenseMatrix<float> feature_matrix(const Graph& g) {
  DenseMatrix<float> x(g.num_nodes, g.num_features);
  x.data.assign(g.features.begin(), g.features.end());
  return x;
}

std::size_t row_argmax(const DenseMatrix<float>& m, std::size_t row) {
  const float* p = m.row(row);
  std::size_t best = 0;
  for (std::size_t c = 1; c < m.cols; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

}  // namespace

EvalMetrics evaluate(const GcnModel<float>& model, const Graph& g) {
  if (model.w0.rows != g.num_features || model.w1.cols != g.num_classes)
    throw DataError("evaluate: model dimensions do not match the graph");
  const NormalizedAdjacency adj = normalize(g);
  const DenseMatrix<float> x = feature_matrix(g);
  const ForwardTrace<float> trace = forward(model, adj, x, /*train_mode=*/false, nullptr);

  EvalMetrics out;
  struct Acc {
    std::size_t count = 0, correct = 0;
    double loss_sum = 0.0;
  } acc[3];
  double conf_sum = 0.0;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    const std::uint8_t m = g.masks[u];
    int slot = m & kRoleTrain ? 0 : m & kRoleVal ? 1 : m & kRoleTest ? 2 : -1;
    if (slot < 0) continue;
    const std::size_t argmax = row_argmax(trace.probs, u);
    acc[slot].count += 1;
    acc[slot].correct += argmax == g.labels[u] ? 1 : 0;
    acc[slot].loss_sum += cross_entropy_at(trace.logits, u, g.labels[u]);
    if (slot == 2) conf_sum += static_cast<double>(trace.probs.at(u, argmax));
  }
  auto fill = [](RoleMetrics& rm, const Acc& a) {
    if (a.count == 0) return;
    rm.accuracy = static_cast<double>(a.correct) / static_cast<double>(a.count);
    rm.loss = a.loss_sum / static_cast<double>(a.count);
  };
  fill(out.train, acc[0]);
  fill(out.val, acc[1]);
  fill(out.test, acc[2]);
  if (acc[2].count > 0) out.confidence = conf_sum / static_cast<double>(acc[2].count);
  return out;
}

std::vector<MixupPair> sample_distinct_label_pairs(const Graph& g, std::size_t count,
                                                   RngStream& rng) {
  const std::vector<NodeId> labeled = g.nodes_with_role(kRoleTrain);
  if (labeled.size() < 2)
    throw DataError("sample_distinct_label_pairs: need at least 2 labeled nodes");
  bool two_classes = false;
  for (NodeId u : labeled) {
    if (g.labels[u] != g.labels[labeled[0]]) {
      two_classes = true;
      break;
    }
  }
  if (!two_classes)
    throw DataError("sample_distinct_label_pairs: labeled nodes span a single class");

  std::vector<MixupPair> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    const NodeId a = labeled[rng.next_below(labeled.size())];
    const NodeId b = labeled[rng.next_below(labeled.size())];
    if (a == b || g.labels[a] == g.labels[b]) continue;
    MixupPair p;
    p.i = a;
    p.j = b;
    p.label_i = g.labels[a];
    p.label_j = g.labels[b];
    pairs.push_back(p);
  }
  return pairs;
}

std::vector<double> miss_rate_experiment(const GcnModel<float>& model, const Graph& g,
                                         std::span<const MixupPair> pairs,
                                         std::span<const double> lambda_grid,
                                         std::uint32_t radius) {
  if (lambda_grid.empty()) throw DataError("miss_rate_experiment: empty lambda grid");
  if (pairs.empty()) throw DataError("miss_rate_experiment: no pairs");

  // One ego extraction per distinct center.
  std::vector<NodeId> centers;
  centers.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    centers.push_back(p.i);
    centers.push_back(p.j);
  }
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  const std::vector<EgoGraph> egos = extract_all(g, centers, radius);
  auto ego_of = [&](NodeId u) -> const EgoGraph& {
    return egos[std::lower_bound(centers.begin(), centers.end(), u) - centers.begin()];
  };

  std::vector<double> miss_rates;
  miss_rates.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    std::vector<MixedSubgraph> mixed;
    mixed.reserve(pairs.size());
    for (const MixupPair& base : pairs) {
      MixupPair p = base;
      p.lambda = lambda;
      mixed.push_back(build_mixed_subgraph(ego_of(p.i), ego_of(p.j), g, p));
    }
    const VirtualGraphBatch batch = assemble_batch(mixed, g);
    const NormalizedAdjacency batch_adj = normalize_csr(batch.adjacency);
    DenseMatrix<float> batch_x(batch.num_nodes, batch.num_features);
    batch_x.data.assign(batch.features.begin(), batch.features.end());
    const ForwardTrace<float> trace =
        forward(model, batch_adj, batch_x, /*train_mode=*/false, nullptr);

    std::size_t misses = 0;
    for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
      const std::size_t pred = row_argmax(trace.probs, batch.virtual_indices[k]);
      if (pred != batch.pairs[k].label_i && pred != batch.pairs[k].label_j) ++misses;
    }
    miss_rates.push_back(static_cast<double>(misses) / static_cast<double>(batch.pairs.size()));
  }
  return miss_rates;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired_t_test: sample sizes differ");
  if (a.size() < 2) throw DataError("paired_t_test: need at least 2 samples");
  const std::size_t n = a.size();

  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += a[k] - b[k];
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dev = (a[k] - b[k]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult out;
  out.df = static_cast<unsigned>(n - 1);
  if (sd == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return out;
}

}  // namespace sgmix
