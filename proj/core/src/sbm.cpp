#include "sgmix/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgmix/error.hpp"
#include "sgmix/rng.hpp"

namespace sgmix {

namespace {

constexpr std::uint32_t kTrainPerClass = 20;
constexpr std::size_t kValBudget = 500;

void validate_spec(const SbmSpec& spec) {
  if (spec.block_sizes.empty()) throw DataError("sbm: block_sizes must be nonempty");
  if (!(spec.p_out >= 0.0 && spec.p_out <= spec.p_in && spec.p_in <= 1.0))
    throw DataError("sbm: require 0 <= p_out <= p_in <= 1");
  if (spec.feature_dim == 0) throw DataError("sbm: feature_dim must be >= 1");
  if (!(spec.feature_noise >= 0.0)) throw DataError("sbm: feature_noise must be >= 0");
}

}  // namespace

Graph generate_sbm(const SbmSpec& spec) {
  validate_spec(spec);

  const std::uint32_t num_classes = static_cast<std::uint32_t>(spec.block_sizes.size());
  std::uint64_t total = 0;
  for (std::uint32_t b : spec.block_sizes) total += b;
  if (total == 0) throw DataError("sbm: graph must have at least one node");
  const NodeId n = static_cast<NodeId>(total);

  std::vector<Label> labels(n);
  {
    NodeId next = 0;
    for (std::uint32_t c = 0; c < num_classes; ++c) {
      for (std::uint32_t k = 0; k < spec.block_sizes[c]; ++k) labels[next++] = static_cast<Label>(c);
    }
  }

  auto means_rng = RngStream::derive(spec.seed, "sbm-means");
  std::vector<double> means(static_cast<std::size_t>(num_classes) * spec.feature_dim);
  for (double& m : means) m = means_rng.normal();

  auto edge_rng = RngStream::derive(spec.seed, "sbm-edges");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
      if (edge_rng.uniform() < p) edges.emplace_back(u, v);
    }
  }

  auto feat_rng = RngStream::derive(spec.seed, "sbm-features");
  std::vector<float> features(static_cast<std::size_t>(n) * spec.feature_dim);
  for (NodeId u = 0; u < n; ++u) {
    const double* mean = means.data() + static_cast<std::size_t>(labels[u]) * spec.feature_dim;
    for (std::uint32_t f = 0; f < spec.feature_dim; ++f) {
      features[static_cast<std::size_t>(u) * spec.feature_dim + f] =
          static_cast<float>(mean[f] + spec.feature_noise * feat_rng.normal());
    }
  }

  // Masks: shuffle each class, take up to 20 train nodes, then hand out
  // validation nodes round-robin over classes until the budget is spent.
  auto mask_rng = RngStream::derive(spec.seed, "sbm-masks");
  std::vector<std::uint8_t> masks(n, kRoleNone);
  std::vector<std::vector<NodeId>> by_class(num_classes);
  for (NodeId u = 0; u < n; ++u) by_class[labels[u]].push_back(u);
  for (auto& cls : by_class) mask_rng.shuffle(cls);

  std::size_t remaining = 0;
  std::vector<std::size_t> cursor(num_classes, 0);
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    const std::size_t take = std::min<std::size_t>(kTrainPerClass, by_class[c].size());
    for (std::size_t k = 0; k < take; ++k) masks[by_class[c][k]] = kRoleTrain;
    cursor[c] = take;
    remaining += by_class[c].size() - take;
  }

  // The citation-benchmark recipe uses a flat 500-node validation set; at
  // desk scale that would swallow the whole graph, so the budget is capped
  // at half of what is left to keep the test role populated.
  std::size_t val_budget = std::min(kValBudget, remaining / 2);
  std::uint32_t cls = 0;
  std::uint32_t empty_streak = 0;
  while (val_budget > 0 && empty_streak < num_classes) {
    if (cursor[cls] < by_class[cls].size()) {
      masks[by_class[cls][cursor[cls]++]] = kRoleVal;
      --val_budget;
      empty_streak = 0;
    } else {
      ++empty_streak;
    }
    cls = (cls + 1) % num_classes;
  }
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    while (cursor[c] < by_class[c].size()) masks[by_class[c][cursor[c]++]] = kRoleTest;
  }

  return build_graph(spec.name, n, spec.feature_dim, num_classes, edges, std::move(features),
                     std::move(labels), std::move(masks));
}

}  // namespace sgmix
