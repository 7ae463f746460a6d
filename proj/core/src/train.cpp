#include "sgmix/train.hpp"

#include <algorithm>
#include <cmath>

#include "sgmix/adam.hpp"
#include "sgmix/ego.hpp"
#include "sgmix/error.hpp"

namespace sgmix {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Adaptive: return "adaptive";
    case PolicyKind::RandomBeta: return "random-beta";
    case PolicyKind::Fixed: return "fixed";
  }
  return "?";
}

void validate_config(const TrainConfig& cfg) {
  if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0)) throw UsageError("config: mu must be in [0, 1]");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
    throw UsageError("config: epsilon must be in [0, 1]");
  if (cfg.hidden == 0) throw UsageError("config: hidden must be >= 1");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0))
    throw UsageError("config: dropout must be in [0, 1)");
  if (!(cfg.lr > 0.0)) throw UsageError("config: lr must be > 0");
  if (!(cfg.weight_decay >= 0.0)) throw UsageError("config: weight_decay must be >= 0");
  if (cfg.max_epochs < 1) throw UsageError("config: max_epochs must be >= 1");
  if (cfg.patience < 1) throw UsageError("config: patience must be >= 1");
  validate_policy(make_policy(cfg));
}

LambdaPolicy make_policy(const TrainConfig& cfg) {
  switch (cfg.policy) {
    case PolicyKind::Adaptive: return AdaptivePolicy{cfg.gamma, cfg.beta};
    case PolicyKind::RandomBeta: return RandomBetaPolicy{cfg.alpha};
    case PolicyKind::Fixed: return FixedPolicy{cfg.lambda_fixed};
  }
  throw UsageError("config: unknown policy");
}

std::optional<double> EvalMetrics::generalization_gap() const {
  if (test.loss.has_value() && train.loss.has_value()) return *test.loss - *train.loss;
  return std::nullopt;
}

namespace {

DenseMatrix<float> feature_matrix(const Graph& g) {
  DenseMatrix<float> x(g.num_nodes, g.num_features);
  x.data.assign(g.features.begin(), g.features.end());
  return x;
}

DenseMatrix<float> batch_feature_matrix(const VirtualGraphBatch& batch) {
  DenseMatrix<float> x(batch.num_nodes, batch.num_features);
  x.data.assign(batch.features.begin(), batch.features.end());
  return x;
}

EvalMetrics metrics_from_trace(const ForwardTrace<float>& trace, const Graph& g) {
  EvalMetrics out;
  struct Acc {
    std::size_t count = 0;
    std::size_t correct = 0;
    double loss_sum = 0.0;
  };
  Acc acc[3];  // train, val, test
  double conf_sum = 0.0;

  for (NodeId u = 0; u < g.num_nodes; ++u) {
    const std::uint8_t m = g.masks[u];
    int slot = -1;
    if (m & kRoleTrain) slot = 0;
    else if (m & kRoleVal) slot = 1;
    else if (m & kRoleTest) slot = 2;
    if (slot < 0) continue;

    const float* p = trace.probs.row(u);
    std::size_t argmax = 0;
    for (std::size_t c = 1; c < trace.probs.cols; ++c) {
      if (p[c] > p[argmax]) argmax = c;
    }
    acc[slot].count += 1;
    acc[slot].correct += argmax == g.labels[u] ? 1 : 0;
    acc[slot].loss_sum += cross_entropy_at(trace.logits, u, g.labels[u]);
    if (slot == 2) conf_sum += static_cast<double>(p[argmax]);
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

/// Subgraph-mean hidden embedding and class probabilities for one ego graph,
/// read off the most recent eval-mode forward over the original graph.
void mean_pool(const ForwardTrace<float>& trace, const EgoGraph& ego,
               std::vector<double>& embedding, std::vector<double>& probs) {
  embedding.assign(trace.hidden.cols, 0.0);
  probs.assign(trace.probs.cols, 0.0);
  for (NodeId u : ego.nodes_global) {
    const float* h = trace.hidden.row(u);
    for (std::size_t d = 0; d < embedding.size(); ++d) embedding[d] += h[d];
    const float* p = trace.probs.row(u);
    for (std::size_t c = 0; c < probs.size(); ++c) probs[c] += p[c];
  }
  const double inv = 1.0 / static_cast<double>(ego.size());
  for (double& v : embedding) v *= inv;
  for (double& v : probs) v *= inv;
}

}  // namespace

RunResult train(const Graph& g, const TrainConfig& cfg, unsigned jobs) {
  validate_config(cfg);
  validate_graph(g);

  const std::vector<NodeId> labeled = g.nodes_with_role(kRoleTrain);
  if (labeled.empty()) throw DataError("train: graph has no train-masked nodes");

  const bool mixup_active = cfg.mu > 0.0 && cfg.epsilon > 0.0;
  if (mixup_active && labeled.size() < 2)
    throw DataError("train: mixup needs at least 2 labeled nodes");

  const NormalizedAdjacency adj = normalize(g);
  const DenseMatrix<float> x = feature_matrix(g);

  auto init_rng = RngStream::derive(cfg.seed, "init");
  auto dropout_main_rng = RngStream::derive(cfg.seed, "dropout-main");
  auto dropout_mix_rng = RngStream::derive(cfg.seed, "dropout-mix");
  auto pair_rng = RngStream::derive(cfg.seed, "pair-sampling");
  auto beta_rng = RngStream::derive(cfg.seed, "beta-sampling");

  GcnModel<float> model =
      init_model<float>(g.num_features, cfg.hidden, g.num_classes, cfg.dropout, init_rng);
  AdamState<float> adam = make_adam_state(model, cfg.lr, cfg.weight_decay);
  const LambdaPolicy policy = make_policy(cfg);

  // Ego graphs are extracted once, before the epoch loop.
  std::vector<EgoGraph> egos;
  std::vector<std::size_t> ego_index(mixup_active ? g.num_nodes : 0);
  if (mixup_active) {
    egos = extract_all(g, labeled, cfg.radius, jobs);
    for (std::size_t k = 0; k < labeled.size(); ++k) ego_index[labeled[k]] = k;
  }

  RunResult result;
  result.best_val_acc = -1.0;
  result.model = model;

  // Lambda context comes from the latest eval-mode forward, i.e. the weights
  // of the previous update (for epoch 1, the freshly initialized ones).
  ForwardTrace<float> eval_trace = forward(model, adj, x, /*train_mode=*/false, nullptr);

  for (std::uint32_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::optional<double> mean_lambda;

    VirtualGraphBatch batch;
    NormalizedAdjacency batch_adj;
    DenseMatrix<float> batch_x;
    bool have_batch = false;

    if (mixup_active) {
      std::vector<MixupPair> pairs = sample_pairs(labeled, g.labels, cfg.epsilon, pair_rng);
      if (!pairs.empty()) {
        double lambda_sum = 0.0;
        std::vector<MixedSubgraph> mixed;
        mixed.reserve(pairs.size());
        PairContext ctx;
        for (MixupPair& p : pairs) {
          const EgoGraph& ego_i = egos[ego_index[p.i]];
          const EgoGraph& ego_j = egos[ego_index[p.j]];
          ctx.num_classes = g.num_classes;
          mean_pool(eval_trace, ego_i, ctx.mean_embedding_i, ctx.mean_probs_i);
          mean_pool(eval_trace, ego_j, ctx.mean_embedding_j, ctx.mean_probs_j);
          p.lambda = draw_lambda(policy, &ctx, &beta_rng).value;
          lambda_sum += p.lambda;
          result.lambda_min = std::min(result.lambda_min, p.lambda);
          result.lambda_max = std::max(result.lambda_max, p.lambda);
          mixed.push_back(build_mixed_subgraph(ego_i, ego_j, g, p));
        }
        mean_lambda = lambda_sum / static_cast<double>(pairs.size());
        batch = assemble_batch(mixed, g);
        batch_adj = normalize_csr(batch.adjacency);
        batch_x = batch_feature_matrix(batch);
        have_batch = true;
      }
    }

    const ForwardTrace<float> train_trace =
        forward(model, adj, x, /*train_mode=*/true, &dropout_main_rng);

    Gradients<float> grads;
    if (have_batch) {
      const ForwardTrace<float> mix_trace =
          forward(model, batch_adj, batch_x, /*train_mode=*/true, &dropout_mix_rng);
      MixupBranch<float> branch{&batch_adj, &batch_x, &mix_trace, &batch};
      grads = backward(model, adj, x, train_trace, g.labels, g.masks, &branch, cfg.mu);
    } else {
      grads = backward<float>(model, adj, x, train_trace, g.labels, g.masks, nullptr, 0.0);
    }
    adam_step(adam, model, grads);

    eval_trace = forward(model, adj, x, /*train_mode=*/false, nullptr);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.metrics = metrics_from_trace(eval_trace, g);
    rec.mean_lambda = mean_lambda;
    result.trace.push_back(rec);
    result.epochs_ran = epoch;
    result.final_metrics = rec.metrics;

    // Early stopping on validation accuracy; ties keep the earlier checkpoint.
    const double val_acc = rec.metrics.val.accuracy.value_or(
        rec.metrics.train.accuracy.value_or(0.0));
    if (val_acc > result.best_val_acc) {
      result.best_val_acc = val_acc;
      result.best_epoch = epoch;
      result.best_metrics = rec.metrics;
      result.test_acc_at_best_val = rec.metrics.test.accuracy.value_or(0.0);
      result.model = model;
    }
    if (epoch - result.best_epoch >= cfg.patience) break;
  }
  return result;
}

}  // namespace sgmix
