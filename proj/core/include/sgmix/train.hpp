#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sgmix/gcn.hpp"
#include "sgmix/graph.hpp"
#include "sgmix/lambda_policy.hpp"
#include "sgmix/mixup.hpp"

namespace sgmix {

enum class PolicyKind { Adaptive, RandomBeta, Fixed };

std::string_view policy_name(PolicyKind kind);

struct TrainConfig {
  std::uint32_t radius = 2;
  PolicyKind policy = PolicyKind::Adaptive;
  double gamma = 1.0;         // adaptive
  double beta = 1.0;          // adaptive
  double alpha = 1.0;         // random-beta
  double lambda_fixed = 0.5;  // fixed
  double mu = 1.0;            // mixup loss weight; 0 disables the branch
  double epsilon = 1.0;       // pair shrink ratio; 0 disables the branch
  std::uint32_t hidden = 128;
  double dropout = 0.5;
  double lr = 0.01;
  double weight_decay = 5e-4;
  std::uint32_t max_epochs = 500;
  std::uint32_t patience = 50;
  std::uint64_t seed = 0;
};

void validate_config(const TrainConfig& cfg);
LambdaPolicy make_policy(const TrainConfig& cfg);

struct RoleMetrics {
  std::optional<double> accuracy;
  std::optional<double> loss;
};

struct EvalMetrics {
  RoleMetrics train, val, test;
  std::optional<double> confidence;  // mean max-probability over test nodes

  /// test loss - train loss, when both roles are populated.
  std::optional<double> generalization_gap() const;
};

struct EpochRecord {
  std::uint32_t epoch = 0;
  EvalMetrics metrics;
  std::optional<double> mean_lambda;
};

struct RunResult {
  double best_val_acc = 0.0;
  double test_acc_at_best_val = 0.0;
  std::uint32_t best_epoch = 0;
  std::uint32_t epochs_ran = 0;
  EvalMetrics final_metrics;  // last epoch ran
  EvalMetrics best_metrics;   // at the best-validation checkpoint
  std::vector<EpochRecord> trace;
  double lambda_min = 1.0;  // over every pair of every epoch
  double lambda_max = 0.0;
  GcnModel<float> model;  // best-validation weights
};

/// Full training loop: per epoch sample pairs, compute per-pair lambda from
/// the previous eval-mode forward, build and batch the mixed subgraphs, run
/// both forward passes, backprop through the combined loss, apply Adam, then
/// evaluate and early-stop on validation accuracy. Deterministic given
/// (graph, config). jobs parallelizes only the offline ego extraction.
RunResult train(const Graph& g, const TrainConfig& cfg, unsigned jobs = 1);

EvalMetrics evaluate(const GcnModel<float>& model, const Graph& g);

/// For each lambda in the grid, rebuilds the mixed subgraphs of `pairs` at
/// that fixed lambda and reports the fraction of virtual nodes whose argmax
/// matches neither source label.
std::vector<double> miss_rate_experiment(const GcnModel<float>& model, const Graph& g,
                                         std::span<const MixupPair> pairs,
                                         std::span<const double> lambda_grid,
                                         std::uint32_t radius);

/// Draws `count` random pairs of labeled nodes with distinct labels.
std::vector<MixupPair> sample_distinct_label_pairs(const Graph& g, std::size_t count,
                                                   RngStream& rng);

struct TTestResult {
  double t = 0.0;
  unsigned df = 0;
  bool degenerate = false;  // zero sample deviation of the differences
};

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct SweepRow {
  double value = 0.0;
  std::size_t num_seeds = 0;
  double test_acc_mean = 0.0;
  double test_acc_std = 0.0;
  double val_acc_mean = 0.0;
  double confidence_mean = 0.0;
  double gap_mean = 0.0;
  double epochs_mean = 0.0;
};

/// Trains the cross product of values x seeds (dimension is one of
/// "r", "gamma", "beta", "mu", "epsilon") and aggregates per value.
/// Cells may run in parallel; aggregation order is fixed by sorting seeds.
std::vector<SweepRow> sweep(const Graph& g, const TrainConfig& base,
                            std::string_view dimension, std::span<const double> values,
                            std::span<const std::uint64_t> seeds, unsigned jobs = 1);

}  // namespace sgmix
