#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sgmix/rng.hpp"

namespace sgmix {

/// Similarity-seeded, uncertainty-adjusted mixing ratio.
/// gamma scales sensitivity to embedding distance; beta scales the
/// uncertainty-difference correction.
struct AdaptivePolicy {
  double gamma = 1.0;
  double beta = 1.0;
};

/// lambda ~ Beta(alpha, alpha), the classical mixup draw.
struct RandomBetaPolicy {
  double alpha = 1.0;
};

/// Constant lambda for every pair.
struct FixedPolicy {
  double value = 0.5;
};

using LambdaPolicy = std::variant<AdaptivePolicy, RandomBetaPolicy, FixedPolicy>;

/// Throws UsageError if the variant's parameters are out of range.
void validate_policy(const LambdaPolicy& policy);

/// Everything the adaptive policy needs to know about one candidate pair:
/// subgraph-mean hidden embeddings and subgraph-mean class probabilities.
struct PairContext {
  std::vector<double> mean_embedding_i;
  std::vector<double> mean_embedding_j;
  std::vector<double> mean_probs_i;
  std::vector<double> mean_probs_j;
  std::uint32_t num_classes = 0;
};

/// lambda0 = 0.5 * exp(-gamma * ||h_i - h_j||^2). Symmetric in (i, j),
/// strictly positive, at most 0.5.
double init_lambda(const PairContext& ctx, double gamma);

/// Natural-log Shannon entropy; 0 * log 0 counts as 0.
/// Throws DataError on a negative entry.
double entropy(std::span<const double> probs);

struct LambdaDraw {
  double value = 0.0;     // clipped to [0, 1]
  double pre_clip = 0.0;  // exposed so antisymmetry is testable
};

/// lambda = Clip(lambda0 + beta * (u_i - u_j) / ln C, 0, 1), with u_* the
/// entropies of the mean probability vectors. Requires C >= 2.
LambdaDraw adjust_lambda(double lambda0, const PairContext& ctx, double beta);

/// Dispatches on the policy variant. Adaptive requires ctx; RandomBeta
/// requires rng; Fixed needs neither.
LambdaDraw draw_lambda(const LambdaPolicy& policy, const PairContext* ctx, RngStream* rng);

}  // namespace sgmix
