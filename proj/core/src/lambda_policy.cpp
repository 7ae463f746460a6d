#include "sgmix/lambda_policy.hpp"

#include <algorithm>
#include <cmath>

#include "sgmix/error.hpp"

namespace sgmix {

void validate_policy(const LambdaPolicy& policy) {
  if (const auto* a = std::get_if<AdaptivePolicy>(&policy)) {
    if (!(a->gamma >= 0.0)) throw UsageError("adaptive policy: gamma must be >= 0");
    if (!(a->beta >= 0.0)) throw UsageError("adaptive policy: beta must be >= 0");
  } else if (const auto* rb = std::get_if<RandomBetaPolicy>(&policy)) {
    if (!(rb->alpha > 0.0)) throw UsageError("random-beta policy: alpha must be > 0");
  } else if (const auto* f = std::get_if<FixedPolicy>(&policy)) {
    if (!(f->value >= 0.0 && f->value <= 1.0))
      throw UsageError("fixed policy: lambda must be in [0, 1]");
  }
}

double init_lambda(const PairContext& ctx, double gamma) {
  if (ctx.mean_embedding_i.size() != ctx.mean_embedding_j.size())
    throw DataError("init_lambda: embedding dimension mismatch");
  if (!(gamma >= 0.0)) throw UsageError("init_lambda: gamma must be >= 0");
  double sq = 0.0;
  for (std::size_t d = 0; d < ctx.mean_embedding_i.size(); ++d) {
    const double diff = ctx.mean_embedding_i[d] - ctx.mean_embedding_j[d];
    sq += diff * diff;
  }
  return 0.5 * std::exp(-gamma * sq);
}

double entropy(std::span<const double> probs) {
  double u = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw DataError("entropy: negative probability entry");
    if (p > 0.0) u -= p * std::log(p);
  }
  return u;
}

LambdaDraw adjust_lambda(double lambda0, const PairContext& ctx, double beta) {
  if (ctx.num_classes < 2) throw DataError("adjust_lambda: need at least 2 classes");
  const double u_i = entropy(ctx.mean_probs_i);
  const double u_j = entropy(ctx.mean_probs_j);
  const double u_max = std::log(static_cast<double>(ctx.num_classes));
  LambdaDraw out;
  out.pre_clip = lambda0 + beta * (u_i - u_j) / u_max;
  out.value = std::clamp(out.pre_clip, 0.0, 1.0);
  return out;
}

LambdaDraw draw_lambda(const LambdaPolicy& policy, const PairContext* ctx, RngStream* rng) {
  validate_policy(policy);
  if (const auto* a = std::get_if<AdaptivePolicy>(&policy)) {
    if (ctx == nullptr) throw UsageError("draw_lambda: adaptive policy requires a pair context");
    return adjust_lambda(init_lambda(*ctx, a->gamma), *ctx, a->beta);
  }
  if (const auto* rb = std::get_if<RandomBetaPolicy>(&policy)) {
    if (rng == nullptr) throw UsageError("draw_lambda: random-beta policy requires an rng");
    const double v = rng->beta(rb->alpha, rb->alpha);
    return {v, v};
  }
  const double v = std::get<FixedPolicy>(policy).value;
  return {v, v};
}

}  // namespace sgmix
