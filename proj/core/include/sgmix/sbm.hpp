#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgmix/graph.hpp"

namespace sgmix {

/// Stochastic block model with Gaussian features around per-block means.
/// Labels are block indices; the class count equals the block count.
struct SbmSpec {
  std::vector<std::uint32_t> block_sizes;
  double p_in = 0.1;
  double p_out = 0.01;
  std::uint32_t feature_dim = 16;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;
  std::string name = "sbm";
};

/// Samples a graph edge-by-edge, then assigns masks: up to 20 train nodes per
/// class, then min(500, remaining/2) validation nodes round-robin over
/// classes, remainder test. Deterministic given the seed.
Graph generate_sbm(const SbmSpec& spec);

}  // namespace sgmix
