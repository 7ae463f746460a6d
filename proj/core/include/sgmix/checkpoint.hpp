#pragma once

#include <cstdint>
#include <filesystem>

#include "sgmix/gcn.hpp"

namespace sgmix {

/// Single-file model checkpoint, little-endian:
///   magic "SGMIXCK1", u32 num_features, u32 hidden, u32 num_classes,
///   f32 dropout, u64 seed, f32[F*H] w0 row-major, f32[H*C] w1 row-major.
/// Round-trips are exact to the bit.
void save_checkpoint(const std::filesystem::path& path, const GcnModel<float>& model,
                     std::uint64_t seed);

GcnModel<float> load_checkpoint(const std::filesystem::path& path,
                                std::uint64_t* seed_out = nullptr);

}  // namespace sgmix
