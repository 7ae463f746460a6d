#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sgmix {

/// Deterministic random stream. The engine is std::mt19937_64 (its sequence
/// is pinned by the standard); all distributions on top of it are implemented
/// here so that draws are reproducible across compilers and platforms.
///
/// A run owns one master seed and derives one named stream per consumer
/// (weight init, dropout, pair sampling, ...). Consumers never share a
/// stream, so disabling one of them leaves every other draw sequence intact.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream seeded from (master, name); stable across runs.
  static RngStream derive(std::uint64_t master_seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform in (0, 1]; safe to pass through log().
  double uniform_open();

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal();

  /// Gamma(alpha, 1) via Marsaglia-Tsang squeeze; alpha > 0.
  double gamma(double alpha);

  /// Beta(a, b) as the normalized ratio of two gamma draws.
  double beta(double a, double b);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sgmix
