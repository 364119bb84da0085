#pragma once

#include <cstdint>
#include <random>

namespace spectral_games {

/// Independent draw streams. Each consumer owns a stream, so adding a new
/// consumer never shifts the draws of existing ones.
enum class Stream : std::uint64_t {
  Matrix = 1,
  XStar = 2,
  YStar = 3,
  Omega0 = 4,
  Auxiliary = 5,
};

/// Portable seeded generator: mt19937_64 keyed by SplitMix64(seed, stream),
/// with uniform and normal variates computed here rather than through the
/// implementation-defined std distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Box-Muller transform.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace spectral_games
