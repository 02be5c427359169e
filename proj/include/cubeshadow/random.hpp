#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cubeshadow {

/// Mixes a 64-bit value with the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent child seed for stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seedable generator used by every sampling routine.
///
/// The engine is std::mt19937_64 (fully specified by the standard), seeded
/// through splitmix64 of (seed, stream). Doubles and Gaussians are produced
/// here rather than via <random> distributions, whose output is
/// implementation defined, so streams are reproducible across toolchains.
class Rng {
 public:
  static constexpr std::string_view kGeneratorId = "mt19937_64/splitmix64-stream/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cubeshadow
