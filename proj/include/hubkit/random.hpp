#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hubkit {

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

/// Seeded generator whose output is identical on every conforming platform.
///
/// The integer stream is std::mt19937_64 (fully specified by the C++
/// standard). The derived draws do not go through <random> distributions,
/// whose algorithms are implementation-defined:
///   uniform()        = (x >> 11) * 2^-53                      in [0, 1)
///   below(n)         = rejection sampling of x against the largest multiple of n
///   gaussian()       = Box-Muller on u1 = 1 - uniform(), u2 = uniform();
///                      returns sqrt(-2 ln u1) cos(2 pi u2), then the cached
///                      sine partner on the next call
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  std::uint64_t below(std::uint64_t n);
  double gaussian();

  /// First `k` entries of a Fisher-Yates shuffle of 0..n-1.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hubkit
