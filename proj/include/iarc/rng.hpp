#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace iarc {

/// Stable sub-seed for a named component: the first 8 bytes of
/// SHA-256("<master>/<component>"). Independent of call order.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component);

/// Seeded generator whose variates depend only on the mt19937_64 stream, so
/// outputs are identical across standard library implementations
/// (std::*_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace iarc
