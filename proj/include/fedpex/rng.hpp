#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fedpex {

/// Deterministic generator. Independent streams are derived from one seed so
/// that, e.g., activation draws never perturb reward noise.
class Rng {
 public:
  enum class Stream : std::uint64_t { kRewards = 1, kActivation = 2, kInstance = 3 };

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fedpex
