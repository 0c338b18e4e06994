#pragma once

#include <cstdint>
#include <random>

namespace anneal {

/// Seeded random source. Streams are cheap to derive from a (seed, index)
/// pair, which is how per-particle streams stay independent of scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) { reseed(seed, 0); }
  RandomStream(std::uint64_t seed, std::uint64_t index) { reseed(seed, index); }

  void reseed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x616e6e6cU};
    engine_.seed(seq);
    normal_.reset();
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Child seed for a named sub-purpose (reference draws, initialization, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  RandomStream s(master, tag ^ 0x9e3779b97f4a7c15ULL);
  return s.bits();
}

}  // namespace anneal
