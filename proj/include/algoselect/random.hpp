#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace algoselect {

// Stream seed for a named component, derived from one root seed. Adding a new
// label never changes the streams of existing labels.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

// Thin wrapper over mt19937_64 whose derived draws do not depend on the
// standard library's distribution implementations, so sequences replay
// identically across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace algoselect
