#pragma once

#include <cstdint>
#include <random>

namespace trajopt {

// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t value);

// child_seed = mix(mix(master) ^ index). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Thin wrapper over mt19937_64. The engine's output sequence is fixed by the
// standard, and uniform draws are built from its top 53 bits rather than
// std::uniform_real_distribution (whose algorithm is implementation defined),
// so a given seed yields the same doubles on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in the open interval (0, 1).
  double uniform_open() {
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trajopt
