#pragma once
#include <cstdint>

namespace gmi {

// Deterministic splitmix64 generator. Every random decision in the project
// flows through one of these so a run is reproducible from its seed alone,
// independent of platform library internals and thread count.
struct Rng {
  uint64_t state = 0;

  Rng() = default;
  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0,1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0,n), n >= 1
  int uniform_int(int n) { return int(next() % uint64_t(n)); }

  double normal();

  // Independent child stream; does not advance this generator.
  Rng split(uint64_t stream) const;
};

}  // namespace gmi
