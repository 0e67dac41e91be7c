#pragma once

#include <cstdint>
#include <random>

namespace dcmm {

// Counter-based stream derivation: hashes (master, a, b, c) through SplitMix64
// so streams indexed by (n, replicate, purpose) are independent of execution
// order. All randomness in the library flows through seeds produced here or
// passed in directly.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0);

// Deterministic uniform generator. mt19937_64 has a standard-mandated output
// sequence and the double conversion avoids std::uniform_real_distribution,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased index in [0, n)
  std::size_t index(std::size_t n);

  uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dcmm
