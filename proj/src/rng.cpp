#include "dcmm/rng.hpp"

namespace dcmm {
namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t state = master;
  uint64_t h = splitmix64(state);
  for (uint64_t v : {a, b, c}) {
    state = h ^ (v + 0x9E3779B97F4A7C15ull);
    h = splitmix64(state);
  }
  return h;
}

std::size_t Rng::index(std::size_t n) {
  // rejection sampling over the largest multiple of n
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % n);
}

}  // namespace dcmm
