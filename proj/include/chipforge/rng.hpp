#pragma once

#include <cstdint>

namespace chipforge {

// Deterministic 64-bit generator (splitmix64). The standard <random>
// distributions are implementation-defined, so everything that must be
// reproducible across platforms draws from this instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, n); n > 0. Lemire multiply-shift, bias < 2^-64.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

// Stateless stream derivation, e.g. (seed, epoch, image_id) -> sampler seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  Rng r(a);
  std::uint64_t h = r.next_u64();
  h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng r2(h);
  h = r2.next_u64();
  h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng r3(h);
  return r3.next_u64();
}

}  // namespace chipforge
