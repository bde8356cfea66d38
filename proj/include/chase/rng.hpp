#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

// Self-contained deterministic RNG. The standard <random> distributions are
// implementation-defined, which would break bit-exact trace reproduction
// across toolchains, so the few primitives needed here are spelled out.

namespace chase {

// splitmix64 finalizer; also used as a stateless hash for keyed draws.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Combine a seed with a stream/key id into a fresh 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  return mix64(seed ^ mix64(key));
}

inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
}

// xoshiro256** with splitmix64 seeding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform01() { return u01_from_bits(next()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound) via rejection.
  int uniform_int(int bound) {
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<int>(x % b);
  }

  // Box-Muller, no pair caching: each call consumes two words.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log() finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi() * u2);
  }

 private:
  static constexpr double two_pi() { return 6.283185307179586476925286766559; }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// `count` distinct integers from [0, n), uniform, in draw order
// (partial Fisher-Yates).
inline std::vector<int> sample_distinct(Rng& rng, int n, int count) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int j = i + rng.uniform_int(n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

// Stateless standard-normal draw identified by (seed, key). Used where a
// value must not depend on evaluation order (parallel fills, append-only
// noise realizations).
inline std::pair<double, double> gaussian_pair_at(std::uint64_t seed,
                                                  std::uint64_t key) {
  const std::uint64_t h1 = mix64(seed ^ mix64(key));
  const std::uint64_t h2 = mix64(h1 ^ 0xda942042e4dd58b5ULL);
  const double u1 = 1.0 - u01_from_bits(h1);
  const double u2 = u01_from_bits(h2);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline double gaussian_at(std::uint64_t seed, std::uint64_t key) {
  return gaussian_pair_at(seed, key).first;
}

}  // namespace chase
