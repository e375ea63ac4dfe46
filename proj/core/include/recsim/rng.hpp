#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace recsim {

/// Finalizer of SplitMix64; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over bytes. Stable across platforms, used to key streams by id.
constexpr std::uint64_t hash_bytes(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent stream seed from a root seed, a purpose label and
/// any number of numeric keys (agent hash, day, post hash...). Streams for one
/// agent never depend on how many other agents exist.
inline std::uint64_t stream_seed(std::uint64_t root, std::string_view purpose,
                                 std::initializer_list<std::uint64_t> keys = {}) noexcept {
  std::uint64_t h = mix64(root ^ 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ hash_bytes(purpose));
  for (std::uint64_t k : keys) h = mix64(h + 0x9e3779b97f4a7c15ULL + k);
  return h;
}

/// SplitMix64 generator. Small state, bit-exact on every platform, and fast to
/// construct, which matters because the engine opens one stream per agent-day.
/// Distributions are implemented here rather than with <random> adaptors,
/// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + uniform() * (hi - lo); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = -n % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next();
      if (x >= limit) return x % n;
    }
  }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) noexcept {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace recsim
