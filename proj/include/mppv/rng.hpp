#pragma once
// Counter-based splittable random streams. A stream is a pure function of
// (key, counter), so any draw can be replayed from its coordinates alone:
// draws never depend on thread scheduling or on what other streams consumed.
// Streams are derived by hashing (master seed, path index, purpose), which is
// what makes path generation independent of the worker-thread count.

#include <cstdint>
#include <cmath>
#include <string>

#include "mppv/errors.hpp"
#include "mppv/special.hpp"

namespace mppv {

namespace detail {

// SplitMix64 finalizer: the standard 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// One chaining step: absorb a word into the key.
inline std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
  return mix64((key + kGolden) ^ (word * 0xD1B54A32D192ED03ull));
}

}  // namespace detail

// Well-known purpose indices for per-path substreams.
enum class StreamPurpose : std::uint64_t {
  kMixingDraw = 1,
  kArrivals = 2,
  kBattery = 3,
  kPushforward = 4,
};

class SplitStream {
 public:
  explicit SplitStream(std::uint64_t key) : key_(key) {}

  SplitStream(std::uint64_t master_seed, std::uint64_t path_index, StreamPurpose purpose)
      : key_(detail::absorb(detail::absorb(detail::mix64(master_seed ^ detail::kGolden),
                                           path_index),
                            static_cast<std::uint64_t>(purpose))) {}

  // Child stream with an independent key; the parent is unaffected.
  SplitStream split(std::uint64_t child_index) const {
    return SplitStream(detail::absorb(key_, child_index ^ 0xA5A5A5A5A5A5A5A5ull));
  }

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(key_ + detail::kGolden * counter_);
  }

  // Uniform on the open interval (0,1): never 0, never 1, safe under log().
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // Inversion with the complement convention: -log(U)/rate, U in (0,1).
  double exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: requires rate > 0");
    return -std::log(uniform01()) / rate;
  }

  // Standard normal by quantile inversion; exactly one draw consumed.
  double normal01() { return normal_quantile(uniform01()); }

  // Gamma(shape, rate) by Marsaglia-Tsang squeeze; shape < 1 boosted via the
  // power-of-uniform identity.
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      throw DomainError("gamma: requires shape > 0 and rate > 0");
    }
    if (shape < 1.0) {
      const double boost = std::pow(uniform01(), 1.0 / shape);
      return gamma(shape + 1.0, rate) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal01();
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = uniform01();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mppv
