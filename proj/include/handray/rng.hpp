#pragma once

#include <cstdint>
#include <limits>

namespace handray {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derives an independent stream key from a seed and up to three counters.
/// Used for per-ray streams so results do not depend on scheduling.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  std::uint64_t h = detail::mix64(seed + detail::kGolden);
  h = detail::mix64(h ^ (a + detail::kGolden));
  h = detail::mix64(h ^ (b + 2 * detail::kGolden));
  h = detail::mix64(h ^ (c + 3 * detail::kGolden));
  return h;
}

/// Counter-based generator (SplitMix64): output i is mix64(key + (i + 1) * golden).
/// Satisfies UniformRandomBitGenerator. Streams are cheap to create, so one is
/// instantiated per ray.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits. Bit-identical on every platform,
  /// unlike std::uniform_real_distribution.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace handray
