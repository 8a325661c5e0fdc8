#pragma once

#include <cstdint>
#include <limits>

namespace dpp {

// Counter-based SplitMix64 stream. Output k is mix(key + k * gamma), so a
// stream is fully described by (key, counter) and child streams derived with
// split() never overlap their parent's state sequence in practice.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : key_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }

  result_type next() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const noexcept { return counter_; }

  // Child seed for trial k of a run seeded with `seed`.
  static std::uint64_t split(std::uint64_t seed, std::uint64_t k) noexcept {
    return mix(seed ^ mix(k * kGamma + 0x632be59bd9b4e019ULL));
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpp
