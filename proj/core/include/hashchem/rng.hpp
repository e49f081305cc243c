#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <limits>

namespace hashchem {

/// Deterministic random stream shared by every stochastic operation.
///
/// Generator: xoshiro256** (Blackman & Vigna), state filled by four successive
/// SplitMix64 outputs. The SplitMix64 starting value for (seed, run_index) is
///
///     x0 = mix64(seed ^ 0x9E3779B97F4A7C15) ^ mix64(run_index + 0xD1B54A32D192ED03)
///
/// where mix64 is the SplitMix64 finalizer
/// (z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31).
///
/// Derived draws, all defined on the raw 64-bit output w:
///   uniform01()  = (w >> 11) * 2^-53                      in [0, 1)
///   below(n)     = Lemire multiply-shift with rejection   in [0, n)
///   bernoulli(p) = uniform01() < p
///   normal()     = Box-Muller on two uniforms, spare value cached
///
/// Integer draws are bit-identical on every platform; normal() goes through
/// libm log/cos/sin and is only as portable as those.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t run_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
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

  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    __uint128_t product = static_cast<__uint128_t>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        product = static_cast<__uint128_t>((*this)()) * n;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Standard normal draw.
  double normal() noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Any source of the draws the simulation engines consume. RngStream is the
/// production model; tests substitute scripted sources to pin individual draws.
template <class R>
concept RandomStream = requires(R& r, std::uint64_t n, double p) {
  { r.uniform01() } -> std::convertible_to<double>;
  { r.below(n) } -> std::convertible_to<std::uint64_t>;
  { r.bernoulli(p) } -> std::convertible_to<bool>;
  { r.normal() } -> std::convertible_to<double>;
};

static_assert(RandomStream<RngStream>);

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace hashchem
