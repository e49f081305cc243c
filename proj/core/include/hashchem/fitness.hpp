#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hashchem/core.hpp"

namespace hashchem {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// Fitness modulus of the non-spatial model.
inline constexpr std::uint64_t kNonspatialModulus = 100'000'000;
/// Fitness modulus of the spatial baseline.
inline constexpr std::uint64_t kSpatialModulus = 100'000;

/// A fitness f = numerator / modulus in [0, 1). Kept as an exact rational so
/// comparisons and serialization never see rounding.
class FitnessValue {
 public:
  constexpr FitnessValue() = default;
  constexpr FitnessValue(std::uint64_t numerator, std::uint64_t modulus)
      : numerator_(numerator), modulus_(modulus) {}

  constexpr std::uint64_t numerator() const noexcept { return numerator_; }
  constexpr std::uint64_t modulus() const noexcept { return modulus_; }
  constexpr double value() const noexcept {
    return static_cast<double>(numerator_) / static_cast<double>(modulus_);
  }

  friend constexpr std::strong_ordering operator<=>(FitnessValue a, FitnessValue b) noexcept {
    if (a.modulus_ == b.modulus_) return a.numerator_ <=> b.numerator_;
    const auto lhs = static_cast<__uint128_t>(a.numerator_) * b.modulus_;
    const auto rhs = static_cast<__uint128_t>(b.numerator_) * a.modulus_;
    return lhs <=> rhs;
  }
  friend constexpr bool operator==(FitnessValue a, FitnessValue b) noexcept {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  std::uint64_t numerator_ = 0;
  std::uint64_t modulus_ = 1;
};

/// Each element as a 4-byte little-endian unsigned integer, in multiset order.
std::vector<std::byte> encode_canonical(const Multiset& ms);

/// FNV-1a, 64-bit.
constexpr std::uint64_t hash64(std::span<const std::byte> data) noexcept {
  std::uint64_t state = kFnvOffsetBasis;
  for (std::byte b : data) {
    state ^= static_cast<std::uint64_t>(b);
    state *= kFnvPrime;
  }
  return state;
}

/// hash64(encode_canonical(ms)) without materializing the byte buffer.
constexpr std::uint64_t hash_elements(std::span<const EntityType> elements) noexcept {
  std::uint64_t state = kFnvOffsetBasis;
  for (EntityType e : elements) {
    for (int shift = 0; shift < 32; shift += 8) {
      state ^= (e >> shift) & 0xFFu;
      state *= kFnvPrime;
    }
  }
  return state;
}

/// f = (hash64(encode_canonical(ms)) mod m) / m. Requires m >= 2.
inline FitnessValue fitness(const Multiset& ms, std::uint64_t m) noexcept {
  return FitnessValue(hash_elements(ms.elements()) % m, m);
}

/// Same mapping for an arbitrary sorted type list (used by the spatial model,
/// whose groups are transient and never wrapped in a Multiset).
inline FitnessValue fitness_of_sorted(std::span<const EntityType> sorted, std::uint64_t m) noexcept {
  return FitnessValue(hash_elements(sorted) % m, m);
}

}  // namespace hashchem
