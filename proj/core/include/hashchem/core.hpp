#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hashchem {

/// Species label of an individual entity, drawn from the possibility set {1..S_max}.
/// Stored as 32 bits so larger possibility sets need no format change.
using EntityType = std::uint32_t;

inline constexpr EntityType kDefaultSMax = 1000;

/// Raised when a value violates a domain invariant (out-of-range type, empty multiset, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a run breaks an internal sanity bound.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bag of entity types kept in ascending order. Two multisets are equal iff
/// their sorted element sequences are identical.
class Multiset {
 public:
  Multiset() = default;

  std::span<const EntityType> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }

  /// Doubles the multiplicity of every element; order is preserved.
  void duplicate();

  friend bool operator==(const Multiset&, const Multiset&) = default;
  friend auto operator<=>(const Multiset&, const Multiset&) = default;

 private:
  friend Multiset canonicalize(std::vector<EntityType> elements, EntityType s_max);
  friend Multiset make_multiset_unchecked(std::vector<EntityType> sorted);

  explicit Multiset(std::vector<EntityType> sorted) : elements_(std::move(sorted)) {}

  std::vector<EntityType> elements_;
};

/// Sorts `elements` into canonical order. Throws ValidationError if the input is
/// empty or any value lies outside [1, s_max].
Multiset canonicalize(std::vector<EntityType> elements, EntityType s_max = kDefaultSMax);

/// Wraps an already sorted, non-empty, in-range sequence without re-checking it.
Multiset make_multiset_unchecked(std::vector<EntityType> sorted);

std::string to_string(const Multiset& ms);

struct MultisetHash {
  std::size_t operator()(const Multiset& ms) const noexcept;
};

}  // namespace hashchem
