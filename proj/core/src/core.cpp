#include "hashchem/core.hpp"

#include <algorithm>

#include "hashchem/fitness.hpp"

namespace hashchem {

void Multiset::duplicate() {
  std::vector<EntityType> doubled;
  doubled.reserve(elements_.size() * 2);
  for (EntityType e : elements_) {
    doubled.push_back(e);
    doubled.push_back(e);
  }
  elements_ = std::move(doubled);
}

Multiset canonicalize(std::vector<EntityType> elements, EntityType s_max) {
  if (elements.empty()) {
    throw ValidationError("multiset must contain at least one element");
  }
  for (EntityType e : elements) {
    if (e < 1 || e > s_max) {
      throw ValidationError("entity type " + std::to_string(e) + " outside [1, " +
                            std::to_string(s_max) + "]");
    }
  }
  std::sort(elements.begin(), elements.end());
  return Multiset(std::move(elements));
}

Multiset make_multiset_unchecked(std::vector<EntityType> sorted) {
  return Multiset(std::move(sorted));
}

std::string to_string(const Multiset& ms) {
  std::string out = "[";
  bool first = true;
  for (EntityType e : ms.elements()) {
    if (!first) out += ',';
    out += std::to_string(e);
    first = false;
  }
  out += ']';
  return out;
}

std::size_t MultisetHash::operator()(const Multiset& ms) const noexcept {
  return static_cast<std::size_t>(hash_elements(ms.elements()));
}

}  // namespace hashchem
