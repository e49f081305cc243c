#include "hashchem/fitness.hpp"

namespace hashchem {

std::vector<std::byte> encode_canonical(const Multiset& ms) {
  std::vector<std::byte> out;
  out.reserve(ms.size() * 4);
  for (EntityType e : ms.elements()) {
    out.push_back(static_cast<std::byte>(e & 0xFFu));
    out.push_back(static_cast<std::byte>((e >> 8) & 0xFFu));
    out.push_back(static_cast<std::byte>((e >> 16) & 0xFFu));
    out.push_back(static_cast<std::byte>((e >> 24) & 0xFFu));
  }
  return out;
}

}  // namespace hashchem
