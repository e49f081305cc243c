#include "hashchem/rng.hpp"

#include <cmath>
#include <numbers>

namespace hashchem {

RngStream::RngStream(std::uint64_t seed, std::uint64_t run_index) {
  std::uint64_t x = mix64(seed ^ 0x9E3779B97F4A7C15ULL) ^ mix64(run_index + 0xD1B54A32D192ED03ULL);
  for (auto& word : state_) {
    x += 0x9E3779B97F4A7C15ULL;
    word = mix64(x);
  }
}

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace hashchem
