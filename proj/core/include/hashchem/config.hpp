#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hashchem/core.hpp"

namespace hashchem {

/// Parameters of the non-spatial model. Config-file keys match the field names,
/// except `s_max`, which is spelled `S_max`.
struct SimConfig {
  EntityType s_max = kDefaultSMax;
  std::uint64_t n_max = 10'000;
  std::uint64_t iterations = 2'000;
  std::uint64_t m = 100'000'000;
  std::uint64_t init_count = 10;
  double mutation_rate = 0.01;
  double point_change_prob = 0.20;
  double swap_fraction = 0.80;
  double duplication_prob = 0.20;
  bool mutate_on_replicate = false;
  std::uint64_t seed = 0;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// The spatial baseline reuses S_max, iterations, init_count and seed from the
/// base; the remaining base fields are ignored by it.
struct SpatialConfig : SimConfig {
  std::uint64_t d_max = 100;
  double neighbor_radius = 0.05;
  double move_sigma = 0.01;
  double point_mutation_prob = 0.001;
  std::uint64_t m_spatial = 100'000;

  friend bool operator==(const SpatialConfig&, const SpatialConfig&) = default;
};

/// Names the first field that violates its bound.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Returns `cfg` unchanged or throws ConfigError for the first violated field.
SimConfig validate_config(const SimConfig& cfg);
SpatialConfig validate_config(const SpatialConfig& cfg);

/// Assigns one field from its textual form. Unknown keys and unparsable
/// values throw ConfigError.
void set_config_field(SpatialConfig& cfg, std::string_view key, std::string_view value);

/// Every field as (key, canonical text), in declaration order. Feeding the
/// pairs back through set_config_field reproduces `cfg` exactly.
std::vector<std::pair<std::string, std::string>> config_fields(const SpatialConfig& cfg);

/// Reads a flat `key = value` file ('#' starts a comment) into `cfg`.
void load_config_file(const std::filesystem::path& path, SpatialConfig& cfg);

}  // namespace hashchem
