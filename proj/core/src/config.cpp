#include "hashchem/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

namespace hashchem {
namespace {

void require_probability(std::string_view field, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(field), "must lie in [0, 1], got " + std::to_string(p));
  }
}

void require_at_least(std::string_view field, std::uint64_t value, std::uint64_t bound) {
  if (value < bound) {
    throw ConfigError(std::string(field), "must be >= " + std::to_string(bound) + ", got " +
                                              std::to_string(value));
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(std::string(key), "expected a non-negative integer, got '" +
                                            std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ConfigError(std::string(key), "expected a real number, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct Field {
  std::string_view key;
  std::function<void(SpatialConfig&, std::string_view)> set;
  std::function<std::string(const SpatialConfig&)> get;
};

template <class T, class Owner>
Field unsigned_field(std::string_view key, T Owner::*member) {
  return {key,
          [key, member](SpatialConfig& c, std::string_view v) {
            const auto parsed = parse_unsigned(key, v);
            if (parsed > std::numeric_limits<T>::max()) {
              throw ConfigError(std::string(key), "value out of range");
            }
            c.*member = static_cast<T>(parsed);
          },
          [member](const SpatialConfig& c) { return std::to_string(c.*member); }};
}

template <class Owner>
Field real_field(std::string_view key, double Owner::*member) {
  return {key, [key, member](SpatialConfig& c, std::string_view v) { c.*member = parse_real(key, v); },
          [member](const SpatialConfig& c) { return format_real(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      unsigned_field("S_max", &SpatialConfig::s_max),
      unsigned_field("n_max", &SpatialConfig::n_max),
      unsigned_field("iterations", &SpatialConfig::iterations),
      unsigned_field("m", &SpatialConfig::m),
      unsigned_field("init_count", &SpatialConfig::init_count),
      real_field("mutation_rate", &SpatialConfig::mutation_rate),
      real_field("point_change_prob", &SpatialConfig::point_change_prob),
      real_field("swap_fraction", &SpatialConfig::swap_fraction),
      real_field("duplication_prob", &SpatialConfig::duplication_prob),
      Field{"mutate_on_replicate",
            [](SpatialConfig& c, std::string_view v) {
              c.mutate_on_replicate = parse_bool("mutate_on_replicate", v);
            },
            [](const SpatialConfig& c) { return std::string(c.mutate_on_replicate ? "true" : "false"); }},
      unsigned_field("seed", &SpatialConfig::seed),
      unsigned_field("d_max", &SpatialConfig::d_max),
      real_field("neighbor_radius", &SpatialConfig::neighbor_radius),
      real_field("move_sigma", &SpatialConfig::move_sigma),
      real_field("point_mutation_prob", &SpatialConfig::point_mutation_prob),
      unsigned_field("m_spatial", &SpatialConfig::m_spatial),
  };
  return table;
}

}  // namespace

SimConfig validate_config(const SimConfig& cfg) {
  require_at_least("S_max", cfg.s_max, 1);
  require_at_least("n_max", cfg.n_max, 1);
  require_at_least("m", cfg.m, 2);
  require_at_least("init_count", cfg.init_count, 1);
  require_probability("mutation_rate", cfg.mutation_rate);
  require_probability("point_change_prob", cfg.point_change_prob);
  require_probability("swap_fraction", cfg.swap_fraction);
  require_probability("duplication_prob", cfg.duplication_prob);
  return cfg;
}

SpatialConfig validate_config(const SpatialConfig& cfg) {
  validate_config(static_cast<const SimConfig&>(cfg));
  require_at_least("d_max", cfg.d_max, 1);
  if (!(cfg.neighbor_radius > 0.0 && cfg.neighbor_radius < 1.0)) {
    throw ConfigError("neighbor_radius", "must lie in (0, 1), got " + format_real(cfg.neighbor_radius));
  }
  if (!(cfg.move_sigma >= 0.0) || !std::isfinite(cfg.move_sigma)) {
    throw ConfigError("move_sigma", "must be finite and >= 0");
  }
  require_probability("point_mutation_prob", cfg.point_mutation_prob);
  require_at_least("m_spatial", cfg.m_spatial, 2);
  return cfg;
}

void set_config_field(SpatialConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

std::vector<std::pair<std::string, std::string>> config_fields(const SpatialConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(fields().size());
  for (const auto& f : fields()) out.emplace_back(std::string(f.key), f.get(cfg));
  return out;
}

void load_config_file(const std::filesystem::path& path, SpatialConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config", path.string() + ":" + std::to_string(line_no) +
                                      ": expected key = value");
    }
    set_config_field(cfg, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
}

}  // namespace hashchem
