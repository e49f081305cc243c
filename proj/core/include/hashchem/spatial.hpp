#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hashchem/config.hpp"
#include "hashchem/core.hpp"
#include "hashchem/events.hpp"
#include "hashchem/fitness.hpp"
#include "hashchem/rng.hpp"

namespace hashchem {

/// An individual entity in the unit square (cut-off boundaries).
struct Particle {
  EntityType type = 1;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Inclusive neighborhood test shared by the grid and every brute-force check.
inline bool within_radius(const Particle& a, const Particle& b, double radius) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radius * radius;
}

/// Uniform bucket grid over [0, 1]^2 with cell side equal to the query radius,
/// so a query touches at most the 3x3 block of cells around the point.
class NeighborGrid {
 public:
  explicit NeighborGrid(double radius);

  void clear();
  void build(std::span<const Particle> particles);
  void insert(std::uint32_t id, const Particle& p);
  void erase(std::uint32_t id, const Particle& p);

  /// Ids of all indexed particles within `radius` of `p`, in unspecified order.
  void query(std::span<const Particle> particles, const Particle& p,
             std::vector<std::uint32_t>& out) const;

  double radius() const noexcept { return radius_; }

 private:
  int cell_of(double coord) const noexcept;
  std::vector<std::uint32_t>& bucket(int cx, int cy) { return buckets_[cy * cells_ + cx]; }
  const std::vector<std::uint32_t>& bucket(int cx, int cy) const { return buckets_[cy * cells_ + cx]; }

  double radius_;
  int cells_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

/// Indices (ascending) of every particle within `radius` of `p`, `p` itself
/// included when it belongs to `particles`.
std::vector<std::size_t> neighbors(const Particle& p, std::span<const Particle> particles, double radius);

/// f (1 - |N| / d_max), floored at zero.
inline double replication_probability(FitnessValue f, std::size_t neighborhood, std::uint64_t d_max) noexcept {
  const double p = f.value() * (1.0 - static_cast<double>(neighborhood) / static_cast<double>(d_max));
  return std::max(p, 0.0);
}

enum class GroupFate { not_evaluated, died, replicated, survived };

struct GroupDecision {
  GroupFate fate = GroupFate::not_evaluated;
  FitnessValue fitness;
  double replication_probability = 0.0;
};

/// Fate of a sampled group s (types sorted) drawn from a neighborhood of size
/// |N|. The group is evaluated with probability 1/|s|; one uniform u then
/// selects death (u < 1 - f), replication (next f (1 - |N|/d_max) of mass) or
/// survival, so both events keep their unconditional probabilities.
template <RandomStream R>
GroupDecision decide_group(std::span<const EntityType> sorted_types, std::size_t neighborhood,
                           const SpatialConfig& cfg, R& rng) {
  GroupDecision d;
  if (!rng.bernoulli(1.0 / static_cast<double>(sorted_types.size()))) return d;
  d.fitness = fitness_of_sorted(sorted_types, cfg.m_spatial);
  d.replication_probability = replication_probability(d.fitness, neighborhood, cfg.d_max);
  const double death = 1.0 - d.fitness.value();
  const double u = rng.uniform01();
  if (u < death) {
    d.fate = GroupFate::died;
  } else if (u < death + d.replication_probability) {
    d.fate = GroupFate::replicated;
  } else {
    d.fate = GroupFate::survived;
  }
  return d;
}

inline double clamp_unit(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

/// Gaussian jitter of both coordinates (sd move_sigma), clamped to [0, 1].
template <RandomStream R>
void move_particles(std::vector<Particle>& particles, const SpatialConfig& cfg, R& rng) {
  if (cfg.move_sigma == 0.0) return;
  for (Particle& p : particles) {
    p.x = clamp_unit(p.x + cfg.move_sigma * rng.normal());
    p.y = clamp_unit(p.y + cfg.move_sigma * rng.normal());
  }
}

/// One iteration of the spatial model: move, per-focal group sampling with
/// death/replication, point mutation, then a random reordering. Focal particles
/// are those present at the start of the step; groups see the live state, so
/// earlier deaths and births in the same step are visible to later focals.
template <RandomStream R>
StepSummary spatial_iteration(std::vector<Particle>& particles, std::int64_t t, const SpatialConfig& cfg,
                              R& rng, EventSink* sink = nullptr) {
  StepSummary s;
  s.t = t;
  move_particles(particles, cfg, rng);

  const std::size_t focal_count = particles.size();
  std::vector<char> alive(focal_count, 1);
  NeighborGrid grid(cfg.neighbor_radius);
  grid.build(particles);

  std::vector<std::uint32_t> hood;
  std::vector<EntityType> types;
  for (std::size_t focal = 0; focal < focal_count; ++focal) {
    if (!alive[focal]) continue;
    const Particle center = particles[focal];
    grid.query(particles, center, hood);
    // Deterministic order before sampling; grid bucket order depends on history.
    std::sort(hood.begin(), hood.end());

    const std::size_t n = hood.size();
    const auto k = static_cast<std::size_t>(rng.below(n) + 1);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(hood[i], hood[j]);
    }
    const std::span<const std::uint32_t> group(hood.data(), k);

    types.clear();
    for (std::uint32_t id : group) types.push_back(particles[id].type);
    std::sort(types.begin(), types.end());

    const GroupDecision d = decide_group(types, n, cfg, rng);
    if (d.fate == GroupFate::not_evaluated) continue;
    ++s.matches;
    if (d.fate == GroupFate::died) {
      ++s.deaths;
      for (std::uint32_t id : group) {
        grid.erase(id, particles[id]);
        alive[id] = 0;
      }
    } else if (d.fate == GroupFate::replicated) {
      ++s.births;
      for (std::uint32_t id : group) {
        Particle child = particles[id];
        child.x = clamp_unit(child.x + cfg.move_sigma * rng.normal());
        child.y = clamp_unit(child.y + cfg.move_sigma * rng.normal());
        const auto child_id = static_cast<std::uint32_t>(particles.size());
        particles.push_back(child);
        alive.push_back(1);
        grid.insert(child_id, child);
      }
      if (sink) sink->on_replication(t, make_multiset_unchecked(types), d.fitness);
    }
  }

  std::size_t kept = 0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (alive[i]) particles[kept++] = particles[i];
  }
  particles.resize(kept);

  for (Particle& p : particles) {
    if (rng.bernoulli(cfg.point_mutation_prob)) {
      p.type = static_cast<EntityType>(rng.below(cfg.s_max) + 1);
      ++s.mutated_multisets;
    }
  }
  for (std::size_t i = particles.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(particles[i - 1], particles[j]);
  }

  s.population_size = particles.size();
  s.extinct = particles.empty();
  return s;
}

/// `init_count` particles of uniform type at uniform positions.
template <RandomStream R>
std::vector<Particle> init_particles(const SpatialConfig& cfg, R& rng) {
  std::vector<Particle> particles;
  particles.reserve(static_cast<std::size_t>(cfg.init_count));
  for (std::uint64_t i = 0; i < cfg.init_count; ++i) {
    Particle p;
    p.type = static_cast<EntityType>(rng.below(cfg.s_max) + 1);
    p.x = rng.uniform01();
    p.y = rng.uniform01();
    particles.push_back(p);
  }
  return particles;
}

/// Full spatial run on RngStream(cfg.seed, run_index). Stops after the first
/// step that leaves no particles; that summary carries extinct = true.
std::vector<StepSummary> run_spatial(const SpatialConfig& cfg, std::uint64_t run_index,
                                     EventSink* sink = nullptr);

}  // namespace hashchem
