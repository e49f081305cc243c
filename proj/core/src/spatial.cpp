#include "hashchem/spatial.hpp"

namespace hashchem {

NeighborGrid::NeighborGrid(double radius)
    : radius_(radius), cells_(std::max(1, static_cast<int>(std::ceil(1.0 / radius)))) {
  buckets_.resize(static_cast<std::size_t>(cells_) * cells_);
}

int NeighborGrid::cell_of(double coord) const noexcept {
  const int c = static_cast<int>(coord / radius_);
  return std::clamp(c, 0, cells_ - 1);
}

void NeighborGrid::clear() {
  for (auto& b : buckets_) b.clear();
}

void NeighborGrid::build(std::span<const Particle> particles) {
  clear();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    insert(static_cast<std::uint32_t>(i), particles[i]);
  }
}

void NeighborGrid::insert(std::uint32_t id, const Particle& p) {
  bucket(cell_of(p.x), cell_of(p.y)).push_back(id);
}

void NeighborGrid::erase(std::uint32_t id, const Particle& p) {
  auto& b = bucket(cell_of(p.x), cell_of(p.y));
  const auto it = std::find(b.begin(), b.end(), id);
  if (it == b.end()) return;
  *it = b.back();
  b.pop_back();
}

void NeighborGrid::query(std::span<const Particle> particles, const Particle& p,
                         std::vector<std::uint32_t>& out) const {
  out.clear();
  const int cx = cell_of(p.x);
  const int cy = cell_of(p.y);
  for (int y = std::max(0, cy - 1); y <= std::min(cells_ - 1, cy + 1); ++y) {
    for (int x = std::max(0, cx - 1); x <= std::min(cells_ - 1, cx + 1); ++x) {
      for (std::uint32_t id : bucket(x, y)) {
        if (within_radius(p, particles[id], radius_)) out.push_back(id);
      }
    }
  }
}

std::vector<std::size_t> neighbors(const Particle& p, std::span<const Particle> particles, double radius) {
  NeighborGrid grid(radius);
  grid.build(particles);
  std::vector<std::uint32_t> ids;
  grid.query(particles, p, ids);
  std::vector<std::size_t> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StepSummary> run_spatial(const SpatialConfig& cfg, std::uint64_t run_index, EventSink* sink) {
  validate_config(cfg);
  RngStream rng(cfg.seed, run_index);
  std::vector<Particle> particles = init_particles(cfg, rng);

  std::vector<StepSummary> summaries;
  for (std::uint64_t step = 1; step <= cfg.iterations; ++step) {
    const StepSummary s = spatial_iteration(particles, static_cast<std::int64_t>(step), cfg, rng, sink);
    if (sink) sink->on_step(s);
    summaries.push_back(s);
    if (s.extinct) break;
  }
  return summaries;
}

}  // namespace hashchem
