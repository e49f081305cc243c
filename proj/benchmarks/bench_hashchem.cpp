#include <benchmark/benchmark.h>

#include <vector>

#include "hashchem/fitness.hpp"
#include "hashchem/nonspatial.hpp"
#include "hashchem/spatial.hpp"

namespace {

using namespace hashchem;

void BM_Fitness(benchmark::State& state) {
  RngStream rng(1, 0);
  std::vector<EntityType> v(static_cast<std::size_t>(state.range(0)));
  for (auto& e : v) e = static_cast<EntityType>(1 + rng.below(1000));
  const Multiset ms = canonicalize(v);
  for (auto _ : state) benchmark::DoNotOptimize(fitness(ms, kNonspatialModulus));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Fitness)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

void BM_CompetitionStep(benchmark::State& state) {
  SimConfig cfg;
  RngStream rng(2, 0);
  Population pop;
  for (int i = 0; i < 10'000; ++i) pop.add(canonicalize({static_cast<EntityType>(1 + rng.below(1000))}), cfg.m);
  for (auto _ : state) {
    const MatchOutcome o = competition_step(pop, cfg, rng);
    benchmark::DoNotOptimize(o);
  }
}
BENCHMARK(BM_CompetitionStep);

void BM_NonspatialIteration(benchmark::State& state) {
  SimConfig cfg;
  RngStream rng(3, 0);
  Population pop = init_population(cfg, rng);
  for (std::int64_t t = 1; t <= 200; ++t) iterate(pop, t, cfg, rng);  // reach capacity
  std::int64_t t = 201;
  for (auto _ : state) benchmark::DoNotOptimize(iterate(pop, t++, cfg, rng));
}
BENCHMARK(BM_NonspatialIteration)->Unit(benchmark::kMillisecond);

std::vector<Particle> particles(std::size_t n) {
  RngStream rng(4, 0);
  std::vector<Particle> ps(n);
  for (auto& p : ps) {
    p.type = static_cast<EntityType>(1 + rng.below(1000));
    p.x = rng.uniform01();
    p.y = rng.uniform01();
  }
  return ps;
}

void BM_GridQuery(benchmark::State& state) {
  const auto ps = particles(static_cast<std::size_t>(state.range(0)));
  NeighborGrid grid(0.05);
  grid.build(ps);
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  for (auto _ : state) {
    grid.query(ps, ps[i++ % ps.size()], out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GridQuery)->Arg(1000)->Arg(5000);

void BM_BruteForceQuery(benchmark::State& state) {
  const auto ps = particles(static_cast<std::size_t>(state.range(0)));
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  for (auto _ : state) {
    out.clear();
    const Particle& q = ps[i++ % ps.size()];
    for (std::uint32_t j = 0; j < ps.size(); ++j) {
      if (within_radius(q, ps[j], 0.05)) out.push_back(j);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_BruteForceQuery)->Arg(1000)->Arg(5000);

void BM_SpatialIteration(benchmark::State& state) {
  SpatialConfig cfg;
  cfg.init_count = 3000;
  RngStream rng(5, 0);
  auto ps = init_particles(cfg, rng);
  std::int64_t t = 1;
  for (auto _ : state) {
    if (ps.empty()) ps = init_particles(cfg, rng);
    benchmark::DoNotOptimize(spatial_iteration(ps, t++, cfg, rng));
  }
}
BENCHMARK(BM_SpatialIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
