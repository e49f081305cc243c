#include "hashchem/nonspatial.hpp"

#include <string>

namespace hashchem {

std::vector<StepSummary> run(const SimConfig& cfg, std::uint64_t run_index, EventSink* sink) {
  validate_config(cfg);
  RngStream rng(cfg.seed, run_index);
  Population pop = init_population(cfg, rng);
  const std::uint64_t hard_bound = 4 * cfg.n_max;

  std::vector<StepSummary> summaries;
  summaries.reserve(static_cast<std::size_t>(cfg.iterations));
  for (std::uint64_t step = 1; step <= cfg.iterations; ++step) {
    const StepSummary s = iterate(pop, static_cast<std::int64_t>(step), cfg, rng, sink);
    if (s.population_size > hard_bound) {
      throw SimulationError("population " + std::to_string(s.population_size) + " exceeds 4*n_max at t=" +
                            std::to_string(step));
    }
    if (sink) sink->on_step(s);
    summaries.push_back(s);
  }
  return summaries;
}

}  // namespace hashchem
