#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hashchem/config.hpp"
#include "hashchem/core.hpp"
#include "hashchem/events.hpp"
#include "hashchem/fitness.hpp"
#include "hashchem/rng.hpp"

namespace hashchem {

/// A population member together with its (content-determined) fitness.
struct Member {
  Multiset multiset;
  FitnessValue fitness;
};

/// The well-mixed list of multisets. Member order carries no meaning: removal
/// moves the last member into the vacated slot.
class Population {
 public:
  Population() = default;

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const Member& operator[](std::size_t i) const { return members_[i]; }
  std::span<const Member> members() const noexcept { return members_; }

  void add(Multiset ms, std::uint64_t m) {
    const FitnessValue f = fitness(ms, m);
    members_.push_back({std::move(ms), f});
  }
  void add(Member member) { members_.push_back(std::move(member)); }

  void replace(std::size_t i, Multiset ms, std::uint64_t m) {
    const FitnessValue f = fitness(ms, m);
    members_[i] = {std::move(ms), f};
  }

  void remove(std::size_t i) {
    if (i + 1 != members_.size()) members_[i] = std::move(members_.back());
    members_.pop_back();
  }

  void reserve(std::size_t n) { members_.reserve(n); }

 private:
  std::vector<Member> members_;
};

/// Outcome of one pairwise competition. Indices refer to the population as it
/// was when the pair was drawn.
struct MatchOutcome {
  std::size_t winner_index = 0;
  std::size_t loser_index = 0;
  FitnessValue winner_fitness;
  FitnessValue loser_fitness;
  bool replicated = false;  // false only when the mutated copy came out empty
  bool loser_died = false;
  double death_probability = 0.0;
};

/// Counters filled by mutate_multiset, for checking the mutation measure.
struct MutationTally {
  std::uint64_t elements_seen = 0;
  std::uint64_t point_changes = 0;
  std::uint64_t swaps = 0;
  std::uint64_t deletions = 0;
  std::uint64_t invocations = 0;
  std::uint64_t duplications = 0;
};

/// Probability that the loser of a match is removed: 1 - f (1 - n / n_max),
/// clamped to [0, 1]. `n` is the population size after the winner's copy was inserted.
inline double death_probability(FitnessValue loser, std::uint64_t n, std::uint64_t n_max) noexcept {
  const double crowding = 1.0 - static_cast<double>(n) / static_cast<double>(n_max);
  const double p = 1.0 - loser.value() * crowding;
  return std::clamp(p, 0.0, 1.0);
}

/// `init_count` singletons with types uniform on [1, S_max].
template <RandomStream R>
Population init_population(const SimConfig& cfg, R& rng) {
  Population pop;
  pop.reserve(static_cast<std::size_t>(cfg.n_max + cfg.n_max / 4));
  for (std::uint64_t i = 0; i < cfg.init_count; ++i) {
    const auto type = static_cast<EntityType>(rng.below(cfg.s_max) + 1);
    pop.add(make_multiset_unchecked({type}), cfg.m);
  }
  return pop;
}

/// Point changes (swap or delete per element), then whole-content duplication.
/// Returns nullopt when nothing is left, signalling removal from the population.
template <RandomStream R>
std::optional<Multiset> mutate_multiset(const Multiset& ms, const SimConfig& cfg, R& rng,
                                        MutationTally* tally = nullptr) {
  std::vector<EntityType> out;
  out.reserve(ms.size() * 2);
  bool changed = false;
  for (EntityType e : ms.elements()) {
    if (!rng.bernoulli(cfg.point_change_prob)) {
      out.push_back(e);
      continue;
    }
    changed = true;
    if (tally) ++tally->point_changes;
    if (rng.bernoulli(cfg.swap_fraction)) {
      out.push_back(static_cast<EntityType>(rng.below(cfg.s_max) + 1));
      if (tally) ++tally->swaps;
    } else if (tally) {
      ++tally->deletions;
    }
  }
  const bool duplicate = rng.bernoulli(cfg.duplication_prob);
  if (tally) {
    tally->elements_seen += ms.size();
    ++tally->invocations;
    if (duplicate) ++tally->duplications;
  }
  if (out.empty()) return std::nullopt;
  if (changed) std::sort(out.begin(), out.end());
  Multiset result = make_multiset_unchecked(std::move(out));
  if (duplicate) result.duplicate();
  return result;
}

/// One pairwise match: draw two distinct members, copy the fitter one into the
/// population and remove the other with death_probability. Exact ties are
/// settled by a fair coin. Requires pop.size() >= 2.
template <RandomStream R>
MatchOutcome competition_step(Population& pop, const SimConfig& cfg, R& rng,
                              EventSink* sink = nullptr, std::int64_t t = 0) {
  if (pop.size() < 2) throw ValidationError("competition_step needs at least two members");

  const auto n = static_cast<std::uint64_t>(pop.size());
  const auto first = static_cast<std::size_t>(rng.below(n));
  auto second = static_cast<std::size_t>(rng.below(n - 1));
  if (second >= first) ++second;

  const FitnessValue f_first = pop[first].fitness;
  const FitnessValue f_second = pop[second].fitness;
  bool first_wins = f_first > f_second;
  if (f_first == f_second) first_wins = rng.bernoulli(0.5);

  MatchOutcome out;
  out.winner_index = first_wins ? first : second;
  out.loser_index = first_wins ? second : first;
  out.winner_fitness = first_wins ? f_first : f_second;
  out.loser_fitness = first_wins ? f_second : f_first;

  if (cfg.mutate_on_replicate) {
    if (auto copy = mutate_multiset(pop[out.winner_index].multiset, cfg, rng)) {
      pop.add(std::move(*copy), cfg.m);
      out.replicated = true;
    }
  } else {
    pop.add(pop[out.winner_index]);
    out.replicated = true;
  }
  if (out.replicated && sink) {
    const Member& copy = pop[pop.size() - 1];
    sink->on_replication(t, copy.multiset, copy.fitness);
  }

  out.death_probability = death_probability(out.loser_fitness, pop.size(), cfg.n_max);
  if (rng.uniform01() < out.death_probability) {
    pop.remove(out.loser_index);
    out.loser_died = true;
  }
  return out;
}

/// One time step: floor(n0 / 2) matches with n0 frozen at entry, then the
/// mutation sweep (each member independently with probability mutation_rate).
/// Replications go to `sink`; the summary is returned, not emitted.
template <RandomStream R>
StepSummary iterate(Population& pop, std::int64_t t, const SimConfig& cfg, R& rng,
                    EventSink* sink = nullptr) {
  StepSummary s;
  s.t = t;
  const std::size_t n0 = pop.size();
  const std::size_t matches = n0 / 2;
  for (std::size_t i = 0; i < matches && pop.size() >= 2; ++i) {
    const MatchOutcome o = competition_step(pop, cfg, rng, sink, t);
    ++s.matches;
    if (o.replicated) ++s.births;
    if (o.loser_died) ++s.deaths;
  }
  // Back to front so a swap-removal only moves an already visited member.
  for (std::size_t i = pop.size(); i-- > 0;) {
    if (!rng.bernoulli(cfg.mutation_rate)) continue;
    ++s.mutated_multisets;
    if (auto mutated = mutate_multiset(pop[i].multiset, cfg, rng)) {
      pop.replace(i, std::move(*mutated), cfg.m);
    } else {
      pop.remove(i);
    }
  }
  s.population_size = pop.size();
  s.extinct = pop.empty();
  return s;
}

/// Full run on RngStream(cfg.seed, run_index). Every step summary is passed to
/// sink->on_step and also returned. Throws SimulationError if the population
/// ever exceeds 4 n_max.
std::vector<StepSummary> run(const SimConfig& cfg, std::uint64_t run_index, EventSink* sink = nullptr);

}  // namespace hashchem
