#include <gtest/gtest.h>

#include <vector>

#include "hashchem/nonspatial.hpp"
#include "support/scripted_rng.hpp"

namespace hashchem {
namespace {

using testing::ScriptedRng;

std::vector<EntityType> elems(const Multiset& ms) { return {ms.elements().begin(), ms.elements().end()}; }

// f([5]) = 0.96433184, f([7]) = 0.15449410 at m = 1e8 (frozen oracle values).
constexpr double kF5 = 0.96433184;
constexpr double kF7 = 0.15449410;

struct RecordingSink : EventSink {
  std::vector<std::pair<std::int64_t, Multiset>> copies;
  std::vector<StepSummary> steps;
  void on_replication(std::int64_t t, const Multiset& ms, FitnessValue) override { copies.emplace_back(t, ms); }
  void on_step(const StepSummary& s) override { steps.push_back(s); }
};

TEST(DeathProbability, WorkedValues) {
  EXPECT_DOUBLE_EQ(death_probability(FitnessValue(50'000'000, 100'000'000), 5000, 10000), 0.75);
  EXPECT_DOUBLE_EQ(death_probability(FitnessValue(50'000'000, 100'000'000), 10000, 10000), 1.0);
  EXPECT_DOUBLE_EQ(death_probability(FitnessValue(0, 100'000'000), 10, 10000), 1.0);
  // Beyond n_max the raw value exceeds one and is clamped.
  EXPECT_DOUBLE_EQ(death_probability(FitnessValue(99'999'999, 100'000'000), 30000, 10000), 1.0);
}

TEST(InitPopulation, SingletonsInRange) {
  RngStream rng(1, 0);
  SimConfig cfg;
  const Population pop = init_population(cfg, rng);
  ASSERT_EQ(pop.size(), 10u);
  for (const Member& m : pop.members()) {
    ASSERT_EQ(m.multiset.size(), 1u);
    EXPECT_GE(m.multiset.elements()[0], 1u);
    EXPECT_LE(m.multiset.elements()[0], 1000u);
    EXPECT_EQ(m.fitness, fitness(m.multiset, cfg.m));
  }
  cfg.init_count = 1;
  EXPECT_EQ(init_population(cfg, rng).size(), 1u);
}

TEST(CompetitionStep, FitterWinsAndLoserMayDie) {
  SimConfig cfg;
  cfg.n_max = 6;
  Population pop;
  pop.add(canonicalize({5}), cfg.m);
  pop.add(canonicalize({7}), cfg.m);
  // pair (0, 1); death uniform 0.9 < 1 - f7 * (1 - 3/6).
  ScriptedRng rng{0.0, 0.0, 0.9};
  RecordingSink sink;
  const MatchOutcome o = competition_step(pop, cfg, rng, &sink, 4);
  EXPECT_EQ(o.winner_index, 0u);
  EXPECT_EQ(o.loser_index, 1u);
  EXPECT_TRUE(o.replicated);
  EXPECT_TRUE(o.loser_died);
  EXPECT_DOUBLE_EQ(o.death_probability, 1.0 - kF7 * 0.5);
  EXPECT_EQ(rng.remaining(), 0u);
  ASSERT_EQ(pop.size(), 2u);
  EXPECT_EQ(pop[0].multiset, canonicalize({5}));
  EXPECT_EQ(pop[1].multiset, canonicalize({5}));
  ASSERT_EQ(sink.copies.size(), 1u);
  EXPECT_EQ(sink.copies[0].first, 4);
  EXPECT_EQ(sink.copies[0].second, canonicalize({5}));
}

TEST(CompetitionStep, SurvivingLoserStays) {
  SimConfig cfg;
  cfg.n_max = 6;
  Population pop;
  pop.add(canonicalize({7}), cfg.m);
  pop.add(canonicalize({5}), cfg.m);
  ScriptedRng rng{0.0, 0.0, 0.99};
  const MatchOutcome o = competition_step(pop, cfg, rng);
  EXPECT_EQ(o.winner_index, 1u);
  EXPECT_FALSE(o.loser_died);
  EXPECT_EQ(pop.size(), 3u);
  EXPECT_EQ(pop[2].multiset, canonicalize({5}));
}

TEST(CompetitionStep, SecondIndexSkipsFirst) {
  SimConfig cfg;
  Population pop;
  for (EntityType e : {5u, 7u, 1000u}) pop.add(canonicalize({e}), cfg.m);
  // first = floor(0.5 * 3) = 1; second = floor(0.6 * 2) = 1 -> shifted to 2.
  ScriptedRng rng{0.5, 0.6, 0.999};
  const MatchOutcome o = competition_step(pop, cfg, rng);
  EXPECT_TRUE((o.winner_index == 1 && o.loser_index == 2) || (o.winner_index == 2 && o.loser_index == 1));
}

TEST(CompetitionStep, TiesDecidedByCoin) {
  SimConfig cfg;
  for (double coin : {0.2, 0.7}) {
    Population pop;
    pop.add(canonicalize({5}), cfg.m);
    pop.add(canonicalize({5}), cfg.m);
    ScriptedRng rng{0.0, 0.0, coin, 0.999};
    const MatchOutcome o = competition_step(pop, cfg, rng);
    EXPECT_EQ(o.winner_index, coin < 0.5 ? 0u : 1u);
    EXPECT_EQ(rng.remaining(), 0u);
  }
}

TEST(CompetitionStep, EmptiedCopyIsNotInserted) {
  SimConfig cfg;
  cfg.mutate_on_replicate = true;
  cfg.n_max = 6;
  Population pop;
  pop.add(canonicalize({5}), cfg.m);
  pop.add(canonicalize({7}), cfg.m);
  // pair, point change, delete, no duplication, death uniform.
  ScriptedRng rng{0.0, 0.0, 0.0, 0.99, 0.99, 0.999};
  RecordingSink sink;
  const MatchOutcome o = competition_step(pop, cfg, rng, &sink);
  EXPECT_FALSE(o.replicated);
  EXPECT_TRUE(sink.copies.empty());
  EXPECT_EQ(pop.size(), 2u);
  // n is measured after the (absent) insertion.
  EXPECT_DOUBLE_EQ(o.death_probability, 1.0 - kF7 * (1.0 - 2.0 / 6.0));
}

TEST(CompetitionStep, NeedsTwoMembers) {
  SimConfig cfg;
  Population pop;
  pop.add(canonicalize({5}), cfg.m);
  ScriptedRng rng;
  EXPECT_THROW(competition_step(pop, cfg, rng), ValidationError);
}

TEST(MutateMultiset, NoEventIsIdentity) {
  SimConfig cfg;
  ScriptedRng rng{0.99, 0.99, 0.99, 0.99};
  const auto out = mutate_multiset(canonicalize({1, 1, 3}), cfg, rng);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, canonicalize({1, 1, 3}));
  EXPECT_EQ(rng.remaining(), 0u);
}

TEST(MutateMultiset, DeletingOnlyElementRemoves) {
  SimConfig cfg;
  ScriptedRng rng{0.0, 0.9, 0.99};
  EXPECT_FALSE(mutate_multiset(canonicalize({4}), cfg, rng).has_value());
}

TEST(MutateMultiset, DuplicationDoublesContent) {
  SimConfig cfg;
  ScriptedRng rng{0.99, 0.99, 0.0};
  const auto out = mutate_multiset(canonicalize({2, 9}), cfg, rng);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(elems(*out), (std::vector<EntityType>{2, 2, 9, 9}));
}

TEST(MutateMultiset, SwapDrawsNewTypeAndResorts) {
  SimConfig cfg;
  // Element 900 is swapped for floor(0.0005 * 1000) + 1 = 1.
  ScriptedRng rng{0.99, 0.0, 0.0, 0.0005, 0.99};
  MutationTally tally;
  const auto out = mutate_multiset(canonicalize({3, 900}), cfg, rng, &tally);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(elems(*out), (std::vector<EntityType>{1, 3}));
  EXPECT_EQ(tally.point_changes, 1u);
  EXPECT_EQ(tally.swaps, 1u);
  EXPECT_EQ(tally.deletions, 0u);
  EXPECT_EQ(tally.elements_seen, 2u);
}

TEST(MutateMultiset, DuplicationAfterDeletion) {
  SimConfig cfg;
  ScriptedRng rng{0.0, 0.9, 0.99, 0.0};
  const auto out = mutate_multiset(canonicalize({2, 9}), cfg, rng);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(elems(*out), (std::vector<EntityType>{9, 9}));
}

TEST(Iterate, MatchCountIsHalfTheStartingSize) {
  SimConfig cfg;
  cfg.mutation_rate = 0.0;
  for (auto [n0, expected] : {std::pair{10, 5}, {1, 0}, {3, 1}, {2, 1}}) {
    RngStream rng(9, static_cast<std::uint64_t>(n0));
    Population pop;
    for (int i = 0; i < n0; ++i) pop.add(canonicalize({static_cast<EntityType>(i + 1)}), cfg.m);
    const StepSummary s = iterate(pop, 1, cfg, rng);
    EXPECT_EQ(s.matches, static_cast<std::uint64_t>(expected)) << "n0=" << n0;
    EXPECT_EQ(s.population_size, pop.size());
    EXPECT_EQ(static_cast<std::int64_t>(pop.size()),
              n0 + static_cast<std::int64_t>(s.births) - static_cast<std::int64_t>(s.deaths));
  }
}

TEST(Iterate, EachMatchChangesSizeByZeroOrOne) {
  SimConfig cfg;
  RngStream rng(3, 0);
  Population pop = init_population(cfg, rng);
  for (int i = 0; i < 5000; ++i) {
    if (pop.size() < 2) break;
    const std::size_t before = pop.size();
    const MatchOutcome o = competition_step(pop, cfg, rng);
    const std::size_t after = pop.size();
    ASSERT_TRUE(after == before || after == before + 1);
    ASSERT_EQ(after == before, o.loser_died);
  }
}

TEST(Iterate, LosersAlwaysDieAtCapacity) {
  SimConfig cfg;
  cfg.n_max = 4;
  cfg.mutation_rate = 0.0;
  RngStream rng(4, 0);
  Population pop;
  for (EntityType e = 1; e <= 8; ++e) pop.add(canonicalize({e}), cfg.m);
  const StepSummary s = iterate(pop, 1, cfg, rng);
  EXPECT_EQ(s.matches, 4u);
  EXPECT_EQ(s.deaths, 4u);
  EXPECT_EQ(pop.size(), 8u);
}

TEST(Run, ZeroIterationsGivesNoSteps) {
  SimConfig cfg;
  cfg.iterations = 0;
  EXPECT_TRUE(run(cfg, 0).empty());
}

TEST(Run, DeterministicPerSeedAndRun) {
  SimConfig cfg;
  cfg.iterations = 150;
  cfg.seed = 77;
  RecordingSink a, b, c;
  const auto ra = run(cfg, 2, &a);
  const auto rb = run(cfg, 2, &b);
  run(cfg, 3, &c);
  EXPECT_EQ(ra, rb);
  EXPECT_EQ(a.copies, b.copies);
  EXPECT_EQ(a.steps, ra);
  EXPECT_NE(a.copies, c.copies);
}

TEST(Run, PopulationStaysNearCapacity) {
  SimConfig cfg;
  cfg.iterations = 300;
  cfg.n_max = 500;
  const auto steps = run(cfg, 0);
  ASSERT_EQ(steps.size(), 300u);
  for (const auto& s : steps) {
    ASSERT_LE(s.population_size, 4 * cfg.n_max);
    ASSERT_FALSE(s.extinct);
  }
  EXPECT_GT(steps.back().population_size, 200u);
}

TEST(Run, RejectsInvalidConfig) {
  SimConfig cfg;
  cfg.n_max = 0;
  EXPECT_THROW(run(cfg, 0), ConfigError);
}

}  // namespace
}  // namespace hashchem
