#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hashchem/analysis.hpp"
#include "hashchem/nonspatial.hpp"
#include "hashchem/rng.hpp"
#include "support/oracles.hpp"

namespace hashchem {
namespace {

ReplicationEvent ev(std::int64_t t, std::vector<EntityType> ms, double f) {
  return {0, t, canonicalize(std::move(ms)), FitnessValue(static_cast<std::uint64_t>(std::llround(f * 1e8)), 100'000'000)};
}

Series synthetic(GrowthModel model, double a, double b, std::int64_t horizon) {
  Series s(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 2; t <= horizon; ++t) s[static_cast<std::size_t>(t - 1)] = a * growth_predictor(model, static_cast<double>(t)) + b;
  return s;
}

TEST(NeglogTransform, KnownValues) {
  EXPECT_DOUBLE_EQ(neglog_transform(0.0), 0.0);
  EXPECT_NEAR(neglog_transform(0.999), 3.0, 1e-9);
  EXPECT_NEAR(neglog_transform(0.99999999), 8.0, 1e-6);
  EXPECT_THROW(neglog_transform(1.0), ValidationError);
  EXPECT_THROW(neglog_transform(-0.1), ValidationError);
}

TEST(AggregateRun, WorkedStep) {
  const std::vector<ReplicationEvent> events{ev(5, {4}, 0.2), ev(5, {1, 2, 3}, 0.6)};
  const auto agg = aggregate_run(events);
  ASSERT_EQ(agg.size(), 5u);
  for (int t = 0; t < 4; ++t) {
    EXPECT_TRUE(agg[t].empty());
    EXPECT_TRUE(std::isnan(agg[t].max_fitness));
    EXPECT_EQ(agg[t].replicated_individuals, 0u);
  }
  const StepAggregate& s = agg[4];
  EXPECT_EQ(s.t, 5);
  EXPECT_EQ(s.event_count, 2u);
  EXPECT_EQ(s.replicated_individuals, 4u);
  EXPECT_DOUBLE_EQ(s.max_fitness, 0.6);
  EXPECT_DOUBLE_EQ(s.mean_fitness, 0.4);
  EXPECT_DOUBLE_EQ(s.max_size, 3.0);
  EXPECT_DOUBLE_EQ(s.mean_size, 2.0);
  EXPECT_NEAR(s.mean_neglog_fitness, (-std::log10(0.8) - std::log10(0.4)) / 2.0, 1e-12);
}

TEST(AggregateRun, RejectsUnsortedEvents) {
  const std::vector<ReplicationEvent> events{ev(3, {1}, 0.1), ev(2, {1}, 0.1)};
  EXPECT_THROW(aggregate_run(events), ValidationError);
}

TEST(CumulativeCounts, WorkedExample) {
  const std::vector<ReplicationEvent> events{ev(1, {1, 2}, 0.1), ev(1, {2}, 0.1), ev(3, {2, 5}, 0.1),
                                             ev(3, {1, 2}, 0.1), ev(4, {2, 2}, 0.1)};
  EXPECT_EQ(cumulative_unique_individual_types(events), (std::vector<std::uint64_t>{2, 2, 3, 3}));
  EXPECT_EQ(cumulative_unique_multiset_types(events), (std::vector<std::uint64_t>{2, 2, 3, 4}));
}

TEST(CumulativeCounts, NeverDecrease) {
  SimConfig cfg;
  cfg.iterations = 60;
  cfg.n_max = 400;
  RunAccumulator acc;
  run(cfg, 0, &acc);
  const RunSeries rs = acc.finish(cfg.iterations);
  ASSERT_EQ(rs.horizon(), 60u);
  for (std::size_t i = 1; i < rs.horizon(); ++i) {
    EXPECT_GE(rs.unique_individual_types[i], rs.unique_individual_types[i - 1]);
    EXPECT_GE(rs.unique_multiset_types[i], rs.unique_multiset_types[i - 1]);
    EXPECT_LE(rs.unique_individual_types[i], cfg.s_max);
  }
}

TEST(RunAccumulator, AgreesWithBatchAggregation) {
  SimConfig cfg;
  cfg.iterations = 40;
  cfg.n_max = 300;
  struct Collect : EventSink {
    std::vector<ReplicationEvent> events;
    void on_replication(std::int64_t t, const Multiset& ms, FitnessValue f) override { events.push_back({0, t, ms, f}); }
  } collect;
  run(cfg, 1, &collect);
  RunAccumulator acc;
  for (const auto& e : collect.events) acc.add(e.t, e.multiset.elements(), e.fitness);
  const RunSeries rs = acc.finish();
  const auto agg = aggregate_run(collect.events);
  ASSERT_EQ(rs.steps.size(), agg.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    EXPECT_EQ(rs.steps[i].event_count, agg[i].event_count);
    EXPECT_EQ(rs.steps[i].replicated_individuals, agg[i].replicated_individuals);
    if (!agg[i].empty()) {
      EXPECT_DOUBLE_EQ(rs.steps[i].max_fitness, agg[i].max_fitness);
      EXPECT_DOUBLE_EQ(rs.steps[i].mean_size, agg[i].mean_size);
    }
  }
  EXPECT_EQ(rs.unique_individual_types, cumulative_unique_individual_types(collect.events));
  EXPECT_EQ(rs.unique_multiset_types, cumulative_unique_multiset_types(collect.events));
}

TEST(RunAccumulator, RejectsTimeGoingBackwards) {
  RunAccumulator acc;
  const std::vector<EntityType> ms{1};
  acc.add(3, ms, FitnessValue(1, 2));
  EXPECT_THROW(acc.add(2, ms, FitnessValue(1, 2)), ValidationError);
}

TEST(ExtractSeries, EmptyStepsUndefinedExceptCounts) {
  RunAccumulator acc;
  const std::vector<EntityType> ms{1, 2};
  acc.add(2, ms, FitnessValue(1, 2));
  const RunSeries rs = acc.finish(3);
  const Series maxf = extract_series(rs, Metric::max_fitness);
  ASSERT_EQ(maxf.size(), 3u);
  EXPECT_FALSE(maxf[0]);
  EXPECT_NEAR(*maxf[1], -std::log10(0.5), 1e-12);
  EXPECT_FALSE(maxf[2]);
  const Series reps = extract_series(rs, Metric::replicated_individuals);
  EXPECT_EQ(reps[0], 0.0);
  EXPECT_EQ(reps[1], 2.0);
}

TEST(ExtractSeries, TransformOrderForMeanFitness) {
  RunAccumulator acc;
  const std::vector<EntityType> ms{1};
  acc.add(1, ms, FitnessValue(0, 100));
  acc.add(1, ms, FitnessValue(99, 100));
  const RunSeries rs = acc.finish();
  EXPECT_NEAR(*extract_series(rs, Metric::mean_fitness)[0], -std::log10(1.0 - 0.495), 1e-12);
  EXPECT_NEAR(*extract_series(rs, Metric::mean_fitness, true)[0], 1.0, 1e-12);
}

TEST(CrossRunMean, AveragesDefinedRunsOnly) {
  const std::vector<Series> runs{{1.0, 2.0, std::nullopt}, {3.0, std::nullopt}, {5.0}};
  const MeanSeries m = cross_run_mean(runs);
  ASSERT_EQ(m.mean.size(), 3u);
  EXPECT_DOUBLE_EQ(*m.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(*m.mean[1], 2.0);
  EXPECT_FALSE(m.mean[2]);
  EXPECT_EQ(m.contributors, (std::vector<std::size_t>{3, 1, 0}));
}

TEST(FitGrowth, RecoversExactUnboundedCurve) {
  const Series s = synthetic(GrowthModel::unbounded, 1.60238, -6.30145, 2000);
  const FitResult f = fit_growth(s, {100, 2000}, GrowthModel::unbounded);
  EXPECT_NEAR(f.a, 1.60238, 1e-9);
  EXPECT_NEAR(f.b, -6.30145, 1e-9);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.n_points, 1901u);
}

TEST(FitGrowth, RecoversExactBoundedCurve) {
  const Series s = synthetic(GrowthModel::bounded, 57.1218, 12.7686, 2000);
  const FitResult f = fit_growth(s, {100, 2000}, GrowthModel::bounded);
  EXPECT_NEAR(f.a, 57.1218, 1e-9);
  EXPECT_NEAR(f.b, 12.7686, 1e-9);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitGrowth, InformationCriteriaDefinitions) {
  RngStream rng(2, 0);
  Series s = synthetic(GrowthModel::unbounded, 1.0, 0.0, 2000);
  for (auto& v : s) if (v) *v += 0.1 * rng.normal();
  const FitResult f = fit_growth(s, {100, 2000}, GrowthModel::unbounded);
  const double n = 1901.0;
  const double core = n * std::log(2.0 * std::numbers::pi * f.rss / n) + n;
  EXPECT_NEAR(f.aic, core + 6.0, 1e-6);
  EXPECT_NEAR(f.bic, core + 3.0 * std::log(n), 1e-6);
  EXPECT_NEAR(f.bic - f.aic, 16.65, 0.01);
}

TEST(FitGrowth, MatchesNormalEquationsOracleOnNoisyData) {
  RngStream rng(3, 0);
  for (auto model : {GrowthModel::bounded, GrowthModel::unbounded}) {
    for (int trial = 0; trial < 20; ++trial) {
      Series s(2000);
      for (std::int64_t t = 1; t <= 2000; ++t) {
        if (rng.bernoulli(0.1)) continue;  // gaps
        s[static_cast<std::size_t>(t - 1)] = 2.0 + 0.5 * std::log(static_cast<double>(t)) + rng.normal();
      }
      const TimeRange range{static_cast<std::int64_t>(2 + rng.below(100)), static_cast<std::int64_t>(500 + rng.below(1500))};
      const FitResult f = fit_growth(s, range, model);
      const auto o = testing::normal_equations_oracle(s, range, model);
      EXPECT_NEAR(f.a, o.slope, 1e-7 * (1.0 + std::abs(o.slope)));
      EXPECT_NEAR(f.b, o.intercept, 1e-7 * (1.0 + std::abs(o.intercept)));
    }
  }
}

TEST(FitGrowth, ConstantSeriesHasNoRSquared) {
  Series s(300, 4.0);
  const FitResult f = fit_growth(s, {100, 300}, GrowthModel::unbounded);
  EXPECT_DOUBLE_EQ(f.a, 0.0);
  EXPECT_DOUBLE_EQ(f.b, 4.0);
  EXPECT_FALSE(f.r_squared_defined);
}

TEST(FitGrowth, RejectsBadInput) {
  Series s(300, 1.0);
  EXPECT_THROW(fit_growth(s, {1, 300}, GrowthModel::bounded), ValidationError);
  Series sparse(300);
  sparse[150] = 1.0;
  sparse[160] = 2.0;
  EXPECT_THROW(fit_growth(sparse, {100, 300}, GrowthModel::bounded), ValidationError);
}

TEST(FitAbscissae, DenseAndLogResampled) {
  const auto dense = fit_abscissae({100, 2000}, {});
  ASSERT_EQ(dense.size(), 1901u);
  EXPECT_EQ(dense.front(), 100);
  EXPECT_EQ(dense.back(), 2000);
  const auto sparse = fit_abscissae({100, 2000}, {true, 101});
  EXPECT_LE(sparse.size(), 101u);
  EXPECT_GT(sparse.size(), 90u);
  EXPECT_EQ(sparse.front(), 100);
  EXPECT_EQ(sparse.back(), 2000);
  EXPECT_TRUE(std::is_sorted(sparse.begin(), sparse.end()));
  EXPECT_EQ(std::adjacent_find(sparse.begin(), sparse.end()), sparse.end());
}

TEST(CompareModels, PicksGeneratingModel) {
  RngStream rng(4, 0);
  for (auto truth : {GrowthModel::bounded, GrowthModel::unbounded}) {
    Series s = truth == GrowthModel::bounded ? synthetic(truth, 30.0, 10.0, 2000) : synthetic(truth, 1.5, -5.0, 2000);
    for (auto& v : s) if (v) *v += 0.05 * rng.normal();
    const ModelComparison c = compare_models(s, {100, 2000});
    EXPECT_EQ(c.verdict, truth);
    EXPECT_DOUBLE_EQ(c.delta_aic, c.unbounded.aic - c.bounded.aic);
    EXPECT_DOUBLE_EQ(c.delta_bic, c.unbounded.bic - c.bounded.bic);
  }
}

TEST(Names, Stable) {
  EXPECT_EQ(model_name(GrowthModel::bounded), "bounded");
  EXPECT_EQ(model_name(GrowthModel::unbounded), "unbounded");
  EXPECT_EQ(metric_name(Metric::max_fitness), "max_fitness_neglog");
}

}  // namespace
}  // namespace hashchem
