#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashchem/core.hpp"
#include "hashchem/events.hpp"
#include "hashchem/fitness.hpp"

namespace hashchem {

/// A per-step series; element i holds the value at t = i + 1, nullopt where undefined.
using Series = std::vector<std::optional<double>>;

/// Statistics over the replication events of one time step. Every real field
/// is NaN when event_count == 0.
struct StepAggregate {
  std::int64_t t = 0;
  std::uint64_t event_count = 0;
  std::uint64_t replicated_individuals = 0;
  double max_fitness = std::numeric_limits<double>::quiet_NaN();
  double mean_fitness = std::numeric_limits<double>::quiet_NaN();
  double mean_neglog_fitness = std::numeric_limits<double>::quiet_NaN();
  double max_size = std::numeric_limits<double>::quiet_NaN();
  double mean_size = std::numeric_limits<double>::quiet_NaN();

  bool empty() const noexcept { return event_count == 0; }
};

/// -log10(1 - f). Throws ValidationError unless 0 <= f < 1.
double neglog_transform(double f);

/// Everything the figures need from one run, indexed by t - 1 for t = 1..horizon.
struct RunSeries {
  std::vector<StepAggregate> steps;
  std::vector<std::uint64_t> unique_individual_types;
  std::vector<std::uint64_t> unique_multiset_types;
  std::vector<std::optional<std::uint64_t>> population;

  std::size_t horizon() const noexcept { return steps.size(); }
};

/// Streaming reducer for one run. Feed it events in non-decreasing t, either
/// directly as the sink of a simulation or from a log reader.
class RunAccumulator final : public EventSink {
 public:
  RunAccumulator() = default;

  /// Throws ValidationError if t is smaller than a previously seen step.
  void add(std::int64_t t, std::span<const EntityType> ms, FitnessValue f);

  void on_replication(std::int64_t t, const Multiset& copy, FitnessValue f) override {
    add(t, copy.elements(), f);
  }
  void on_step(const StepSummary& s) override;

  /// Extends the series to at least `horizon` steps and returns them.
  RunSeries finish(std::int64_t horizon = 0);

 private:
  void advance_to(std::int64_t t);
  void close_step();
  bool insert_multiset(std::span<const EntityType> ms);

  RunSeries series_;
  std::int64_t current_t_ = 0;
  StepAggregate current_;
  double fitness_sum_ = 0.0;
  double neglog_sum_ = 0.0;
  std::vector<char> seen_types_;
  std::uint64_t individual_count_ = 0;
  std::unordered_map<std::uint64_t, std::vector<Multiset>> seen_multisets_;
  std::uint64_t multiset_count_ = 0;
};

/// One StepAggregate per t = 1..max t (empty where no event occurred).
/// Throws ValidationError if `events` is not sorted by t.
std::vector<StepAggregate> aggregate_run(std::span<const ReplicationEvent> events);

/// Distinct entity types seen in any replicated multiset up to and including t.
std::vector<std::uint64_t> cumulative_unique_individual_types(std::span<const ReplicationEvent> events);

/// Distinct canonical multisets replicated up to and including t.
std::vector<std::uint64_t> cumulative_unique_multiset_types(std::span<const ReplicationEvent> events);

enum class Metric {
  max_fitness,             // -log10(1 - max f)
  mean_fitness,            // -log10(1 - mean f), or mean of -log10(1 - f) with transform_first
  replicated_individuals,
  max_size,
  mean_size,
  unique_individual_types,
  unique_multiset_types,
  population,
};

std::string_view metric_name(Metric m);

/// Extracts one plotted quantity from a run.
Series extract_series(const RunSeries& run, Metric metric, bool transform_first = false);

struct MeanSeries {
  Series mean;
  std::vector<std::size_t> contributors;
};

/// Mean over the runs that define a value at each t. Runs may differ in length.
MeanSeries cross_run_mean(std::span<const Series> runs);

enum class GrowthModel { bounded, unbounded };

std::string_view model_name(GrowthModel m);

struct TimeRange {
  std::int64_t lo = 100;
  std::int64_t hi = 2000;
};

struct FitOptions {
  bool log_resample = false;
  std::size_t resample_points = 101;
};

/// Least-squares fit of n(t) = -a / ln t + b (bounded) or n(t) = a ln t + b
/// (unbounded). With RSS the residual sum of squares over N points and k = 2:
///   AIC = N ln(2 pi RSS / N) + N + 2 (k + 1)
///   BIC = N ln(2 pi RSS / N) + N + (k + 1) ln N
struct FitResult {
  GrowthModel model = GrowthModel::unbounded;
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  bool r_squared_defined = true;
  double rss = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t n_points = 0;
  TimeRange t_range;
};

/// Predictor value x(t) for the model: -1 / ln t or ln t.
double growth_predictor(GrowthModel model, double t);
double predict(const FitResult& fit, double t);

/// The integer abscissae used for a fit: every t in range, or about
/// `resample_points` log-spaced, de-duplicated ones.
std::vector<std::int64_t> fit_abscissae(TimeRange range, const FitOptions& options);

/// Throws ValidationError if t_range.lo < 2 or fewer than 3 defined points fall
/// in range. Constant data gives r_squared_defined = false.
FitResult fit_growth(const Series& series, TimeRange t_range, GrowthModel model, const FitOptions& options = {});

struct ModelComparison {
  FitResult bounded;
  FitResult unbounded;
  GrowthModel verdict = GrowthModel::unbounded;  // lower AIC
  double delta_aic = 0.0;                        // unbounded - bounded
  double delta_bic = 0.0;
};

ModelComparison compare_models(const Series& series, TimeRange t_range, const FitOptions& options = {});

}  // namespace hashchem
