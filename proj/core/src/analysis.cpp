#include "hashchem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hashchem {

double neglog_transform(double f) {
  if (!(f >= 0.0 && f < 1.0)) {
    throw ValidationError("neglog_transform needs 0 <= f < 1, got " + std::to_string(f));
  }
  return -std::log10(1.0 - f);
}

// --- RunAccumulator ---------------------------------------------------------

void RunAccumulator::close_step() {
  if (current_t_ <= 0) return;
  if (!current_.empty()) {
    const auto count = static_cast<double>(current_.event_count);
    current_.mean_fitness = fitness_sum_ / count;
    current_.mean_neglog_fitness = neglog_sum_ / count;
    current_.mean_size = static_cast<double>(current_.replicated_individuals) / count;
  }
  const auto index = static_cast<std::size_t>(current_t_ - 1);
  if (series_.steps.size() <= index) {
    series_.steps.resize(index + 1);
    series_.unique_individual_types.resize(index + 1, individual_count_);
    series_.unique_multiset_types.resize(index + 1, multiset_count_);
  }
  series_.steps[index] = current_;
  series_.unique_individual_types[index] = individual_count_;
  series_.unique_multiset_types[index] = multiset_count_;
}

void RunAccumulator::advance_to(std::int64_t t) {
  if (t == current_t_) return;
  if (t < current_t_) {
    throw ValidationError("events out of order: t=" + std::to_string(t) + " after t=" +
                          std::to_string(current_t_));
  }
  close_step();
  // Steps skipped entirely keep the running counts and an empty aggregate.
  for (std::int64_t gap = current_t_ + 1; gap < t; ++gap) {
    const auto index = static_cast<std::size_t>(gap - 1);
    if (series_.steps.size() <= index) {
      series_.steps.resize(index + 1);
      series_.unique_individual_types.resize(index + 1, individual_count_);
      series_.unique_multiset_types.resize(index + 1, multiset_count_);
    }
    series_.steps[index].t = gap;
  }
  current_t_ = t;
  current_ = StepAggregate{};
  current_.t = t;
  current_.max_fitness = -1.0;
  current_.max_size = 0.0;
  fitness_sum_ = 0.0;
  neglog_sum_ = 0.0;
}

bool RunAccumulator::insert_multiset(std::span<const EntityType> ms) {
  auto& bucket = seen_multisets_[hash_elements(ms)];
  for (const Multiset& known : bucket) {
    if (std::ranges::equal(known.elements(), ms)) return false;
  }
  bucket.push_back(make_multiset_unchecked(std::vector<EntityType>(ms.begin(), ms.end())));
  return true;
}

void RunAccumulator::add(std::int64_t t, std::span<const EntityType> ms, FitnessValue f) {
  if (t < 1) throw ValidationError("time steps start at 1");
  advance_to(t);
  const double value = f.value();
  ++current_.event_count;
  current_.replicated_individuals += ms.size();
  current_.max_fitness = std::max(current_.max_fitness, value);
  current_.max_size = std::max(current_.max_size, static_cast<double>(ms.size()));
  fitness_sum_ += value;
  neglog_sum_ += neglog_transform(value);

  for (EntityType e : ms) {
    if (e >= seen_types_.size()) seen_types_.resize(static_cast<std::size_t>(e) + 1, 0);
    if (!seen_types_[e]) {
      seen_types_[e] = 1;
      ++individual_count_;
    }
  }
  if (insert_multiset(ms)) ++multiset_count_;
}

void RunAccumulator::on_step(const StepSummary& s) {
  if (s.t < 1) return;
  const auto index = static_cast<std::size_t>(s.t - 1);
  if (series_.population.size() <= index) series_.population.resize(index + 1);
  series_.population[index] = s.population_size;
}

RunSeries RunAccumulator::finish(std::int64_t horizon) {
  const std::int64_t from_population = static_cast<std::int64_t>(series_.population.size());
  const std::int64_t end = std::max({horizon, from_population, current_t_});
  if (end > current_t_) {
    advance_to(end);
  }
  close_step();
  series_.population.resize(series_.steps.size());
  for (std::size_t i = 0; i < series_.steps.size(); ++i) {
    auto& step = series_.steps[i];
    step.t = static_cast<std::int64_t>(i + 1);
    if (step.empty()) {
      step.max_fitness = step.mean_fitness = step.mean_neglog_fitness = std::numeric_limits<double>::quiet_NaN();
      step.max_size = step.mean_size = std::numeric_limits<double>::quiet_NaN();
    }
  }
  RunSeries out = std::move(series_);
  *this = RunAccumulator{};
  return out;
}

// --- event-list helpers -----------------------------------------------------

namespace {

RunSeries accumulate(std::span<const ReplicationEvent> events) {
  RunAccumulator acc;
  for (const auto& ev : events) acc.add(ev.t, ev.multiset.elements(), ev.fitness);
  return acc.finish();
}

}  // namespace

std::vector<StepAggregate> aggregate_run(std::span<const ReplicationEvent> events) {
  return accumulate(events).steps;
}

std::vector<std::uint64_t> cumulative_unique_individual_types(std::span<const ReplicationEvent> events) {
  return accumulate(events).unique_individual_types;
}

std::vector<std::uint64_t> cumulative_unique_multiset_types(std::span<const ReplicationEvent> events) {
  return accumulate(events).unique_multiset_types;
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::max_fitness: return "max_fitness_neglog";
    case Metric::mean_fitness: return "mean_fitness_neglog";
    case Metric::replicated_individuals: return "replicated_individuals";
    case Metric::max_size: return "max_size";
    case Metric::mean_size: return "mean_size";
    case Metric::unique_individual_types: return "unique_individual_types";
    case Metric::unique_multiset_types: return "unique_multiset_types";
    case Metric::population: return "population";
  }
  return "unknown";
}

Series extract_series(const RunSeries& run, Metric metric, bool transform_first) {
  Series out(run.horizon());
  for (std::size_t i = 0; i < run.horizon(); ++i) {
    const StepAggregate& s = run.steps[i];
    switch (metric) {
      case Metric::max_fitness:
        if (!s.empty()) out[i] = neglog_transform(s.max_fitness);
        break;
      case Metric::mean_fitness:
        if (!s.empty()) out[i] = transform_first ? s.mean_neglog_fitness : neglog_transform(s.mean_fitness);
        break;
      case Metric::replicated_individuals:
        out[i] = static_cast<double>(s.replicated_individuals);
        break;
      case Metric::max_size:
        if (!s.empty()) out[i] = s.max_size;
        break;
      case Metric::mean_size:
        if (!s.empty()) out[i] = s.mean_size;
        break;
      case Metric::unique_individual_types:
        out[i] = static_cast<double>(run.unique_individual_types[i]);
        break;
      case Metric::unique_multiset_types:
        out[i] = static_cast<double>(run.unique_multiset_types[i]);
        break;
      case Metric::population:
        if (i < run.population.size() && run.population[i]) out[i] = static_cast<double>(*run.population[i]);
        break;
    }
  }
  return out;
}

MeanSeries cross_run_mean(std::span<const Series> runs) {
  std::size_t horizon = 0;
  for (const auto& r : runs) horizon = std::max(horizon, r.size());
  MeanSeries out;
  out.mean.resize(horizon);
  out.contributors.assign(horizon, 0);
  for (std::size_t i = 0; i < horizon; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : runs) {
      if (i < r.size() && r[i]) {
        sum += *r[i];
        ++count;
      }
    }
    out.contributors[i] = count;
    if (count) out.mean[i] = sum / static_cast<double>(count);
  }
  return out;
}

// --- growth-model fitting ---------------------------------------------------

std::string_view model_name(GrowthModel m) {
  return m == GrowthModel::bounded ? "bounded" : "unbounded";
}

double growth_predictor(GrowthModel model, double t) {
  const double lt = std::log(t);
  return model == GrowthModel::bounded ? -1.0 / lt : lt;
}

double predict(const FitResult& fit, double t) { return fit.a * growth_predictor(fit.model, t) + fit.b; }

std::vector<std::int64_t> fit_abscissae(TimeRange range, const FitOptions& options) {
  std::vector<std::int64_t> ts;
  if (range.hi < range.lo) return ts;
  if (!options.log_resample || options.resample_points < 2) {
    for (std::int64_t t = range.lo; t <= range.hi; ++t) ts.push_back(t);
    return ts;
  }
  const double lo = std::log(static_cast<double>(range.lo));
  const double hi = std::log(static_cast<double>(range.hi));
  const auto last = static_cast<double>(options.resample_points - 1);
  for (std::size_t i = 0; i < options.resample_points; ++i) {
    const double t = std::exp(lo + (hi - lo) * static_cast<double>(i) / last);
    const auto rounded = std::clamp(static_cast<std::int64_t>(std::llround(t)), range.lo, range.hi);
    if (ts.empty() || ts.back() != rounded) ts.push_back(rounded);
  }
  return ts;
}

FitResult fit_growth(const Series& series, TimeRange t_range, GrowthModel model, const FitOptions& options) {
  if (t_range.lo < 2) throw ValidationError("fit range must start at t >= 2 so that ln t > 0");

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::int64_t t : fit_abscissae(t_range, options)) {
    const auto index = static_cast<std::size_t>(t - 1);
    if (index >= series.size() || !series[index]) continue;
    xs.push_back(growth_predictor(model, static_cast<double>(t)));
    ys.push_back(*series[index]);
  }
  if (xs.size() < 3) {
    throw ValidationError("growth fit needs at least 3 defined points, got " + std::to_string(xs.size()));
  }

  const auto n = static_cast<double>(xs.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= n;
  y_mean /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double tss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - x_mean;
    const double dy = ys[i] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    tss += dy * dy;
  }

  FitResult fit;
  fit.model = model;
  fit.t_range = t_range;
  fit.n_points = xs.size();

  const bool constant = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
  if (constant) {
    fit.a = 0.0;
    fit.b = ys.front();
  } else {
    fit.a = sxy / sxx;
    fit.b = y_mean - fit.a * x_mean;
  }

  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.a * xs[i] + fit.b);
    rss += r * r;
  }
  fit.rss = rss;
  if (constant) {
    fit.r_squared = std::numeric_limits<double>::quiet_NaN();
    fit.r_squared_defined = false;
  } else {
    fit.r_squared = 1.0 - rss / tss;
  }

  constexpr double k = 2.0;
  const double log_lik_term = n * std::log(2.0 * std::numbers::pi * rss / n) + n;
  fit.aic = log_lik_term + 2.0 * (k + 1.0);
  fit.bic = log_lik_term + (k + 1.0) * std::log(n);
  return fit;
}

ModelComparison compare_models(const Series& series, TimeRange t_range, const FitOptions& options) {
  ModelComparison c;
  c.bounded = fit_growth(series, t_range, GrowthModel::bounded, options);
  c.unbounded = fit_growth(series, t_range, GrowthModel::unbounded, options);
  c.delta_aic = c.unbounded.aic - c.bounded.aic;
  c.delta_bic = c.unbounded.bic - c.bounded.bic;
  c.verdict = c.unbounded.aic < c.bounded.aic ? GrowthModel::unbounded : GrowthModel::bounded;
  return c;
}

}  // namespace hashchem
