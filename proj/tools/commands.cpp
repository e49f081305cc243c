#include "commands.hpp"

#include <glob.h>
#include <pthread.h>
#include <sched.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "figures.hpp"
#include "hashchem/eventlog.hpp"
#include "hashchem/nonspatial.hpp"
#include "hashchem/spatial.hpp"

namespace hashchem::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_known_model(const std::string& model) { return model == "nonspatial" || model == "spatial"; }

std::vector<StepSummary> simulate(const std::string& model, const SpatialConfig& cfg, std::uint64_t run_index,
                                  EventSink* sink) {
  if (model == "spatial") return run_spatial(cfg, run_index, sink);
  return run(cfg, run_index, sink);
}

void print_summary(std::ostream& out, const StepSummary& s) {
  out << "t=" << s.t << " n=" << s.population_size << " matches=" << s.matches << " births=" << s.births
      << " deaths=" << s.deaths << " mutated=" << s.mutated_multisets << (s.extinct ? " extinct" : "") << '\n';
}

/// Runs one simulation into its log file; returns an exit code.
int run_to_file(const RunOptions& options, std::ostream& out, std::ostream& err, bool verbose) {
  if (!is_known_model(options.model)) {
    err << "error: unknown model '" << options.model << "'\n";
    return kExitInvalid;
  }
  try {
    validate_config(options.config);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  const auto path = run_log_path(options);
  try {
    std::filesystem::create_directories(options.out_dir);
    LogHeader header;
    header.model = options.model;
    header.seed = options.config.seed;
    header.run_id = static_cast<std::int64_t>(options.run_index);
    header.config = options.config;
    LogWriter writer(path, header, options.gzip);
    const auto summaries = simulate(options.model, options.config, options.run_index, &writer);
    writer.close();
    if (verbose) {
      out << path.string() << '\n';
      if (summaries.empty()) {
        out << "no iterations run\n";
      } else {
        print_summary(out, summaries.back());
      }
    }
  } catch (const LogIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  std::vector<std::filesystem::path> out;
  glob_t g{};
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

ordered_json fit_json(const FitResult& f) {
  ordered_json j;
  j["model"] = std::string(model_name(f.model));
  j["a"] = f.a;
  j["b"] = f.b;
  j["r_squared"] = f.r_squared_defined ? ordered_json(f.r_squared) : ordered_json(nullptr);
  j["aic"] = std::isfinite(f.aic) ? ordered_json(f.aic) : ordered_json(nullptr);
  j["bic"] = std::isfinite(f.bic) ? ordered_json(f.bic) : ordered_json(nullptr);
  j["rss"] = f.rss;
  j["n_points"] = f.n_points;
  j["t_range"] = {f.t_range.lo, f.t_range.hi};
  return j;
}

void summarize_timing(ModelTiming& m) {
  if (m.seconds.empty()) return;
  std::vector<double> sorted = m.seconds;
  std::sort(sorted.begin(), sorted.end());
  m.min = sorted.front();
  m.max = sorted.back();
  const std::size_t n = sorted.size();
  m.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  m.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
}

void pin_to_one_cpu(std::uint64_t slot) {
  cpu_set_t allowed;
  CPU_ZERO(&allowed);
  if (sched_getaffinity(0, sizeof allowed, &allowed) != 0) return;
  const int count = CPU_COUNT(&allowed);
  if (count <= 0) return;
  int target = static_cast<int>(slot % static_cast<std::uint64_t>(count));
  for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
    if (!CPU_ISSET(cpu, &allowed)) continue;
    if (target-- == 0) {
      cpu_set_t one;
      CPU_ZERO(&one);
      CPU_SET(cpu, &one);
      pthread_setaffinity_np(pthread_self(), sizeof one, &one);
      return;
    }
  }
}

}  // namespace

std::filesystem::path run_log_path(const RunOptions& options) {
  return log_file_name(options.out_dir, options.model, options.config.seed,
                       static_cast<std::int64_t>(options.run_index), options.gzip);
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return run_to_file(options, out, err, true);
}

int cmd_batch(const BatchOptions& options, std::ostream& out, std::ostream& err) {
  if (options.runs < 1) {
    err << "error: --runs must be >= 1\n";
    return kExitInvalid;
  }
  if (!is_known_model(options.base.model)) {
    err << "error: unknown model '" << options.base.model << "'\n";
    return kExitInvalid;
  }
  try {
    validate_config(options.base.config);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  std::atomic<std::uint64_t> next{0};
  std::mutex report_mutex;
  std::map<std::uint64_t, std::pair<int, std::string>> failures;

  auto worker = [&]() {
    for (std::uint64_t r = next++; r < options.runs; r = next++) {
      RunOptions one = options.base;
      one.run_index = r;
      std::ostringstream run_out;
      std::ostringstream run_err;
      const int code = run_to_file(one, run_out, run_err, false);
      if (code != kExitOk) {
        std::lock_guard lock(report_mutex);
        failures[r] = {code, run_err.str()};
      }
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  std::vector<std::jthread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  pool.clear();

  if (!failures.empty()) {
    for (const auto& [r, failure] : failures) err << "run " << r << " failed: " << failure.second;
    return failures.begin()->second.first;
  }
  out << "wrote " << options.runs << " logs to " << options.base.out_dir.string() << '\n';
  return kExitOk;
}

BenchReport run_bench(const BenchOptions& options) {
  BenchReport report;
  report.iterations = options.config.iterations;
  std::vector<std::string> models;
  if (options.models == "both" || options.models == "spatial") models.emplace_back("spatial");
  if (options.models == "both" || options.models == "nonspatial") models.emplace_back("nonspatial");

  for (const auto& model : models) {
    ModelTiming timing;
    timing.model = model;
    for (std::uint64_t r = 0; r < options.runs; ++r) {
      double seconds = 0.0;
      bool extinct = false;
      // One dedicated, pinned thread per run; logging is disabled via NullSink.
      std::thread worker([&]() {
        pin_to_one_cpu(r);
        NullSink sink;
        const auto start = std::chrono::steady_clock::now();
        const auto summaries = simulate(model, options.config, r, &sink);
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        extinct = !summaries.empty() && summaries.back().extinct;
      });
      worker.join();
      ++timing.attempted;
      if (extinct) {
        ++timing.extinct;
      } else {
        timing.seconds.push_back(seconds);
      }
    }
    summarize_timing(timing);
    report.models.push_back(std::move(timing));
  }

  const ModelTiming* spatial = nullptr;
  const ModelTiming* nonspatial = nullptr;
  for (const auto& m : report.models) {
    if (m.model == "spatial") spatial = &m;
    if (m.model == "nonspatial") nonspatial = &m;
  }
  if (spatial && nonspatial && !spatial->seconds.empty() && !nonspatial->seconds.empty() && nonspatial->mean > 0) {
    report.speedup = spatial->mean / nonspatial->mean;
  }
  return report;
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  if (options.models != "both" && options.models != "spatial" && options.models != "nonspatial") {
    err << "error: --models must be both, spatial or nonspatial\n";
    return kExitInvalid;
  }
  if (options.runs < 1) {
    err << "error: --runs must be >= 1\n";
    return kExitInvalid;
  }
  try {
    validate_config(options.config);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  const BenchReport report = run_bench(options);
  ordered_json j;
  j["iterations"] = report.iterations;
  j["models"] = ordered_json::array();
  for (const auto& m : report.models) {
    out << m.model << ": runs=" << m.attempted << " extinct(excluded)=" << m.extinct;
    if (!m.seconds.empty()) {
      out << " min=" << m.min << "s median=" << m.median << "s mean=" << m.mean << "s max=" << m.max << 's';
    }
    out << '\n';
    ordered_json mj;
    mj["model"] = m.model;
    mj["runs"] = m.attempted;
    mj["extinct_excluded"] = m.extinct;
    mj["seconds"] = m.seconds;
    mj["min"] = m.min;
    mj["median"] = m.median;
    mj["mean"] = m.mean;
    mj["max"] = m.max;
    j["models"].push_back(mj);
  }
  if (report.speedup) {
    out << "speed-up (mean spatial / mean nonspatial): " << *report.speedup << "x\n";
    j["speedup"] = *report.speedup;
  } else {
    j["speedup"] = nullptr;
  }
  if (options.json_out) {
    std::ofstream f(*options.json_out);
    if (!f) {
      err << "error: cannot write " << options.json_out->string() << '\n';
      return kExitIo;
    }
    f << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  const auto files = expand_glob(options.logs);
  if (files.empty()) {
    err << "error: no logs match '" << options.logs << "'\n";
    return kExitInvalid;
  }

  std::vector<std::string> names;
  std::vector<RunSeries> runs;
  ordered_json parse_errors = ordered_json::array();
  for (const auto& path : files) {
    try {
      LogReader reader(path);
      RunAccumulator acc;
      while (auto rec = reader.next()) {
        if (const auto* ev = std::get_if<ReplicationEvent>(&*rec)) {
          acc.add(ev->t, ev->multiset.elements(), ev->fitness);
        } else {
          acc.on_step(std::get<StepSummary>(*rec));
        }
      }
      runs.push_back(acc.finish(static_cast<std::int64_t>(reader.header().config.iterations)));
      std::string name = path.filename().string();
      for (const char* suffix : {".gz", ".jsonl"}) {
        if (name.ends_with(suffix)) name.resize(name.size() - std::char_traits<char>::length(suffix));
      }
      names.push_back(name);
    } catch (const std::exception& e) {
      err << path.string() << ": " << e.what() << '\n';
      parse_errors.push_back({{"file", path.string()}, {"error", e.what()}});
    }
  }
  if (runs.empty()) {
    err << "error: none of the matched logs could be parsed\n";
    return kExitInvalid;
  }

  struct Figure {
    const char* file;
    Metric metric;
  };
  const Figure figures[] = {
      {"fig2_max_fitness.csv", Metric::max_fitness},
      {"fig2_mean_fitness.csv", Metric::mean_fitness},
      {"fig3_replicated_individuals.csv", Metric::replicated_individuals},
      {"fig4_max_size.csv", Metric::max_size},
      {"fig4_mean_size.csv", Metric::mean_size},
      {"fig6_unique_individual_types.csv", Metric::unique_individual_types},
      {"fig6_unique_multiset_types.csv", Metric::unique_multiset_types},
      {"population.csv", Metric::population},
  };

  ordered_json report;
  report["runs"] = runs.size();
  report["low_sample"] = runs.size() < 2;
  report["fit_range"] = {options.fit_range.lo, options.fit_range.hi};
  report["log_resample"] = options.fit.log_resample;
  report["fitness_transform"] = options.transform_first ? "transform_first" : "transform_last";
  report["series"] = ordered_json::object();

  try {
    std::filesystem::create_directories(options.out_dir);
    for (const auto& fig : figures) {
      std::vector<Series> per_run;
      per_run.reserve(runs.size());
      for (const auto& r : runs) per_run.push_back(extract_series(r, fig.metric, options.transform_first));
      const MeanSeries mean = cross_run_mean(per_run);
      write_csv(options.out_dir / fig.file, make_figure_table(names, per_run, mean));

      if (fig.metric == Metric::max_size || fig.metric == Metric::mean_size) {
        ordered_json entry;
        try {
          const ModelComparison c = compare_models(mean.mean, options.fit_range, options.fit);
          entry["bounded"] = fit_json(c.bounded);
          entry["unbounded"] = fit_json(c.unbounded);
          entry["verdict"] = std::string(model_name(c.verdict));
          entry["delta_aic"] = c.delta_aic;
          entry["delta_bic"] = c.delta_bic;
          out << metric_name(fig.metric) << ": verdict " << model_name(c.verdict) << " (AIC bounded "
              << c.bounded.aic << ", unbounded " << c.unbounded.aic << "; unbounded a=" << c.unbounded.a
              << ")\n";
        } catch (const ValidationError& e) {
          entry["error"] = e.what();
          err << metric_name(fig.metric) << ": fit skipped: " << e.what() << '\n';
        }
        report["series"][std::string(metric_name(fig.metric))] = entry;
      }
    }
    report["parse_errors"] = parse_errors;
    std::ofstream f(options.out_dir / "fit_report.json");
    if (!f) throw std::runtime_error("cannot write fit_report.json");
    f << report.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  if (runs.size() < 2) out << "note: single run analysed (low sample)\n";
  out << "analysed " << runs.size() << " run(s); outputs in " << options.out_dir.string() << '\n';
  return kExitOk;
}

int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err) {
  FigureTable table;
  try {
    table = read_csv(options.csv);
  } catch (const CsvError& e) {
    err << "error: " << options.csv.string() << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  bool log_x = true;
  if (options.x_scale == "linear") {
    log_x = false;
  } else if (options.x_scale == "auto") {
    log_x = !options.csv.filename().string().starts_with("fig6");
  } else if (options.x_scale != "log") {
    err << "error: --x-scale must be auto, log or linear\n";
    return kExitInvalid;
  }
  auto target = options.out;
  if (target.empty()) target = std::filesystem::path(options.csv).replace_extension(".svg");
  std::ofstream f(target, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << target.string() << '\n';
    return kExitIo;
  }
  f << render_svg(table, log_x, options.csv.stem().string());
  if (!f) {
    err << "error: write failed on " << target.string() << '\n';
    return kExitIo;
  }
  out << target.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

/// Registers --<field> for every configuration key on `cmd`.
void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : config_fields(SpatialConfig{})) {
    cmd->add_option_function<std::string>(
        "--" + key, [&overrides, key = key](const std::string& v) { overrides[key] = v; },
        "override config field " + key + " (default " + value + ")");
  }
}

SpatialConfig build_config(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
  SpatialConfig cfg;
  if (!config_path.empty()) load_config_file(config_path, cfg);
  for (const auto& [key, value] : overrides) set_config_field(cfg, key, value);
  return cfg;
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("HASHCHEM_OUT"); env && *env) return env;
  return ".";
}

TimeRange parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--fit-range", "expected LO:HI");
  try {
    TimeRange r{std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1))};
    if (r.lo < 2 || r.hi < r.lo) throw CLI::ValidationError("--fit-range", "need 2 <= LO <= HI");
    return r;
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--fit-range", "expected integers LO:HI");
  }
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-spatial and spatial Hash Chemistry simulator and analysis toolkit", "hashchem"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  RunOptions run_opts;
  std::string out_dir;
  BatchOptions batch_opts;
  BenchOptions bench_opts;
  AnalyzeOptions analyze_opts;
  std::string fit_range = "100:2000";
  PlotOptions plot_opts;

  auto* run_cmd = app.add_subcommand("run", "run one simulation and write its event log");
  run_cmd->add_option("--model", run_opts.model, "nonspatial or spatial")->capture_default_str();
  run_cmd->add_option("--run-index", run_opts.run_index, "run index within the seed's stream family");
  run_cmd->add_option("--out", out_dir, "output directory (default $HASHCHEM_OUT or .)");
  run_cmd->add_flag("--gzip", run_opts.gzip, "gzip-compress the log");
  run_cmd->add_option("--config", config_path, "flat key = value config file");
  add_config_flags(run_cmd, overrides);

  auto* batch_cmd = app.add_subcommand("batch", "run N seeded simulations, run_index 0..N-1");
  batch_cmd->add_option("--runs", batch_opts.runs, "number of runs")->capture_default_str();
  batch_cmd->add_option("--jobs", batch_opts.jobs, "concurrent runs")->capture_default_str();
  batch_cmd->add_option("--model", batch_opts.base.model, "nonspatial or spatial")->capture_default_str();
  batch_cmd->add_option("--out", out_dir, "output directory (default $HASHCHEM_OUT or .)");
  batch_cmd->add_flag("--gzip", batch_opts.base.gzip, "gzip-compress the logs");
  batch_cmd->add_option("--config", config_path, "flat key = value config file");
  add_config_flags(batch_cmd, overrides);

  auto* bench_cmd = app.add_subcommand("bench", "time full runs of each model with logging disabled");
  bench_cmd->add_option("--runs", bench_opts.runs, "runs per model")->capture_default_str();
  bench_cmd->add_option("--models", bench_opts.models, "both, spatial or nonspatial")->capture_default_str();
  std::string bench_json;
  bench_cmd->add_option("--json", bench_json, "also write the report as JSON");
  bench_cmd->add_option("--config", config_path, "flat key = value config file");
  add_config_flags(bench_cmd, overrides);

  auto* analyze_cmd = app.add_subcommand("analyze", "figure CSVs and growth-model fits from logs");
  analyze_cmd->add_option("--logs", analyze_opts.logs, "glob of log files")->required();
  analyze_cmd->add_option("--out", out_dir, "output directory (default $HASHCHEM_OUT or .)");
  analyze_cmd->add_option("--fit-range", fit_range, "LO:HI time window for the fits")->capture_default_str();
  analyze_cmd->add_flag("--log-resample", analyze_opts.fit.log_resample, "fit on ~101 log-spaced points");
  analyze_cmd->add_flag("--transform-first", analyze_opts.transform_first,
                        "average -log10(1-f) per step instead of transforming the mean");

  auto* plot_cmd = app.add_subcommand("plot", "render a figure CSV as SVG");
  plot_cmd->add_option("--csv", plot_opts.csv, "CSV written by analyze")->required();
  plot_cmd->add_option("--out", plot_opts.out, "SVG path (default: CSV path with .svg)");
  plot_cmd->add_option("--x-scale", plot_opts.x_scale, "auto, log or linear")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  SpatialConfig cfg;
  try {
    cfg = build_config(config_path, overrides);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }
  const std::filesystem::path out_path = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);

  if (*run_cmd) {
    run_opts.config = cfg;
    run_opts.out_dir = out_path;
    return cmd_run(run_opts, out, err);
  }
  if (*batch_cmd) {
    batch_opts.base.config = cfg;
    batch_opts.base.out_dir = out_path;
    return cmd_batch(batch_opts, out, err);
  }
  if (*bench_cmd) {
    bench_opts.config = cfg;
    if (!bench_json.empty()) bench_opts.json_out = bench_json;
    return cmd_bench(bench_opts, out, err);
  }
  if (*analyze_cmd) {
    try {
      analyze_opts.fit_range = parse_range(fit_range);
    } catch (const CLI::ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
    analyze_opts.out_dir = out_path;
    return cmd_analyze(analyze_opts, out, err);
  }
  return cmd_plot(plot_opts, out, err);
}

}  // namespace hashchem::cli
