#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hashchem/analysis.hpp"
#include "hashchem/config.hpp"

namespace hashchem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

struct RunOptions {
  std::string model = "nonspatial";  // or "spatial"
  SpatialConfig config;
  std::uint64_t run_index = 0;
  std::filesystem::path out_dir = ".";
  bool gzip = false;
};

struct BatchOptions {
  RunOptions base;
  std::uint64_t runs = 1;
  unsigned jobs = 1;
};

struct BenchOptions {
  std::uint64_t runs = 20;
  std::string models = "both";  // both | nonspatial | spatial
  SpatialConfig config;
  std::optional<std::filesystem::path> json_out;
};

struct ModelTiming {
  std::string model;
  std::vector<double> seconds;  // completed, non-extinct runs only
  std::uint64_t attempted = 0;
  std::uint64_t extinct = 0;
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct BenchReport {
  std::vector<ModelTiming> models;
  std::optional<double> speedup;  // mean spatial / mean nonspatial
  std::uint64_t iterations = 0;
};

struct AnalyzeOptions {
  std::string logs;  // glob pattern
  std::filesystem::path out_dir = ".";
  TimeRange fit_range;
  FitOptions fit;
  bool transform_first = false;
};

struct PlotOptions {
  std::filesystem::path csv;
  std::filesystem::path out;
  std::string x_scale = "auto";  // auto | log | linear
};

/// Path of the log cmd_run writes for these options.
std::filesystem::path run_log_path(const RunOptions& options);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_batch(const BatchOptions& options, std::ostream& out, std::ostream& err);
BenchReport run_bench(const BenchOptions& options);
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] is the program name).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hashchem::cli
