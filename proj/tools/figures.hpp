#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashchem/analysis.hpp"

namespace hashchem::cli {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tidy figure table: a `t` column, one column per run, then `mean`.
struct FigureTable {
  std::vector<std::string> columns;  // excludes "t"
  std::vector<std::int64_t> t;
  std::vector<std::vector<std::optional<double>>> values;  // values[row][column]
};

FigureTable make_figure_table(std::span<const std::string> run_names, std::span<const Series> runs,
                              const MeanSeries& mean);

std::string format_csv(const FigureTable& table);
void write_csv(const std::filesystem::path& path, const FigureTable& table);

/// Throws CsvError on a missing `t` column, ragged rows, unparsable cells or
/// an empty body.
FigureTable parse_csv(const std::string& text);
FigureTable read_csv(const std::filesystem::path& path);

/// Static line chart: thin red curves per run, a black mean curve.
std::string render_svg(const FigureTable& table, bool log_x, const std::string& title);

}  // namespace hashchem::cli
