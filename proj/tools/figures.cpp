#include "figures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hashchem::cli {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

FigureTable make_figure_table(std::span<const std::string> run_names, std::span<const Series> runs,
                              const MeanSeries& mean) {
  FigureTable table;
  table.columns.assign(run_names.begin(), run_names.end());
  table.columns.emplace_back("mean");
  const std::size_t horizon = mean.mean.size();
  for (std::size_t i = 0; i < horizon; ++i) {
    table.t.push_back(static_cast<std::int64_t>(i + 1));
    std::vector<std::optional<double>> row;
    row.reserve(runs.size() + 1);
    for (const auto& r : runs) row.push_back(i < r.size() ? r[i] : std::nullopt);
    row.push_back(mean.mean[i]);
    table.values.push_back(std::move(row));
  }
  return table;
}

std::string format_csv(const FigureTable& table) {
  std::string out = "t";
  for (const auto& c : table.columns) out += ',' + c;
  out += '\n';
  for (std::size_t r = 0; r < table.t.size(); ++r) {
    out += std::to_string(table.t[r]);
    for (const auto& v : table.values[r]) {
      out += ',';
      if (v) out += format_number(*v);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const FigureTable& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << format_csv(table);
  if (!f) throw std::runtime_error("write failed on " + path.string());
}

FigureTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line, ',');
  if (header.empty() || header.front() != "t") throw CsvError("first column must be 't'");
  FigureTable table;
  table.columns.assign(header.begin() + 1, header.end());
  if (table.columns.empty()) throw CsvError("no data columns");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                     " cells, got " + std::to_string(cells.size()));
    }
    std::int64_t t = 0;
    {
      const auto& c = cells.front();
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), t);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw CsvError("line " + std::to_string(line_no) + ": bad t value '" + c + "'");
      }
    }
    std::vector<std::optional<double>> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto& c = cells[i];
      if (c.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw CsvError("line " + std::to_string(line_no) + ": bad number '" + c + "'");
      }
      row.emplace_back(v);
    }
    table.t.push_back(t);
    table.values.push_back(std::move(row));
  }
  if (table.t.empty()) throw CsvError("no data rows");
  return table;
}

FigureTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::string render_svg(const FigureTable& table, bool log_x, const std::string& title) {
  constexpr double width = 800.0;
  constexpr double height = 500.0;
  constexpr double left = 70.0;
  constexpr double right = 20.0;
  constexpr double top = 40.0;
  constexpr double bottom = 50.0;

  auto x_of = [&](std::int64_t t) { return log_x ? std::log10(static_cast<double>(t)) : static_cast<double>(t); };

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (std::size_t r = 0; r < table.t.size(); ++r) {
    if (log_x && table.t[r] <= 0) continue;
    const double x = x_of(table.t[r]);
    bool any = false;
    for (const auto& v : table.values[r]) {
      if (!v || !std::isfinite(*v)) continue;
      y_lo = std::min(y_lo, *v);
      y_hi = std::max(y_hi, *v);
      any = true;
    }
    if (any) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }

  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::string svg;
  svg += R"(<svg xmlns="http://www.w3.org/2000/svg" width="800" height="500" viewBox="0 0 800 500">)" "\n";
  svg += R"(<rect width="800" height="500" fill="white"/>)" "\n";
  svg += R"(<text x="400" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">)" +
         escape_xml(title) + "</text>\n";
  svg += "<rect x=\"" + format_coord(left) + "\" y=\"" + format_coord(top) + "\" width=\"" +
         format_coord(plot_w) + "\" height=\"" + format_coord(plot_h) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // x ticks: decades on a log axis, five even steps otherwise.
  std::vector<std::pair<double, std::string>> ticks;
  if (log_x) {
    for (int d = static_cast<int>(std::ceil(x_lo)); d <= static_cast<int>(std::floor(x_hi)); ++d) {
      ticks.emplace_back(d, format_number(std::pow(10.0, d)));
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / 4.0;
      ticks.emplace_back(x, format_number(std::round(x)));
    }
  }
  for (const auto& [x, label] : ticks) {
    svg += "<line x1=\"" + format_coord(px(x)) + "\" y1=\"" + format_coord(top + plot_h) + "\" x2=\"" +
           format_coord(px(x)) + "\" y2=\"" + format_coord(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_coord(px(x)) + "\" y=\"" + format_coord(top + plot_h + 20) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 4.0;
    svg += "<text x=\"" + format_coord(left - 6) + "\" y=\"" + format_coord(py(y) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" + format_number(y) + "</text>\n";
  }
  svg += "<text x=\"400\" y=\"" + format_coord(height - 10) +
         R"(" font-family="sans-serif" font-size="13" text-anchor="middle">)" +
         std::string(log_x ? "t (log scale)" : "t") + "</text>\n";

  const std::size_t columns = table.columns.size();
  for (std::size_t c = 0; c < columns; ++c) {
    const bool is_mean = table.columns[c] == "mean";
    const std::string style = is_mean ? R"(fill="none" stroke="black" stroke-width="2")"
                                      : R"(fill="none" stroke="red" stroke-width="0.5" stroke-opacity="0.6")";
    std::string points;
    auto flush = [&]() {
      if (!points.empty()) svg += "<polyline " + style + " points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (std::size_t r = 0; r < table.t.size(); ++r) {
      const auto& v = table.values[r][c];
      if (!v || !std::isfinite(*v) || (log_x && table.t[r] <= 0)) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += format_coord(px(x_of(table.t[r]))) + "," + format_coord(py(*v));
    }
    flush();
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace hashchem::cli
