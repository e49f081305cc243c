#include "hashchem/eventlog.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

namespace hashchem {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kFixedPointScale = 100'000'000;

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_fitness(std::string& out, FitnessValue f) {
  std::uint64_t digits = 0;
  if (kFixedPointScale % f.modulus() == 0) {
    digits = f.numerator() * (kFixedPointScale / f.modulus());
  } else {
    const auto scaled = static_cast<__uint128_t>(f.numerator()) * kFixedPointScale + f.modulus() / 2;
    digits = static_cast<std::uint64_t>(scaled / f.modulus());
    if (digits >= kFixedPointScale) digits = kFixedPointScale - 1;
  }
  char buf[9];
  for (int i = 7; i >= 0; --i) {
    buf[i] = static_cast<char>('0' + digits % 10);
    digits /= 10;
  }
  out.append("0.");
  out.append(buf, 8);
}

void append_event(std::string& out, std::int64_t t, std::span<const EntityType> ms, FitnessValue f) {
  out.append(R"({"k":"r","t":)");
  append_int(out, t);
  out.append(R"(,"ms":[)");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) out.push_back(',');
    append_uint(out, ms[i]);
  }
  out.append(R"(],"f":)");
  append_fitness(out, f);
  out.append("}\n");
}

void append_summary(std::string& out, const StepSummary& s) {
  out.append(R"({"k":"s","t":)");
  append_int(out, s.t);
  out.append(R"(,"n":)");
  append_uint(out, s.population_size);
  out.append(R"(,"matches":)");
  append_uint(out, s.matches);
  out.append(R"(,"births":)");
  append_uint(out, s.births);
  out.append(R"(,"deaths":)");
  append_uint(out, s.deaths);
  out.append("}\n");
}

// Strict parser for the exact byte layout produced above. Anything else falls
// back to the general JSON path.
class FastCursor {
 public:
  explicit FastCursor(std::string_view s) : s_(s) {}

  bool literal(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }
  template <class T>
  bool integer(T& v) {
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) return false;
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return true;
  }
  bool fixed8(std::uint64_t& digits) {
    if (!literal("0.")) return false;
    if (pos_ + 8 > s_.size()) return false;
    digits = 0;
    for (int i = 0; i < 8; ++i) {
      const char c = s_[pos_ + i];
      if (c < '0' || c > '9') return false;
      digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
    }
    pos_ += 8;
    return true;
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool done() const { return pos_ == s_.size(); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

struct RawEvent {
  std::int64_t t = 0;
  std::vector<EntityType> ms;
  FitnessValue f;
};

bool fast_event(std::string_view line, RawEvent& ev) {
  FastCursor c(line);
  if (!c.literal(R"({"k":"r","t":)") || !c.integer(ev.t) || !c.literal(R"(,"ms":[)")) return false;
  ev.ms.clear();
  if (!c.peek(']')) {
    do {
      EntityType e = 0;
      if (!c.integer(e)) return false;
      ev.ms.push_back(e);
    } while (c.literal(","));
  }
  std::uint64_t digits = 0;
  if (!c.literal(R"(],"f":)") || !c.fixed8(digits) || !c.literal("}") || !c.done()) return false;
  ev.f = FitnessValue(digits, kFixedPointScale);
  return true;
}

bool fast_summary(std::string_view line, StepSummary& s) {
  FastCursor c(line);
  return c.literal(R"({"k":"s","t":)") && c.integer(s.t) && c.literal(R"(,"n":)") &&
         c.integer(s.population_size) && c.literal(R"(,"matches":)") && c.integer(s.matches) &&
         c.literal(R"(,"births":)") && c.integer(s.births) && c.literal(R"(,"deaths":)") &&
         c.integer(s.deaths) && c.literal("}") && c.done();
}

template <class T>
T require_integer(const nlohmann::json& obj, const char* key, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw LogFormatError(line_no, std::string("missing or non-integer field \"") + key + "\"");
  }
  if constexpr (std::is_unsigned_v<T>) {
    if (it->is_number_unsigned()) return it->template get<T>();
    if (it->template get<std::int64_t>() < 0) {
      throw LogFormatError(line_no, std::string("negative field \"") + key + "\"");
    }
  }
  return it->template get<T>();
}

bool general_record(std::string_view line, std::size_t line_no, RawEvent& ev, StepSummary& s) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw LogFormatError(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw LogFormatError(line_no, "record is not a JSON object");
  const auto kind = obj.find("k");
  if (kind == obj.end() || !kind->is_string()) throw LogFormatError(line_no, "missing record kind \"k\"");
  if (*kind == "r") {
    ev.t = require_integer<std::int64_t>(obj, "t", line_no);
    const auto ms = obj.find("ms");
    if (ms == obj.end() || !ms->is_array()) throw LogFormatError(line_no, "missing multiset \"ms\"");
    ev.ms.clear();
    for (const auto& e : *ms) {
      if (!e.is_number_unsigned()) throw LogFormatError(line_no, "multiset element is not a positive integer");
      ev.ms.push_back(e.get<EntityType>());
    }
    const auto f = obj.find("f");
    if (f == obj.end() || !f->is_number()) throw LogFormatError(line_no, "missing fitness \"f\"");
    const double value = f->get<double>();
    if (!(value >= 0.0 && value < 1.0)) throw LogFormatError(line_no, "fitness outside [0, 1)");
    ev.f = FitnessValue(static_cast<std::uint64_t>(std::llround(value * kFixedPointScale)), kFixedPointScale);
    return true;
  }
  if (*kind == "s") {
    s.t = require_integer<std::int64_t>(obj, "t", line_no);
    s.population_size = require_integer<std::uint64_t>(obj, "n", line_no);
    s.matches = require_integer<std::uint64_t>(obj, "matches", line_no);
    s.births = require_integer<std::uint64_t>(obj, "births", line_no);
    s.deaths = require_integer<std::uint64_t>(obj, "deaths", line_no);
    return false;
  }
  throw LogFormatError(line_no, "unknown record kind");
}

ordered_json config_json(const SpatialConfig& cfg) {
  ordered_json out = ordered_json::object();
  for (const auto& [key, text] : config_fields(cfg)) out[key] = ordered_json::parse(text);
  return out;
}

}  // namespace

std::filesystem::path log_file_name(const std::filesystem::path& dir, std::string_view model,
                                    std::uint64_t seed, std::int64_t run_id, bool gzip) {
  std::string name(model);
  name += '_' + std::to_string(seed) + '_' + std::to_string(run_id) + ".jsonl";
  if (gzip) name += ".gz";
  return dir / name;
}

std::string format_fitness(FitnessValue f) {
  std::string out;
  append_fitness(out, f);
  return out;
}

std::string format_header(const LogHeader& header) {
  ordered_json j;
  j["k"] = "h";
  j["format"] = header.format;
  j["model"] = header.model;
  j["seed"] = header.seed;
  j["run_id"] = header.run_id;
  j["config"] = config_json(header.config);
  return j.dump() + "\n";
}

std::string format_event(std::int64_t t, std::span<const EntityType> ms, FitnessValue f) {
  std::string out;
  append_event(out, t, ms, f);
  return out;
}

std::string format_event(const ReplicationEvent& ev) {
  return format_event(ev.t, ev.multiset.elements(), ev.fitness);
}

std::string format_summary(const StepSummary& s) {
  std::string out;
  append_summary(out, s);
  return out;
}

LogRecord parse_record(std::string_view line, std::size_t line_no, EntityType s_max) {
  RawEvent raw;
  StepSummary summary;
  bool is_event = false;
  if (fast_event(line, raw)) {
    is_event = true;
  } else if (!fast_summary(line, summary)) {
    summary = StepSummary{};
    is_event = general_record(line, line_no, raw, summary);
  }

  if (!is_event) {
    summary.extinct = summary.population_size == 0;
    return summary;
  }
  if (raw.ms.empty()) throw LogFormatError(line_no, "empty multiset");
  for (std::size_t i = 0; i < raw.ms.size(); ++i) {
    if (raw.ms[i] < 1 || raw.ms[i] > s_max) throw LogFormatError(line_no, "multiset element out of range");
    if (i && raw.ms[i] < raw.ms[i - 1]) throw LogFormatError(line_no, "multiset not sorted ascending");
  }
  ReplicationEvent ev;
  ev.t = raw.t;
  ev.multiset = make_multiset_unchecked(std::move(raw.ms));
  ev.fitness = raw.f;
  return ev;
}

LogHeader parse_header(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw LogFormatError(1, std::string("malformed header: ") + e.what());
  }
  if (!j.is_object() || j.value("k", "") != "h") throw LogFormatError(1, "first line is not a log header");
  LogHeader h;
  h.format = j.value("format", "");
  if (h.format != kLogFormat) throw LogFormatError(1, "unsupported log format '" + h.format + "'");
  try {
    h.model = j.at("model").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.run_id = j.at("run_id").get<std::int64_t>();
    for (const auto& [key, value] : j.at("config").items()) {
      set_config_field(h.config, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  } catch (const nlohmann::json::exception& e) {
    throw LogFormatError(1, std::string("bad header field: ") + e.what());
  } catch (const ConfigError& e) {
    throw LogFormatError(1, std::string("bad header config: ") + e.what());
  }
  return h;
}

// ---------------------------------------------------------------------------

struct LogWriter::Handle {
  gzFile file = nullptr;
};

LogWriter::LogWriter(const std::filesystem::path& path, const LogHeader& header, bool gzip)
    : handle_(std::make_unique<Handle>()), path_(path) {
  handle_->file = gzopen(path.c_str(), gzip ? "wb6" : "wbT");
  if (!handle_->file) throw LogIoError("cannot open " + path.string() + " for writing");
  buffer_ = format_header(header);
}

LogWriter::~LogWriter() {
  try {
    close();
  } catch (...) {
  }
}

void LogWriter::flush_buffer() {
  if (buffer_.empty()) return;
  const auto written = gzwrite(handle_->file, buffer_.data(), static_cast<unsigned>(buffer_.size()));
  if (written != static_cast<int>(buffer_.size())) throw LogIoError("write failed on " + path_.string());
  buffer_.clear();
}

void LogWriter::write_event(const ReplicationEvent& ev) {
  append_event(buffer_, ev.t, ev.multiset.elements(), ev.fitness);
  if (buffer_.size() >= (1u << 20)) flush_buffer();
}

void LogWriter::write_summary(const StepSummary& s) {
  append_summary(buffer_, s);
  if (buffer_.size() >= (1u << 20)) flush_buffer();
}

void LogWriter::on_replication(std::int64_t t, const Multiset& copy, FitnessValue f) {
  append_event(buffer_, t, copy.elements(), f);
  if (buffer_.size() >= (1u << 20)) flush_buffer();
}

void LogWriter::on_step(const StepSummary& s) { write_summary(s); }

void LogWriter::close() {
  if (!handle_ || !handle_->file) return;
  flush_buffer();
  const int rc = gzclose(handle_->file);
  handle_->file = nullptr;
  if (rc != Z_OK) throw LogIoError("close failed on " + path_.string());
}

// ---------------------------------------------------------------------------

struct LogReader::Handle {
  gzFile file = nullptr;
  ~Handle() {
    if (file) gzclose(file);
  }
};

LogReader::LogReader(const std::filesystem::path& path) : handle_(std::make_unique<Handle>()) {
  handle_->file = gzopen(path.c_str(), "rb");
  if (!handle_->file) throw LogIoError("cannot open " + path.string());
  gzbuffer(handle_->file, 1u << 17);
  std::string line;
  if (!read_line(line)) throw LogFormatError(1, "missing header");
  header_ = parse_header(line);
}

LogReader::~LogReader() = default;

bool LogReader::read_line(std::string& out) {
  out.clear();
  while (true) {
    const auto nl = chunk_.find('\n', chunk_pos_);
    if (nl != std::string::npos) {
      out.append(chunk_, chunk_pos_, nl - chunk_pos_);
      chunk_pos_ = nl + 1;
      ++line_no_;
      return true;
    }
    out.append(chunk_, chunk_pos_, std::string::npos);
    chunk_.clear();
    chunk_pos_ = 0;
    if (eof_) {
      if (out.empty()) return false;
      ++line_no_;
      throw LogFormatError(line_no_, "truncated record (no terminating newline)");
    }
    chunk_.resize(1u << 16);
    const int got = gzread(handle_->file, chunk_.data(), static_cast<unsigned>(chunk_.size()));
    if (got < 0) throw LogIoError("read error");
    chunk_.resize(static_cast<std::size_t>(got));
    if (got == 0) eof_ = true;
  }
}

std::optional<LogRecord> LogReader::next() {
  std::string line;
  if (!read_line(line)) return std::nullopt;
  LogRecord rec = parse_record(line, line_no_, header_.config.s_max);
  const std::int64_t t = std::visit([](const auto& r) { return r.t; }, rec);
  if (t < last_t_) throw LogFormatError(line_no_, "time step decreases");
  last_t_ = t;
  if (auto* ev = std::get_if<ReplicationEvent>(&rec)) ev->run_id = header_.run_id;
  return rec;
}

}  // namespace hashchem
