#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "hashchem/config.hpp"
#include "hashchem/events.hpp"

// Log format "hashchem-log/1": JSON Lines, optionally gzip-compressed.
//
//   line 1   {"k":"h","format":"hashchem-log/1","model":...,"seed":...,"run_id":...,"config":{...}}
//   then     {"k":"r","t":3,"ms":[1,1,3],"f":0.25000000}
//            {"k":"s","t":1,"n":10,"matches":5,"births":5,"deaths":0}
//
// Record keys appear in exactly this order with no whitespace. Fitness is
// printed as a fixed-point decimal with 8 fractional digits, so files are
// byte-identical across platforms.

namespace hashchem {

inline constexpr std::string_view kLogFormat = "hashchem-log/1";

struct LogHeader {
  std::string format{kLogFormat};
  std::string model;
  std::uint64_t seed = 0;
  std::int64_t run_id = 0;
  SpatialConfig config;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

using LogRecord = std::variant<ReplicationEvent, StepSummary>;

class LogIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A schema or syntax violation, tagged with its 1-based line number.
class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// <dir>/<model>_<seed>_<run_id>.jsonl, with ".gz" appended when compressed.
std::filesystem::path log_file_name(const std::filesystem::path& dir, std::string_view model,
                                    std::uint64_t seed, std::int64_t run_id, bool gzip);

/// f as "0.dddddddd": exact when m divides 10^8, otherwise rounded to nearest.
std::string format_fitness(FitnessValue f);

std::string format_header(const LogHeader& header);
std::string format_event(std::int64_t t, std::span<const EntityType> ms, FitnessValue f);
std::string format_event(const ReplicationEvent& ev);
std::string format_summary(const StepSummary& s);

/// Parses one body line. `s_max` bounds the multiset values.
LogRecord parse_record(std::string_view line, std::size_t line_no, EntityType s_max = kDefaultSMax);
LogHeader parse_header(std::string_view line);

/// Streams records to a file. Usable directly as the EventSink of a run.
class LogWriter final : public EventSink {
 public:
  LogWriter(const std::filesystem::path& path, const LogHeader& header, bool gzip);
  ~LogWriter() override;

  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  void write_event(const ReplicationEvent& ev);
  void write_summary(const StepSummary& s);

  void on_replication(std::int64_t t, const Multiset& copy, FitnessValue f) override;
  void on_step(const StepSummary& s) override;

  /// Flushes and closes; throws LogIoError on failure. Idempotent.
  void close();

 private:
  void flush_buffer();

  struct Handle;
  std::unique_ptr<Handle> handle_;
  std::string buffer_;
  std::filesystem::path path_;
};

/// Reads a log (plain or gzip) record by record, validating each line.
class LogReader {
 public:
  explicit LogReader(const std::filesystem::path& path);
  ~LogReader();

  LogReader(const LogReader&) = delete;
  LogReader& operator=(const LogReader&) = delete;

  const LogHeader& header() const noexcept { return header_; }

  /// Next record in file order, or nullopt at end of file.
  std::optional<LogRecord> next();

  std::size_t line() const noexcept { return line_no_; }

 private:
  bool read_line(std::string& out);

  struct Handle;
  std::unique_ptr<Handle> handle_;
  std::string chunk_;
  std::size_t chunk_pos_ = 0;
  bool eof_ = false;
  std::size_t line_no_ = 0;
  std::int64_t last_t_ = 0;
  LogHeader header_;
};

}  // namespace hashchem
