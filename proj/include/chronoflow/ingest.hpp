#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "chronoflow/types.hpp"

namespace chronoflow::ingest {

enum class TimeFormat { epoch_seconds, epoch_millis, datetime_pattern };

// Which column holds the timestamp: a 0-based index, or a header name (in
// which case the first line of the input is treated as the header row).
using FieldSelector = std::variant<std::size_t, std::string>;

struct TimeFieldSpec {
  FieldSelector field = std::size_t{0};
  TimeFormat format = TimeFormat::epoch_seconds;
  // Tokens YYYY MM DD HH MM SS; the first MM is the month, the second the
  // minute. Any other character must match literally.
  std::string pattern;
  // Local wall clock = UTC + tz_offset_minutes.
  int tz_offset_minutes = 0;

  // Throws ConfigError if the pattern lacks a component or the offset is
  // outside [-14h, +14h].
  void validate() const;
};

constexpr int kMaxTzOffsetMinutes = 14 * 60;

// Parses "+HH:MM" / "-HH:MM" / "Z" into signed minutes.
int parse_tz_offset(const std::string& text);

// Parses the CLI time format grammar: epoch | epoch-ms | pattern:STR.
TimeFieldSpec parse_time_format(const std::string& text);

// Throws ParseError / RangeError; `context` is prepended to messages.
EpochSeconds parse_time(std::string_view raw, const TimeFieldSpec& spec,
                        std::string_view context = {});

// Days since 1970-01-01 of a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

struct Schema {
  char delimiter = '\t';
  TimeFieldSpec time;
};

struct IngestStats {
  std::size_t input_lines = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::size_t header_lines = 0;
};

struct IngestResult {
  StreamSegment segment;
  IngestStats stats;
};

// Reads newline-delimited records. Lines that fail to parse are written
// verbatim to `rejects` (when given) and counted. Throws EmptyInputError if
// no line parses, ConfigError if declared_span < 1.
IngestResult ingest(std::istream& source, const Schema& schema,
                    std::optional<std::int64_t> declared_span,
                    std::ostream* rejects = nullptr,
                    std::ostream* diagnostics = nullptr);

struct SyntheticSpec {
  std::int64_t span = 86400;
  double mean_rate = 25.0;
  double diurnal_amplitude = 0.0;
  std::uint64_t seed = 0;
  EpochSeconds start = 1212249600;  // 2008-06-01 00:00 at +08:00

  void validate() const;
};

// Poisson arrivals per second with a sinusoidal day cycle. The payload
// carries a global sequence number so downstream losses are detectable. A
// sparse draw can produce an empty segment (t_min = t_max = start).
StreamSegment generate_synthetic(const SyntheticSpec& spec);

}  // namespace chronoflow::ingest
