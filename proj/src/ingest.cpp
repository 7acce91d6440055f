#include "chronoflow/ingest.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "chronoflow/errors.hpp"

namespace chronoflow::ingest {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string prefixed(std::string_view context, const std::string& msg) {
  if (context.empty()) return msg;
  return std::string(context) + ": " + msg;
}

enum class Component { year, month, day, hour, minute, second };

struct PatternToken {
  bool literal = true;
  char ch = 0;
  Component component = Component::year;
  int width = 0;
};

// Compiles a pattern into tokens; MM resolves to month on first use and to
// minute afterwards.
std::vector<PatternToken> compile_pattern(std::string_view pattern) {
  std::vector<PatternToken> tokens;
  bool month_seen = false;
  std::size_t i = 0;
  auto starts = [&](std::string_view tok) { return pattern.substr(i, tok.size()) == tok; };
  while (i < pattern.size()) {
    PatternToken tok;
    if (starts("YYYY")) {
      tok = {false, 0, Component::year, 4};
      i += 4;
    } else if (starts("MM")) {
      tok = {false, 0, month_seen ? Component::minute : Component::month, 2};
      month_seen = true;
      i += 2;
    } else if (starts("DD")) {
      tok = {false, 0, Component::day, 2};
      i += 2;
    } else if (starts("HH")) {
      tok = {false, 0, Component::hour, 2};
      i += 2;
    } else if (starts("SS")) {
      tok = {false, 0, Component::second, 2};
      i += 2;
    } else {
      tok.ch = pattern[i];
      i += 1;
    }
    tokens.push_back(tok);
  }
  return tokens;
}

bool parse_digits(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

// Integer part of "123" or "123.456"; the fraction is floored away.
std::int64_t parse_epoch_integer(std::string_view raw, std::string_view context,
                                 std::string_view what) {
  std::string_view whole = raw;
  if (const auto dot = raw.find('.'); dot != std::string_view::npos) {
    whole = raw.substr(0, dot);
    if (!all_digits(raw.substr(dot + 1))) whole = {};
  }
  if (whole.size() > 1 && whole.front() == '-' && all_digits(whole.substr(1))) {
    throw RangeError(prefixed(context, "negative timestamp '" + std::string(raw) + "'"));
  }
  if (!all_digits(whole)) {
    throw ParseError(prefixed(context, "malformed " + std::string(what) + " '" +
                                           std::string(raw) + "'"));
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), value);
  if (ec != std::errc{}) {
    throw RangeError(prefixed(context, std::string(what) + " out of range '" +
                                           std::string(raw) + "'"));
  }
  return value;
}

EpochSeconds parse_pattern(std::string_view raw, const TimeFieldSpec& spec,
                           std::string_view context) {
  const auto tokens = compile_pattern(spec.pattern);
  std::array<std::int64_t, 6> parts{};
  std::size_t pos = 0;
  auto fail = [&]() -> ParseError {
    return ParseError(prefixed(context, "'" + std::string(raw) +
                                            "' does not match pattern '" + spec.pattern + "'"));
  };
  for (const auto& tok : tokens) {
    if (tok.literal) {
      if (pos >= raw.size() || raw[pos] != tok.ch) throw fail();
      ++pos;
      continue;
    }
    if (pos + tok.width > raw.size()) throw fail();
    std::int64_t v = 0;
    if (!parse_digits(raw.substr(pos, tok.width), v)) throw fail();
    parts[static_cast<std::size_t>(tok.component)] = v;
    pos += tok.width;
  }
  // Sub-second digits after the pattern are floored away.
  if (pos < raw.size()) {
    const auto rest = raw.substr(pos);
    if (rest.size() < 2 || rest.front() != '.' ||
        rest.substr(1).find_first_not_of("0123456789") != std::string_view::npos) {
      throw fail();
    }
  }

  const auto [year, month, day, hour, minute, second] = parts;
  const std::chrono::year_month_day ymd{
      std::chrono::year{static_cast<int>(year)},
      std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    throw RangeError(prefixed(context, "date/time out of range '" + std::string(raw) + "'"));
  }
  const std::int64_t local = days_from_civil(static_cast<int>(year),
                                             static_cast<unsigned>(month),
                                             static_cast<unsigned>(day)) *
                                 86400 +
                             hour * 3600 + minute * 60 + second;
  const std::int64_t utc = local - static_cast<std::int64_t>(spec.tz_offset_minutes) * 60;
  if (utc < 0) {
    throw RangeError(prefixed(context, "'" + std::string(raw) + "' is before the epoch"));
  }
  return utc;
}

}  // namespace

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  const std::chrono::sys_days days{std::chrono::year{year} / std::chrono::month{month} /
                                   std::chrono::day{day}};
  return days.time_since_epoch().count();
}

void TimeFieldSpec::validate() const {
  if (tz_offset_minutes < -kMaxTzOffsetMinutes || tz_offset_minutes > kMaxTzOffsetMinutes) {
    throw ConfigError("tz offset " + std::to_string(tz_offset_minutes) +
                      " min outside [-14:00, +14:00]");
  }
  if (format != TimeFormat::datetime_pattern) return;
  std::array<bool, 6> present{};
  for (const auto& tok : compile_pattern(pattern)) {
    if (tok.literal) continue;
    auto& slot = present[static_cast<std::size_t>(tok.component)];
    if (slot) throw ConfigError("pattern '" + pattern + "' repeats a component");
    slot = true;
  }
  for (bool p : present) {
    if (!p) {
      throw ConfigError("pattern '" + pattern +
                        "' must contain YYYY, MM (month), DD, HH, MM (minute) and SS");
    }
  }
}

int parse_tz_offset(const std::string& text) {
  if (text == "Z" || text == "UTC") return 0;
  auto bad = [&] { return ConfigError("malformed tz offset '" + text + "' (expected +HH:MM)"); };
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-') || text[3] != ':') throw bad();
  std::int64_t hh = 0;
  std::int64_t mm = 0;
  if (!parse_digits(std::string_view(text).substr(1, 2), hh) ||
      !parse_digits(std::string_view(text).substr(4, 2), mm) || mm > 59) {
    throw bad();
  }
  const int minutes = static_cast<int>(hh * 60 + mm) * (text[0] == '-' ? -1 : 1);
  if (minutes < -kMaxTzOffsetMinutes || minutes > kMaxTzOffsetMinutes) {
    throw ConfigError("tz offset '" + text + "' outside [-14:00, +14:00]");
  }
  return minutes;
}

TimeFieldSpec parse_time_format(const std::string& text) {
  TimeFieldSpec spec;
  if (text == "epoch") {
    spec.format = TimeFormat::epoch_seconds;
  } else if (text == "epoch-ms") {
    spec.format = TimeFormat::epoch_millis;
  } else if (text.rfind("pattern:", 0) == 0) {
    spec.format = TimeFormat::datetime_pattern;
    spec.pattern = text.substr(8);
  } else {
    throw ConfigError("unknown time format '" + text + "' (expected epoch|epoch-ms|pattern:STR)");
  }
  spec.validate();
  return spec;
}

EpochSeconds parse_time(std::string_view raw, const TimeFieldSpec& spec,
                        std::string_view context) {
  raw = trim(raw);
  if (raw.empty()) throw ParseError(prefixed(context, "empty time field"));
  switch (spec.format) {
    case TimeFormat::epoch_seconds:
      return parse_epoch_integer(raw, context, "epoch seconds");
    case TimeFormat::epoch_millis:
      return parse_epoch_integer(raw, context, "epoch millis") / 1000;
    case TimeFormat::datetime_pattern:
      return parse_pattern(raw, spec, context);
  }
  throw InvariantError("unhandled time format");
}

namespace {

std::string_view nth_field(std::string_view line, char delimiter, std::size_t index,
                           bool& found) {
  std::size_t start = 0;
  for (std::size_t col = 0;; ++col) {
    const auto end = line.find(delimiter, start);
    if (col == index) {
      found = true;
      return line.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                              : end - start);
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  found = false;
  return {};
}

std::string field_label(const FieldSelector& field) {
  if (const auto* name = std::get_if<std::string>(&field)) return "'" + *name + "'";
  return "#" + std::to_string(std::get<std::size_t>(field));
}

constexpr std::size_t kMaxDiagnostics = 20;

}  // namespace

IngestResult ingest(std::istream& source, const Schema& schema,
                    std::optional<std::int64_t> declared_span, std::ostream* rejects,
                    std::ostream* diagnostics) {
  if (declared_span && *declared_span < 1) {
    throw ConfigError("declared span must be >= 1, got " + std::to_string(*declared_span));
  }
  schema.time.validate();

  IngestResult result;
  auto& stats = result.stats;
  auto& events = result.segment.events;

  std::optional<std::size_t> column;
  if (const auto* idx = std::get_if<std::size_t>(&schema.time.field)) column = *idx;
  const std::string label = field_label(schema.time.field);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (!column) {
      const auto& name = std::get<std::string>(schema.time.field);
      std::size_t col = 0;
      std::size_t start = 0;
      for (;; ++col) {
        const auto end = line.find(schema.delimiter, start);
        const auto cell = trim(std::string_view(line).substr(
            start, end == std::string::npos ? std::string::npos : end - start));
        if (cell == name) {
          column = col;
          break;
        }
        if (end == std::string::npos) break;
        start = end + 1;
      }
      if (!column) throw ConfigError("header row has no column named '" + name + "'");
      ++stats.header_lines;
      continue;
    }

    ++stats.input_lines;
    bool found = false;
    const auto cell = nth_field(line, schema.delimiter, *column, found);
    try {
      if (!found) {
        throw ParseError("line " + std::to_string(line_no) + ", field " + label +
                         ": missing column");
      }
      const auto context = "line " + std::to_string(line_no) + ", field " + label;
      const auto t = parse_time(cell, schema.time, context);
      events.push_back(Event{t, line});
      ++stats.parsed;
    } catch (const Error& e) {
      ++stats.rejected;
      if (rejects) *rejects << line << '\n';
      if (diagnostics && stats.rejected <= kMaxDiagnostics) {
        *diagnostics << "reject: " << e.what() << '\n';
      }
    }
  }
  if (rejects) rejects->flush();
  if (diagnostics && stats.rejected > kMaxDiagnostics) {
    *diagnostics << "reject: ... " << (stats.rejected - kMaxDiagnostics)
                 << " more rejected lines\n";
  }
  if (stats.parsed == 0) {
    throw EmptyInputError("no record parsed (" + std::to_string(stats.rejected) + " rejected of " +
                          std::to_string(stats.input_lines) + " lines)");
  }

  auto& segment = result.segment;
  finalize_segment(segment);
  segment.span_seconds = declared_span.value_or(segment.t_max - segment.t_min + 1);
  return result;
}

void SyntheticSpec::validate() const {
  if (span < 1) throw ConfigError("synthetic span must be >= 1");
  if (!(mean_rate > 0.0) || !std::isfinite(mean_rate)) {
    throw ConfigError("synthetic mean rate must be > 0");
  }
  if (!(diurnal_amplitude >= 0.0) || diurnal_amplitude >= 1.0) {
    throw ConfigError("diurnal amplitude must be in [0, 1); the rate would go negative");
  }
  if (start < 0) throw ConfigError("synthetic start epoch must be >= 0");
}

StreamSegment generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> sensor(0, 99);
  std::uniform_int_distribution<int> reading(0, 99999);

  StreamSegment segment;
  segment.events.reserve(static_cast<std::size_t>(spec.mean_rate * static_cast<double>(spec.span) * 1.05));
  std::uint64_t seq = 0;
  char buf[96];
  for (std::int64_t s = 0; s < spec.span; ++s) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(s) /
                         static_cast<double>(spec.span);
    const double rate = spec.mean_rate * (1.0 + spec.diurnal_amplitude * std::sin(phase));
    std::poisson_distribution<long> arrivals(rate);
    const long n = rate > 0.0 ? arrivals(rng) : 0;
    const EpochSeconds t = spec.start + s;
    for (long k = 0; k < n; ++k) {
      const int v = reading(rng);
      const int len = std::snprintf(buf, sizeof buf, "%llu\t%lld\tsensor-%02d\t%d.%02d",
                                    static_cast<unsigned long long>(seq),
                                    static_cast<long long>(t), sensor(rng), v / 100, v % 100);
      segment.events.push_back(Event{t, std::string(buf, static_cast<std::size_t>(len))});
      ++seq;
    }
  }
  // Generated in time order; a sparse draw may legitimately be empty.
  if (segment.events.empty()) {
    segment.t_min = segment.t_max = spec.start;
  } else {
    segment.t_min = segment.events.front().t;
    segment.t_max = segment.events.back().t;
  }
  segment.span_seconds = spec.span;
  char rate_text[64];
  std::snprintf(rate_text, sizeof rate_text, "%.17g", spec.mean_rate);
  char amp_text[64];
  std::snprintf(amp_text, sizeof amp_text, "%.17g", spec.diurnal_amplitude);
  segment.config = {{"source", "synthetic"},
                    {"span", std::to_string(spec.span)},
                    {"mean_rate", rate_text},
                    {"diurnal_amplitude", amp_text},
                    {"seed", std::to_string(spec.seed)},
                    {"start", std::to_string(spec.start)}};
  return segment;
}

}  // namespace chronoflow::ingest
