#include "chronoflow/types.hpp"

#include <algorithm>
#include <charconv>

#include "chronoflow/errors.hpp"

namespace chronoflow {

const char* to_string(SampleMode mode) noexcept {
  return mode == SampleMode::prefix ? "prefix" : "systematic";
}

SampleMode parse_sample_mode(const std::string& text) {
  if (text == "systematic") return SampleMode::systematic;
  if (text == "prefix") return SampleMode::prefix;
  throw ConfigError("unknown sampling mode '" + text + "' (expected systematic|prefix)");
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  std::int64_t num = 0;
  std::int64_t den = 1;
  auto parse_part = [&](std::string_view part, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
      throw ParseError("malformed rational '" + text + "'");
    }
  };
  std::string_view view(text);
  if (slash == std::string::npos) {
    parse_part(view, num);
  } else {
    parse_part(view.substr(0, slash), num);
    parse_part(view.substr(slash + 1), den);
  }
  return Rational(num, den);
}

void finalize_segment(StreamSegment& segment) {
  if (segment.events.empty()) {
    throw EmptyInputError("segment '" + segment.segment_id + "' has no events");
  }
  std::stable_sort(segment.events.begin(), segment.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  segment.t_min = segment.events.front().t;
  segment.t_max = segment.events.back().t;
}

}  // namespace chronoflow
