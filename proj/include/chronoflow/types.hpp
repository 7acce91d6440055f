#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chronoflow/rational.hpp"

namespace chronoflow {

using EpochSeconds = std::int64_t;

// One stream tuple: the original record bytes and its UTC second.
struct Event {
  EpochSeconds t = 0;
  std::string payload;

  friend bool operator==(const Event&, const Event&) = default;
};

// Free-form key/value echo of the configuration that produced an artifact.
using ConfigEcho = std::map<std::string, std::string>;

// A bounded, chronologically ordered run of events.
struct StreamSegment {
  std::string segment_id;
  std::vector<Event> events;
  EpochSeconds t_min = 0;
  EpochSeconds t_max = 0;
  // Declared original range; defaults to t_max - t_min + 1.
  std::int64_t span_seconds = 1;
  ConfigEcho config;

  std::size_t count() const noexcept { return events.size(); }

  friend bool operator==(const StreamSegment&, const StreamSegment&) = default;
};

struct ScaledEvent {
  std::int64_t scale_stamp = 0;
  EpochSeconds t_original = 0;
  std::string payload;

  friend bool operator==(const ScaledEvent&, const ScaledEvent&) = default;
};

enum class SampleMode { systematic, prefix };

const char* to_string(SampleMode mode) noexcept;
SampleMode parse_sample_mode(const std::string& text);

struct SimulatedStream {
  std::string stream_id;
  std::int64_t window = 1;  // W, seconds
  Rational multiple{1, 1};
  SampleMode mode = SampleMode::systematic;
  std::vector<ScaledEvent> events;
  std::string source_segment_id;
  ConfigEcho config;

  std::size_t count() const noexcept { return events.size(); }

  friend bool operator==(const SimulatedStream&, const SimulatedStream&) = default;
};

// Sorts events stably by t and recomputes t_min/t_max. Throws EmptyInputError
// on an empty event list.
void finalize_segment(StreamSegment& segment);

}  // namespace chronoflow
