#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoflow/clock.hpp"
#include "chronoflow/sink.hpp"
#include "chronoflow/store.hpp"
#include "chronoflow/types.hpp"

namespace chronoflow::replay {

// Bucket i holds the payloads with scale_stamp == i, in stored order.
using Buckets = std::vector<std::vector<std::string>>;

Buckets bucketize(const SimulatedStream& stream);

// Reads `stream_id` from the store and groups it into `window` buckets.
// Throws NotFoundError, or ConfigError if the stored range differs.
Buckets load(const store::Store& store, const std::string& stream_id, std::int64_t window);

struct TickRecord {
  std::int64_t tick = 0;
  std::uint64_t events_emitted = 0;
  std::uint64_t bytes_emitted = 0;
  double lateness_ms = 0.0;
};

struct ReplayReport {
  int status = 0;  // 0 success, 1 fault
  std::int64_t window = 0;
  std::vector<TickRecord> ticks;
  std::uint64_t total_events = 0;
  std::uint64_t total_bytes = 0;
  double wall_time_seconds = 0.0;
  std::int64_t last_completed_tick = -1;
  std::optional<std::string> error;

  double max_lateness_ms() const noexcept;
};

struct ReplayOptions {
  Nanos tick = std::chrono::seconds{1};
};

// Emits bucket i starting no earlier than start + i * tick, where start is
// read once from `clock`. Deadlines are absolute, so a late tick does not
// push later ones back. A bucket that overruns delays the next one; the
// delay shows up as lateness. After the last bucket the engine waits out the
// final tick and closes the sink. Sink or clock failures stop the run with
// status 1.
ReplayReport replay(const Buckets& buckets, Sink& sink, Clock& clock,
                    const ReplayOptions& options = {});

nlohmann::json to_json(const ReplayReport& report);

}  // namespace chronoflow::replay
