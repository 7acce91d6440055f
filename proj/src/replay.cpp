#include "chronoflow/replay.hpp"

#include <algorithm>

#include "chronoflow/errors.hpp"

namespace chronoflow::replay {

Buckets bucketize(const SimulatedStream& stream) {
  if (stream.window < 1) throw ConfigError("stream range must be >= 1");
  Buckets buckets(static_cast<std::size_t>(stream.window));
  std::int64_t previous = 0;
  for (const auto& ev : stream.events) {
    if (ev.scale_stamp < previous || ev.scale_stamp >= stream.window) {
      throw InvariantError("stream '" + stream.stream_id + "' has scale_stamp " +
                           std::to_string(ev.scale_stamp) + " out of order or outside [0, " +
                           std::to_string(stream.window) + ")");
    }
    previous = ev.scale_stamp;
    buckets[static_cast<std::size_t>(ev.scale_stamp)].push_back(ev.payload);
  }
  return buckets;
}

Buckets load(const store::Store& store, const std::string& stream_id, std::int64_t window) {
  const auto manifest = store.read_manifest(store::Kind::stream, stream_id);
  if (manifest.window != window) {
    throw ConfigError("stream '" + stream_id + "' was simulated for " +
                      std::to_string(manifest.window) + " s, not " + std::to_string(window) +
                      " s");
  }
  return bucketize(store.read_stream(stream_id));
}

double ReplayReport::max_lateness_ms() const noexcept {
  double worst = 0.0;
  for (const auto& t : ticks) worst = std::max(worst, t.lateness_ms);
  return worst;
}

namespace {

double to_ms(Nanos d) { return std::chrono::duration<double, std::milli>(d).count(); }

}  // namespace

ReplayReport replay(const Buckets& buckets, Sink& sink, Clock& clock,
                    const ReplayOptions& options) {
  ReplayReport report;
  report.window = static_cast<std::int64_t>(buckets.size());
  report.ticks.reserve(buckets.size());

  auto fault = [&](const std::string& what) {
    report.status = 1;
    report.error = what;
  };

  Nanos start{};
  try {
    start = clock.now();
  } catch (const std::exception& e) {
    fault(std::string("clock: ") + e.what());
    return report;
  }

  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const Nanos deadline = start + options.tick * static_cast<std::int64_t>(i);
    Nanos began{};
    try {
      clock.sleep_until(deadline);
      began = clock.now();
    } catch (const std::exception& e) {
      fault("clock at tick " + std::to_string(i) + ": " + e.what());
      break;
    }
    const auto bytes_before = sink.bytes_emitted();
    const auto& bucket = buckets[i];
    if (!bucket.empty()) {
      try {
        sink.emit(bucket);
      } catch (const std::exception& e) {
        fault("sink at tick " + std::to_string(i) + ": " + e.what());
        break;
      }
    }
    TickRecord rec;
    rec.tick = static_cast<std::int64_t>(i);
    rec.events_emitted = bucket.size();
    rec.bytes_emitted = sink.bytes_emitted() - bytes_before;
    rec.lateness_ms = to_ms(began - deadline);
    report.total_events += rec.events_emitted;
    report.total_bytes += rec.bytes_emitted;
    report.ticks.push_back(rec);
    report.last_completed_tick = rec.tick;
  }

  if (report.status == 0) {
    try {
      clock.sleep_until(start + options.tick * report.window);
    } catch (const std::exception& e) {
      fault(std::string("clock at end: ") + e.what());
    }
  }
  try {
    sink.close();
  } catch (const std::exception& e) {
    if (report.status == 0) fault(std::string("sink close: ") + e.what());
  }
  try {
    report.wall_time_seconds = std::chrono::duration<double>(clock.now() - start).count();
  } catch (const std::exception& e) {
    if (report.status == 0) fault(std::string("clock: ") + e.what());
  }
  return report;
}

nlohmann::json to_json(const ReplayReport& report) {
  nlohmann::json ticks = nlohmann::json::array();
  for (const auto& t : report.ticks) {
    ticks.push_back({{"tick", t.tick},
                     {"events_emitted", t.events_emitted},
                     {"bytes_emitted", t.bytes_emitted},
                     {"lateness_ms", t.lateness_ms}});
  }
  return {{"status", report.status},
          {"range", report.window},
          {"total_events", report.total_events},
          {"total_bytes", report.total_bytes},
          {"wall_time_seconds", report.wall_time_seconds},
          {"last_completed_tick", report.last_completed_tick},
          {"error", report.error ? nlohmann::json(*report.error) : nlohmann::json(nullptr)},
          {"ticks", ticks}};
}

}  // namespace chronoflow::replay
