#include "chronoflow/transform.hpp"

#include "chronoflow/errors.hpp"

namespace chronoflow::transform {
namespace {

void require_window(std::int64_t window) {
  if (window < 1) throw ConfigError("time range must be >= 1 s, got " + std::to_string(window));
}

}  // namespace

std::vector<ScaledEvent> normalize(const StreamSegment& segment, std::int64_t window) {
  require_window(window);
  if (segment.t_max < segment.t_min) {
    throw InvariantError("segment '" + segment.segment_id + "' has t_max < t_min");
  }
  const __int128 width = segment.t_max - segment.t_min;
  std::vector<ScaledEvent> out;
  out.reserve(segment.events.size());
  for (const auto& ev : segment.events) {
    std::int64_t bucket = 0;
    if (width > 0) {
      const __int128 offset = ev.t - segment.t_min;
      bucket = static_cast<std::int64_t>(offset * window / width);
      if (bucket > window - 1) bucket = window - 1;
    }
    out.push_back(ScaledEvent{bucket, ev.t, ev.payload});
  }
  return out;
}

std::int64_t keep_count(std::int64_t bucket_size, const Rational& multiple) {
  // round(m * den / num), half up: floor((2 m den + num) / (2 num)).
  const __int128 num = multiple.num();
  const __int128 den = multiple.den();
  return static_cast<std::int64_t>((2 * bucket_size * den + num) / (2 * num));
}

std::vector<std::int64_t> kept_positions(std::int64_t bucket_size, const Rational& multiple,
                                         SampleMode mode) {
  const std::int64_t k = keep_count(bucket_size, multiple);
  std::vector<std::int64_t> positions;
  positions.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = 0; j < k; ++j) {
    if (mode == SampleMode::prefix) {
      positions.push_back(j);
    } else {
      // floor(j * multiple)
      positions.push_back(static_cast<std::int64_t>(static_cast<__int128>(j) * multiple.num() /
                                                    multiple.den()));
    }
  }
  return positions;
}

std::vector<ScaledEvent> sample(std::span<const ScaledEvent> scaled, const Rational& multiple,
                                SampleMode mode) {
  if (multiple < Rational(1, 1)) {
    throw ConfigError("normalization multiple " + multiple.str() +
                      " is below 1: the target time range exceeds the source span; "
                      "choose a range no longer than the segment's span");
  }
  std::vector<ScaledEvent> out;
  std::size_t begin = 0;
  while (begin < scaled.size()) {
    std::size_t end = begin + 1;
    while (end < scaled.size() && scaled[end].scale_stamp == scaled[begin].scale_stamp) ++end;
    if (end < scaled.size() && scaled[end].scale_stamp < scaled[begin].scale_stamp) {
      throw InvariantError("scaled events are not ordered by scale_stamp");
    }
    const auto m = static_cast<std::int64_t>(end - begin);
    for (const auto pos : kept_positions(m, multiple, mode)) {
      out.push_back(scaled[begin + static_cast<std::size_t>(pos)]);
    }
    begin = end;
  }
  return out;
}

Rational normalization_multiple(const StreamSegment& segment, std::int64_t window) {
  require_window(window);
  if (segment.span_seconds < 1) throw ConfigError("segment span must be >= 1");
  return Rational(segment.span_seconds, window);
}

SimulatedStream simulate(const StreamSegment& segment, std::int64_t window, SampleMode mode,
                         std::string stream_id) {
  require_window(window);
  if (window > segment.span_seconds) {
    throw ConfigError("time range " + std::to_string(window) + " s exceeds the segment span " +
                      std::to_string(segment.span_seconds) +
                      " s; upsampling would duplicate records");
  }
  SimulatedStream stream;
  stream.stream_id = std::move(stream_id);
  stream.window = window;
  stream.multiple = normalization_multiple(segment, window);
  stream.mode = mode;
  stream.source_segment_id = segment.segment_id;
  const auto scaled = normalize(segment, window);
  stream.events = sample(scaled, stream.multiple, mode);
  stream.config = {{"range", std::to_string(window)},
                   {"mode", to_string(mode)},
                   {"multiple", stream.multiple.str()},
                   {"source_segment", segment.segment_id},
                   {"source_count", std::to_string(segment.count())},
                   {"source_span", std::to_string(segment.span_seconds)}};
  return stream;
}

}  // namespace chronoflow::transform
