#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chronoflow/types.hpp"

namespace chronoflow::transform {

// Min-max maps each event's second onto a bucket of [0, window):
//   bucket = floor((t - t_min) / (t_max - t_min) * window), clamped to window-1.
// A segment with t_min == t_max maps everything to bucket 0. Input order is
// kept.
std::vector<ScaledEvent> normalize(const StreamSegment& segment, std::int64_t window);

// Events kept from a bucket of `bucket_size` events when thinning by
// `multiple`: round-half-up of bucket_size / multiple, computed exactly.
std::int64_t keep_count(std::int64_t bucket_size, const Rational& multiple);

// Within-bucket positions kept for a bucket of `bucket_size` events.
std::vector<std::int64_t> kept_positions(std::int64_t bucket_size, const Rational& multiple,
                                         SampleMode mode);

// Thins each run of equal scale_stamp independently. `scaled` must be ordered
// by scale_stamp. Throws ConfigError when multiple < 1.
std::vector<ScaledEvent> sample(std::span<const ScaledEvent> scaled, const Rational& multiple,
                                SampleMode mode);

// multiple = span_seconds / window, as an exact fraction.
Rational normalization_multiple(const StreamSegment& segment, std::int64_t window);

// normalize + sample. Throws ConfigError if window < 1 or window > span.
SimulatedStream simulate(const StreamSegment& segment, std::int64_t window, SampleMode mode,
                         std::string stream_id = {});

}  // namespace chronoflow::transform
