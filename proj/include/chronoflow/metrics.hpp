#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoflow/types.hpp"

namespace chronoflow::metrics {

struct PerSecondHistogram {
  std::int64_t range = 0;
  std::vector<std::uint64_t> counts;
  // Framed bytes per second (payload + newline), when tracked.
  std::optional<std::vector<std::uint64_t>> bytes;

  std::uint64_t total() const noexcept;
};

struct VolatilityStats {
  double average = 0.0;
  double variance = 0.0;
  double standard_variance = 0.0;
};

// Counts events per second index. `byte_sizes`, if non-empty, must be
// parallel to `indices`. Throws InvariantError for an index outside [0, range).
PerSecondHistogram histogram(std::span<const std::int64_t> indices, std::int64_t range,
                             std::span<const std::uint64_t> byte_sizes = {});

// Original segment at 1 s resolution: index t - t_min over
// max(span_seconds, t_max - t_min + 1) seconds.
PerSecondHistogram histogram(const StreamSegment& segment);

// Simulated stream: index scale_stamp over W seconds.
PerSecondHistogram histogram(const SimulatedStream& stream);

// Population statistics over the `range` seconds (divisor R, not R-1).
VolatilityStats volatility(const PerSecondHistogram& hist);
VolatilityStats volatility(std::span<const std::uint64_t> counts);

// Mean of each of `points` contiguous blocks [floor(i n / points), floor((i+1) n / points)).
std::vector<double> block_average(std::span<const double> series, std::size_t points);

// Pearson correlation; throws UndefinedError for a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

// Correlation between the original bytes-per-second series, block-averaged
// to the simulated range, and the simulated bytes-per-second series.
double bytes_trend_correlation(const PerSecondHistogram& original,
                               const PerSecondHistogram& simulated);

struct FidelityRow {
  std::string label;  // stream id, or segment id for the original row
  std::int64_t range = 0;
  VolatilityStats stats;
  VolatilityStats abs_delta;
  // |sim - orig| / orig; empty where the original value is 0.
  std::optional<double> rel_average;
  std::optional<double> rel_variance;
  std::optional<double> rel_standard_variance;
  std::optional<double> bytes_correlation;
};

struct FidelityReport {
  std::string segment_id;
  std::int64_t span_seconds = 0;
  std::uint64_t original_count = 0;
  FidelityRow original;
  std::vector<FidelityRow> rows;
};

// Throws ConfigError when a stream was not derived from `segment`.
FidelityReport fidelity(const StreamSegment& segment, std::span<const SimulatedStream> streams);

nlohmann::json to_json(const VolatilityStats& stats);
nlohmann::json to_json(const FidelityReport& report);

// Aligned table: Time Range | Average | Variance | Standard Variance.
std::string format_table(const FidelityReport& report);
std::string format_table(std::span<const std::pair<std::string, VolatilityStats>> rows,
                         std::span<const std::int64_t> ranges);

}  // namespace chronoflow::metrics
