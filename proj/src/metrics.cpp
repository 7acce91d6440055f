#include "chronoflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "chronoflow/errors.hpp"

namespace chronoflow::metrics {

std::uint64_t PerSecondHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

PerSecondHistogram histogram(std::span<const std::int64_t> indices, std::int64_t range,
                             std::span<const std::uint64_t> byte_sizes) {
  if (range < 0) throw InvariantError("histogram range must be >= 0");
  if (!byte_sizes.empty() && byte_sizes.size() != indices.size()) {
    throw InvariantError("byte sizes are not parallel to indices");
  }
  PerSecondHistogram hist;
  hist.range = range;
  hist.counts.assign(static_cast<std::size_t>(range), 0);
  if (!byte_sizes.empty()) hist.bytes.emplace(static_cast<std::size_t>(range), 0);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto idx = indices[i];
    if (idx < 0 || idx >= range) {
      throw InvariantError("second index " + std::to_string(idx) + " outside [0, " +
                           std::to_string(range) + ")");
    }
    ++hist.counts[static_cast<std::size_t>(idx)];
    if (hist.bytes) (*hist.bytes)[static_cast<std::size_t>(idx)] += byte_sizes[i];
  }
  return hist;
}

PerSecondHistogram histogram(const StreamSegment& segment) {
  std::vector<std::int64_t> idx;
  std::vector<std::uint64_t> bytes;
  idx.reserve(segment.events.size());
  bytes.reserve(segment.events.size());
  for (const auto& ev : segment.events) {
    idx.push_back(ev.t - segment.t_min);
    bytes.push_back(ev.payload.size() + 1);
  }
  const std::int64_t observed = segment.events.empty() ? 0 : segment.t_max - segment.t_min + 1;
  return histogram(idx, std::max(segment.span_seconds, observed), bytes);
}

PerSecondHistogram histogram(const SimulatedStream& stream) {
  std::vector<std::int64_t> idx;
  std::vector<std::uint64_t> bytes;
  idx.reserve(stream.events.size());
  bytes.reserve(stream.events.size());
  for (const auto& ev : stream.events) {
    idx.push_back(ev.scale_stamp);
    bytes.push_back(ev.payload.size() + 1);
  }
  return histogram(idx, stream.window, bytes);
}

VolatilityStats volatility(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw InvariantError("volatility needs a range of at least 1 s");
  const double r = static_cast<double>(counts.size());
  double sum = 0.0;
  for (auto q : counts) sum += static_cast<double>(q);
  VolatilityStats s;
  s.average = sum / r;
  double sq = 0.0;
  for (auto q : counts) {
    const double d = static_cast<double>(q) - s.average;
    sq += d * d;
  }
  s.variance = sq / r;
  s.standard_variance = std::sqrt(s.variance);
  return s;
}

VolatilityStats volatility(const PerSecondHistogram& hist) { return volatility(hist.counts); }

std::vector<double> block_average(std::span<const double> series, std::size_t points) {
  if (points == 0 || points > series.size()) {
    throw ConfigError("cannot block-average " + std::to_string(series.size()) + " values into " +
                      std::to_string(points) + " points");
  }
  std::vector<double> out(points);
  const std::size_t n = series.size();
  for (std::size_t i = 0; i < points; ++i) {
    const std::size_t lo = i * n / points;
    const std::size_t hi = (i + 1) * n / points;
    double sum = 0.0;
    for (std::size_t j = lo; j < hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo);
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UndefinedError("correlation needs two series of equal length >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("correlation of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double bytes_trend_correlation(const PerSecondHistogram& original,
                               const PerSecondHistogram& simulated) {
  if (!original.bytes || !simulated.bytes) {
    throw ConfigError("bytes trend needs byte-tracking histograms");
  }
  const std::vector<double> orig(original.bytes->begin(), original.bytes->end());
  const std::vector<double> sim(simulated.bytes->begin(), simulated.bytes->end());
  const auto resampled = block_average(orig, sim.size());
  return pearson(resampled, sim);
}

namespace {

std::optional<double> relative(double sim, double orig) {
  if (orig == 0.0) return std::nullopt;
  return std::abs(sim - orig) / std::abs(orig);
}

}  // namespace

FidelityReport fidelity(const StreamSegment& segment, std::span<const SimulatedStream> streams) {
  for (const auto& s : streams) {
    if (s.source_segment_id != segment.segment_id) {
      throw ConfigError("stream '" + s.stream_id + "' derives from segment '" +
                        s.source_segment_id + "', not '" + segment.segment_id + "'");
    }
    if (auto it = s.config.find("source_count");
        it != s.config.end() && it->second != std::to_string(segment.count())) {
      throw ConfigError("stream '" + s.stream_id + "' was built from " + it->second +
                        " events but segment '" + segment.segment_id + "' has " +
                        std::to_string(segment.count()));
    }
  }

  FidelityReport report;
  report.segment_id = segment.segment_id;
  report.span_seconds = segment.span_seconds;
  report.original_count = segment.count();

  const auto orig_hist = histogram(segment);
  const auto orig = volatility(orig_hist);
  report.original.label = segment.segment_id;
  report.original.range = orig_hist.range;
  report.original.stats = orig;

  for (const auto& s : streams) {
    const auto hist = histogram(s);
    FidelityRow row;
    row.label = s.stream_id;
    row.range = s.window;
    row.stats = volatility(hist);
    row.abs_delta = {std::abs(row.stats.average - orig.average),
                     std::abs(row.stats.variance - orig.variance),
                     std::abs(row.stats.standard_variance - orig.standard_variance)};
    row.rel_average = relative(row.stats.average, orig.average);
    row.rel_variance = relative(row.stats.variance, orig.variance);
    row.rel_standard_variance = relative(row.stats.standard_variance, orig.standard_variance);
    try {
      row.bytes_correlation = bytes_trend_correlation(orig_hist, hist);
    } catch (const Error&) {
      row.bytes_correlation.reset();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json to_json(const VolatilityStats& stats) {
  return {{"average", stats.average},
          {"variance", stats.variance},
          {"standard_variance", stats.standard_variance}};
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json row_json(const FidelityRow& row, bool original) {
  nlohmann::json j = {{"label", row.label}, {"range", row.range}, {"stats", to_json(row.stats)}};
  if (!original) {
    j["abs_delta"] = to_json(row.abs_delta);
    j["rel_delta"] = {{"average", optional_json(row.rel_average)},
                      {"variance", optional_json(row.rel_variance)},
                      {"standard_variance", optional_json(row.rel_standard_variance)}};
    j["bytes_correlation"] = optional_json(row.bytes_correlation);
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const FidelityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r, false));
  return {{"segment_id", report.segment_id},
          {"span_seconds", report.span_seconds},
          {"original_count", report.original_count},
          {"original", row_json(report.original, true)},
          {"simulated", rows}};
}

std::string format_table(std::span<const std::pair<std::string, VolatilityStats>> rows,
                         std::span<const std::int64_t> ranges) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-14s %12s %14s %18s\n", "Label", "Time Range (s)",
                "Average", "Variance", "Standard Variance");
  out += line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [label, s] = rows[i];
    std::snprintf(line, sizeof line, "%-16s %-14lld %12.2f %14.2f %18.2f\n", label.c_str(),
                  static_cast<long long>(ranges[i]), s.average, s.variance, s.standard_variance);
    out += line;
  }
  return out;
}

std::string format_table(const FidelityReport& report) {
  std::vector<std::pair<std::string, VolatilityStats>> rows;
  std::vector<std::int64_t> ranges;
  for (const auto& r : report.rows) {
    rows.emplace_back(r.label, r.stats);
    ranges.push_back(r.range);
  }
  rows.emplace_back("original", report.original.stats);
  ranges.push_back(report.original.range);
  std::string out = format_table(rows, ranges);
  out += "NOTE: ORIGINAL TIME RANGE OF SEGMENT '" + report.segment_id + "' IS " +
         std::to_string(report.span_seconds) + "s.\n";
  return out;
}

}  // namespace chronoflow::metrics
