// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Thresholds are fixed here and never tuned at runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chronoflow/errors.hpp"
#include "chronoflow/ingest.hpp"
#include "chronoflow/metrics.hpp"
#include "chronoflow/replay.hpp"
#include "chronoflow/store.hpp"
#include "chronoflow/transform.hpp"
#include "test_support.hpp"

using namespace chronoflow;

namespace {

constexpr std::int64_t kDaySpan = 86400;
constexpr double kDayRate = 25.0;
constexpr double kDayAmplitude = 0.5;
constexpr std::uint64_t kDaySeed = 20200601;
const std::vector<std::int64_t> kWindows{600, 1200, 1800, 2400, 3000, 3600};

constexpr double kAverageTolerance = 0.05;
constexpr double kStdTolerance = 0.10;
constexpr double kWallMin = 9.0;
constexpr double kWallMax = 12.0;
constexpr double kScaledSpeedupMin = 20.0;
constexpr double kDaySpeedupMin = 24.0;
constexpr double kLatenessLimitMs = 100.0;
constexpr int kHistogramCases = 1000;
constexpr double kStdSquaredTolerance = 1e-9;
constexpr int kTransformCases = 1000;
constexpr double kBytesCorrelationMin = 0.8;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

const StreamSegment& day_segment() {
  static const StreamSegment seg = [] {
    auto s = ingest::generate_synthetic({kDaySpan, kDayRate, kDayAmplitude, kDaySeed});
    s.segment_id = "day";
    return s;
  }();
  return seg;
}

char buf[512];

Outcome volatility_preservation() {
  Outcome o;
  const auto& seg = day_segment();
  std::vector<SimulatedStream> streams;
  for (auto w : kWindows) {
    streams.push_back(transform::simulate(seg, w, SampleMode::systematic, "day-" + std::to_string(w)));
  }
  const auto report = metrics::fidelity(seg, streams);
  std::printf("    segment: %zu events over %lld s\n", seg.count(),
              static_cast<long long>(seg.span_seconds));
  std::printf("%s", metrics::format_table(report).c_str());
  for (const auto& row : report.rows) {
    const double ra = row.rel_average.value_or(1e9);
    const double rs = row.rel_standard_variance.value_or(1e9);
    std::printf("    W=%-5lld rel avg %.4f (<= %.2f)  rel std %.4f (<= %.2f)\n",
                static_cast<long long>(row.range), ra, kAverageTolerance, rs, kStdTolerance);
    std::snprintf(buf, sizeof buf, "W=%lld average off by %.2f%%", static_cast<long long>(row.range),
                  ra * 100);
    o.require(ra <= kAverageTolerance, buf);
    std::snprintf(buf, sizeof buf, "W=%lld std off by %.2f%%", static_cast<long long>(row.range),
                  rs * 100);
    o.require(rs <= kStdTolerance, buf);
  }
  return o;
}

replay::ReplayReport real_clock_replay(const SimulatedStream& stream, replay::Sink& sink) {
  replay::SteadyClock clock;
  return replay::replay(replay::bucketize(stream), sink, clock);
}

Outcome speedup() {
  Outcome o;
  auto seg = ingest::generate_synthetic({240, kDayRate, kDayAmplitude, 7});
  seg.segment_id = "desk";
  const auto stream = transform::simulate(seg, 10, SampleMode::systematic, "desk-10");
  testsupport::TempDir dir;
  auto sink = replay::open_sink("file:" + (dir.path() / "out.txt").string());
  const auto report = real_clock_replay(stream, *sink);
  const double speedup = static_cast<double>(seg.span_seconds) / report.wall_time_seconds;
  const double day_speedup = static_cast<double>(kDaySpan) / 3600.0;
  std::printf("    span 240 s -> W=10: wall %.3f s, speedup %.2fx; 86400 -> 3600 gives %.1fx\n",
              report.wall_time_seconds, speedup, day_speedup);
  o.require(report.status == 0, "replay status " + std::to_string(report.status));
  std::snprintf(buf, sizeof buf, "wall time %.3f s outside [%.0f, %.0f]", report.wall_time_seconds,
                kWallMin, kWallMax);
  o.require(report.wall_time_seconds >= kWallMin && report.wall_time_seconds <= kWallMax, buf);
  o.require(speedup >= kScaledSpeedupMin, "scaled speedup below 20");
  o.require(day_speedup >= kDaySpeedupMin, "86400/3600 below 24");
  o.require(report.total_events == stream.count(), "not every event emitted");
  return o;
}

Outcome replay_timing() {
  Outcome o;
  auto seg = ingest::generate_synthetic({240, kDayRate, kDayAmplitude, 8});
  seg.segment_id = "desk";
  const auto stream = transform::simulate(seg, 10, SampleMode::systematic, "desk-10");
  testsupport::LoopbackServer server;
  auto sink = replay::open_sink("tcp:127.0.0.1:" + std::to_string(server.port()));
  const auto report = real_clock_replay(stream, *sink);
  const auto lines = testsupport::split_lines(server.received());

  o.require(report.status == 0, "replay status " + std::to_string(report.status));
  o.require(report.ticks.size() == 10, "expected 10 ticks");
  double worst = 0.0;
  for (const auto& t : report.ticks) {
    worst = std::max(worst, t.lateness_ms);
    o.require(t.lateness_ms >= 0.0 && t.lateness_ms < kLatenessLimitMs,
              "tick " + std::to_string(t.tick) + " lateness " + std::to_string(t.lateness_ms) + " ms");
  }
  // Non-accumulating: the last tick is no later than the first plus the bound.
  if (!report.ticks.empty()) {
    o.require(report.ticks.back().lateness_ms - report.ticks.front().lateness_ms < kLatenessLimitMs,
              "lateness drifts across ticks");
  }
  std::printf("    %zu ticks, max lateness %.3f ms, %zu records received of %zu\n",
              report.ticks.size(), worst, lines.size(), stream.count());
  o.require(lines.size() == stream.count(), "record count mismatch on the wire");
  bool in_order = lines.size() == stream.count();
  for (std::size_t i = 0; in_order && i < lines.size(); ++i) {
    in_order = lines[i] == stream.events[i].payload;
  }
  o.require(in_order, "records out of order or modified");
  o.require(report.total_bytes == server.received().size(), "byte count mismatch");
  return o;
}

Outcome metric_oracle() {
  Outcome o;
  std::mt19937_64 rng(4);
  int exact = 0;
  for (int i = 0; i < kHistogramCases; ++i) {
    const auto len = std::uniform_int_distribution<std::size_t>(1, 100)(rng);
    std::vector<std::uint64_t> q(len);
    for (auto& x : q) x = std::uniform_int_distribution<std::uint64_t>(0, 1000)(rng);
    const auto v = metrics::volatility(q);
    const auto ref = testsupport::naive_volatility(q);
    const bool same = v.average == ref.average && v.variance == ref.variance &&
                      v.standard_variance == ref.standard_variance;
    exact += same;
    o.require(same, "mismatch on case " + std::to_string(i));
    const double sq = v.standard_variance * v.standard_variance;
    const bool consistent =
        v.variance == 0.0 ? sq == 0.0 : std::abs(sq - v.variance) / v.variance <= kStdSquaredTolerance;
    o.require(consistent, "std^2 != variance on case " + std::to_string(i));
  }
  std::printf("    %d/%d histograms identical to the naive reference\n", exact, kHistogramCases);
  return o;
}

Outcome transform_properties() {
  Outcome o;
  std::mt19937_64 rng(77);
  int cases = 0;
  for (int round = 0; round < kTransformCases && o.pass; ++round) {
    const int n = std::uniform_int_distribution<int>(2, 300)(rng);
    const std::int64_t width = std::uniform_int_distribution<std::int64_t>(1, 20000)(rng);
    StreamSegment seg;
    seg.segment_id = "p";
    const EpochSeconds base = 1'500'000'000;
    std::uniform_int_distribution<std::int64_t> pick(base, base + width);
    for (int i = 0; i < n; ++i) {
      const EpochSeconds t = i == 0 ? base : i == 1 ? base + width : pick(rng);
      seg.events.push_back({t, "rec-" + std::to_string(i)});
    }
    finalize_segment(seg);
    seg.span_seconds = width + 1 + std::uniform_int_distribution<std::int64_t>(0, 100)(rng);
    const std::int64_t w = std::uniform_int_distribution<std::int64_t>(1, seg.span_seconds)(rng);
    const auto mode = round % 3 == 0 ? SampleMode::prefix : SampleMode::systematic;

    const auto scaled = transform::normalize(seg, w);
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      for (std::size_t j = i + 1; j < std::min(scaled.size(), i + 8); ++j) {
        if (seg.events[i].t <= seg.events[j].t) {
          o.require(scaled[i].scale_stamp <= scaled[j].scale_stamp, "monotonicity");
        }
      }
    }
    o.require(scaled.front().scale_stamp == 0, "earliest event not in bucket 0");
    o.require(scaled.back().scale_stamp == w - 1, "latest event not in bucket W-1");

    const auto a = transform::simulate(seg, w, mode, "a");
    const auto b = transform::simulate(seg, w, mode, "a");
    o.require(store::encode_stream_data(a) == store::encode_stream_data(b), "non-deterministic");

    std::multiset<std::string> pool;
    for (const auto& e : seg.events) pool.insert(std::to_string(e.t) + "|" + e.payload);
    for (const auto& e : a.events) {
      auto it = pool.find(std::to_string(e.t_original) + "|" + e.payload);
      o.require(it != pool.end(), "fabricated or duplicated record");
      if (it != pool.end()) pool.erase(it);
    }

    std::map<std::int64_t, std::int64_t> sizes;
    for (const auto& e : scaled) ++sizes[e.scale_stamp];
    const double ideal = static_cast<double>(n) * static_cast<double>(w) /
                         static_cast<double>(seg.span_seconds);
    o.require(std::abs(static_cast<double>(a.count()) - ideal) <= static_cast<double>(sizes.size()),
              "kept-count bound");
    std::int64_t oracle = 0;
    for (const auto& [bucket, m] : sizes) oracle += testsupport::oracle_keep(m, seg.span_seconds, w);
    o.require(static_cast<std::int64_t>(a.count()) == oracle, "keep count differs from oracle");
    ++cases;
  }
  std::printf("    %d random segments checked\n", cases);
  return o;
}

Outcome bytes_trend() {
  Outcome o;
  const auto& seg = day_segment();
  const auto stream = transform::simulate(seg, 600, SampleMode::systematic, "day-600");
  const auto orig = metrics::histogram(seg);
  const auto sim = metrics::histogram(stream);
  const double r = metrics::bytes_trend_correlation(orig, sim);
  // Independent route: textbook Pearson over a hand-rolled block average.
  std::vector<double> blocks(600, 0.0);
  std::vector<double> counts(600, 0.0);
  for (std::int64_t s = 0; s < kDaySpan; ++s) {
    const auto block = static_cast<std::size_t>(s * 600 / kDaySpan);
    blocks[block] += static_cast<double>((*orig.bytes)[static_cast<std::size_t>(s)]);
    counts[block] += 1.0;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] /= counts[i];
  const std::vector<double> simulated(sim.bytes->begin(), sim.bytes->end());
  const double check = testsupport::naive_pearson(blocks, simulated);
  std::printf("    Pearson r = %.4f (reference %.4f), threshold %.2f\n", r, check,
              kBytesCorrelationMin);
  o.require(r >= kBytesCorrelationMin, "correlation below threshold");
  o.require(std::abs(r - check) < 1e-9, "library and reference correlation disagree");
  return o;
}

Outcome store_integrity() {
  Outcome o;
  testsupport::TempDir dir;
  store::Store st(dir.path());
  std::mt19937_64 rng(5);
  int round_trips = 0;
  for (int i = 0; i < 20; ++i) {
    auto seg = ingest::generate_synthetic(
        {std::uniform_int_distribution<std::int64_t>(10, 2000)(rng), 6.0, 0.5, rng()});
    seg.segment_id = "seg" + std::to_string(i);
    // Payloads with TABs in the final field and empty payloads.
    seg.events.front().payload = "a\tb\t\tc";
    seg.events.back().payload.clear();
    st.write_segment(seg);
    o.require(st.read_segment(seg.segment_id) == seg, "segment round trip " + seg.segment_id);
    const auto w = std::uniform_int_distribution<std::int64_t>(1, seg.span_seconds)(rng);
    const auto stream = transform::simulate(seg, w, SampleMode::systematic, "str" + std::to_string(i));
    st.write_stream(stream);
    o.require(st.read_stream(stream.stream_id) == stream, "stream round trip " + stream.stream_id);
    round_trips += 2;
  }

  // Every byte of a small segment and stream, plus random bytes of a large one.
  auto small = ingest::generate_synthetic({60, 2.0, 0.3, 17});
  small.segment_id = "small";
  st.write_segment(small);
  st.write_stream(transform::simulate(small, 6, SampleMode::systematic, "small-6"));

  std::size_t detected = 0;
  std::size_t tried = 0;
  auto probe = [&](store::Kind kind, const std::string& id, std::size_t pos) {
    const auto path = st.data_path(kind, id);
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekg(static_cast<std::streamoff>(pos));
    const char c = static_cast<char>(f.get());
    f.seekp(static_cast<std::streamoff>(pos));
    f.put(static_cast<char>(c ^ (1 << (pos % 8))));
    f.close();
    ++tried;
    try {
      if (kind == store::Kind::segment) {
        st.read_segment(id);
      } else {
        st.read_stream(id);
      }
    } catch (const CorruptionError&) {
      ++detected;
    }
    std::fstream g(path, std::ios::binary | std::ios::in | std::ios::out);
    g.seekp(static_cast<std::streamoff>(pos));
    g.put(c);
  };
  for (const auto& [kind, id] : {std::pair{store::Kind::segment, std::string("small")},
                                 std::pair{store::Kind::stream, std::string("small-6")}}) {
    const auto size = std::filesystem::file_size(st.data_path(kind, id));
    for (std::size_t pos = 0; pos < size; ++pos) probe(kind, id, pos);
  }
  for (const auto& [kind, id] : {std::pair{store::Kind::segment, std::string("seg0")},
                                 std::pair{store::Kind::stream, std::string("str0")}}) {
    const auto size = std::filesystem::file_size(st.data_path(kind, id));
    std::uniform_int_distribution<std::size_t> pick(0, size - 1);
    for (int i = 0; i < 200; ++i) probe(kind, id, pick(rng));
  }
  o.require(detected == tried, "undetected corruption");

  bool conflict = false;
  try {
    st.write_segment(st.read_segment("seg1"));
  } catch (const ConflictError&) {
    conflict = true;
  }
  o.require(conflict, "duplicate id accepted");
  std::printf("    %d round trips, %zu/%zu single-byte corruptions detected, duplicate rejected: %s\n",
              round_trips, detected, tried, conflict ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 volatility preservation (avg 5%, std 10%, W=600..3600)", volatility_preservation},
      {"2 speedup (240 s -> W=10, wall in [9,12] s)", speedup},
      {"3 replay timing and completeness (lateness < 100 ms, TCP)", replay_timing},
      {"4 metric oracle equivalence (1000 histograms)", metric_oracle},
      {"5 transform properties (1000 random cases)", transform_properties},
      {"6 bytes-trend fidelity (Pearson >= 0.8 at W=600)", bytes_trend},
      {"7 store integrity (round trip, corruption, duplicates)", store_integrity},
  };
  int failed = 0;
  std::vector<std::string> summary;
  for (const auto& [name, fn] : criteria) {
    std::printf("==> criterion %s\n", name.c_str());
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::snprintf(buf, sizeof buf, "[%s] criterion %s (%.1f s)%s%s", o.pass ? "PASS" : "FAIL",
                  name.c_str(), secs, o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::printf("%s\n", buf);
    std::fflush(stdout);
    summary.emplace_back(buf);
    failed += !o.pass;
  }
  std::printf("\n==== acceptance summary ====\n");
  for (const auto& line : summary) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
