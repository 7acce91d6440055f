#include <doctest.h>

#include <cmath>
#include <random>

#include "chronoflow/errors.hpp"
#include "chronoflow/ingest.hpp"
#include "chronoflow/metrics.hpp"
#include "chronoflow/transform.hpp"
#include "test_support.hpp"

using namespace chronoflow;
using namespace chronoflow::metrics;

TEST_CASE("histogram: grouping, empty, offset grouping") {
  const std::vector<std::int64_t> stamps{0, 0, 2};
  CHECK(histogram(stamps, 3).counts == std::vector<std::uint64_t>{2, 0, 1});
  CHECK(histogram(std::span<const std::int64_t>{}, 4).counts ==
        std::vector<std::uint64_t>{0, 0, 0, 0});

  StreamSegment seg;
  seg.segment_id = "s";
  seg.events = {{10, "a"}, {10, "bb"}, {11, "c"}};
  finalize_segment(seg);
  seg.span_seconds = 2;
  const auto h = histogram(seg);
  CHECK(h.counts == std::vector<std::uint64_t>{2, 1});
  REQUIRE(h.bytes);
  CHECK(*h.bytes == std::vector<std::uint64_t>{5, 2});

  seg.span_seconds = 5;  // trailing empty seconds count
  CHECK(histogram(seg).counts == std::vector<std::uint64_t>{2, 1, 0, 0, 0});

  CHECK_THROWS_AS(histogram(std::vector<std::int64_t>{3}, 3), InvariantError);
  CHECK_THROWS_AS(histogram(std::vector<std::int64_t>{-1}, 3), InvariantError);
}

TEST_CASE("volatility: worked examples") {
  auto v = volatility(std::vector<std::uint64_t>{2, 2, 2});
  CHECK(v.average == 2.0);
  CHECK(v.variance == 0.0);
  CHECK(v.standard_variance == 0.0);

  v = volatility(std::vector<std::uint64_t>{1, 3});
  CHECK(v.average == 2.0);
  CHECK(v.variance == 1.0);
  CHECK(v.standard_variance == 1.0);

  // (0-3)^2 * 3 + (12-3)^2 = 27 + 81 = 108; 108 / 4 = 27.
  v = volatility(std::vector<std::uint64_t>{0, 0, 0, 12});
  CHECK(v.average == 3.0);
  CHECK(v.variance == 27.0);
  CHECK(v.standard_variance == doctest::Approx(5.196152422706632).epsilon(1e-12));

  CHECK_THROWS_AS(volatility(std::vector<std::uint64_t>{}), InvariantError);
}

TEST_CASE("property: volatility matches the naive formulas exactly") {
  std::mt19937 rng(99);
  for (int round = 0; round < 500; ++round) {
    const auto len = std::uniform_int_distribution<std::size_t>(1, 100)(rng);
    std::vector<std::uint64_t> q(len);
    for (auto& x : q) x = std::uniform_int_distribution<std::uint64_t>(0, 1000)(rng);
    const auto v = volatility(q);
    const auto ref = testsupport::naive_volatility(q);
    CHECK(v.average == ref.average);
    CHECK(v.variance == ref.variance);
    CHECK(v.standard_variance == ref.standard_variance);
    CHECK(v.variance >= 0.0);
    if (v.variance > 0) {
      CHECK(std::abs(v.standard_variance * v.standard_variance - v.variance) / v.variance <= 1e-9);
    }
    std::vector<std::int64_t> idx(std::uniform_int_distribution<std::size_t>(0, 300)(rng));
    for (auto& i : idx) i = std::uniform_int_distribution<std::int64_t>(0, len - 1)(rng);
    CHECK(histogram(idx, static_cast<std::int64_t>(len)).total() == idx.size());
  }
}

TEST_CASE("block_average and pearson") {
  const std::vector<double> s{1, 2, 3, 4, 5, 6};
  CHECK(block_average(s, 3) == std::vector<double>{1.5, 3.5, 5.5});
  CHECK(block_average(s, 6) == s);
  CHECK(block_average(std::vector<double>{1, 2, 3, 4, 5}, 2) == std::vector<double>{1.5, 4.0});
  CHECK_THROWS_AS(block_average(s, 7), ConfigError);

  const std::vector<double> up{1, 2, 3, 4};
  const std::vector<double> down{4, 3, 2, 1};
  CHECK(pearson(up, up) == doctest::Approx(1.0));
  CHECK(pearson(up, down) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(pearson(up, std::vector<double>{2, 2, 2, 2}), UndefinedError);

  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = 0.5 * x[i] + g(rng);
  }
  CHECK(pearson(x, y) == doctest::Approx(testsupport::naive_pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("bytes_trend_correlation needs byte histograms and variation") {
  PerSecondHistogram a;
  a.range = 4;
  a.counts = {1, 2, 3, 4};
  a.bytes = std::vector<std::uint64_t>{10, 20, 30, 40};
  PerSecondHistogram b = a;
  CHECK(bytes_trend_correlation(a, b) == doctest::Approx(1.0));
  b.range = 2;
  b.counts = {3, 7};
  b.bytes = std::vector<std::uint64_t>{30, 70};
  CHECK(bytes_trend_correlation(a, b) == doctest::Approx(1.0));
  b.bytes = std::vector<std::uint64_t>{70, 30};
  CHECK(bytes_trend_correlation(a, b) == doctest::Approx(-1.0));
  b.bytes = std::vector<std::uint64_t>{5, 5};
  CHECK_THROWS_AS(bytes_trend_correlation(a, b), UndefinedError);
  b.bytes.reset();
  CHECK_THROWS_AS(bytes_trend_correlation(a, b), ConfigError);
}

TEST_CASE("fidelity: identity simulation has zero average delta") {
  auto seg = ingest::generate_synthetic({600, 20.0, 0.5, 4});
  seg.segment_id = "syn";
  const std::vector<SimulatedStream> streams{
      transform::simulate(seg, seg.span_seconds, SampleMode::systematic, "same")};
  const auto report = fidelity(seg, streams);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].abs_delta.average == 0.0);
  REQUIRE(report.rows[0].rel_average);
  CHECK(*report.rows[0].rel_average == 0.0);
  CHECK(report.original.range == 600);
  CHECK(report.original_count == seg.count());
  REQUIRE(report.rows[0].bytes_correlation);
  CHECK(*report.rows[0].bytes_correlation == doctest::Approx(1.0));
}

TEST_CASE("fidelity: two windows of one synthetic segment") {
  auto seg = ingest::generate_synthetic({14400, 25.0, 0.5, 9});
  seg.segment_id = "syn";
  const std::vector<SimulatedStream> streams{
      transform::simulate(seg, 100, SampleMode::systematic, "w100"),
      transform::simulate(seg, 600, SampleMode::systematic, "w600")};
  const auto report = fidelity(seg, streams);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(*row.rel_average < 0.05);
    CHECK(*row.bytes_correlation > 0.8);
  }
  const auto j = to_json(report);
  CHECK(j["simulated"].size() == 2);
  CHECK(j["original"]["range"] == 14400);
  const auto table = format_table(report);
  CHECK(table.find("Standard Variance") != std::string::npos);
  CHECK(table.find("w600") != std::string::npos);
}

TEST_CASE("fidelity: provenance mismatch") {
  auto seg = ingest::generate_synthetic({100, 5.0, 0.0, 1});
  seg.segment_id = "a";
  auto other = seg;
  other.segment_id = "b";
  const std::vector<SimulatedStream> streams{
      transform::simulate(other, 10, SampleMode::systematic, "x")};
  CHECK_THROWS_AS(fidelity(seg, streams), ConfigError);
}
