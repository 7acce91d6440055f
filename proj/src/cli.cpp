#include "chronoflow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "chronoflow/errors.hpp"
#include "chronoflow/ingest.hpp"
#include "chronoflow/metrics.hpp"
#include "chronoflow/replay.hpp"
#include "chronoflow/store.hpp"
#include "chronoflow/transform.hpp"

namespace chronoflow::cli {
namespace {

// Bad flag values found after parsing; reported like a parse error (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  std::int64_t span = 86400;
  double rate = 25.0;
  double amplitude = 0.5;
  std::uint64_t seed = 1;
  std::int64_t start = 1212249600;
  std::string out;
};

struct IngestArgs {
  std::string input;
  std::string delimiter = "\\t";
  std::string time_field = "0";
  std::string time_format = "epoch";
  std::string tz = "+00:00";
  std::optional<std::int64_t> span;
  std::string out;
};

struct SimulateArgs {
  std::string segment;
  std::int64_t range = 0;
  std::string mode = "systematic";
  std::string out;
};

struct ReplayArgs {
  std::string stream;
  std::string sink = "stdout";
  bool virtual_clock = false;
  std::string report;
};

struct StatsArgs {
  std::string stream;
  std::string segment;
};

struct ReportArgs {
  std::string segment;
  std::vector<std::string> streams;
  std::string out;
};

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void require_id(const std::string& flag, const std::string& id) {
  if (!store::is_valid_id(id)) {
    throw UsageError(flag + ": invalid id '" + id + "' (allowed: letters, digits, '.', '_', '-')");
  }
}

char parse_delimiter(const std::string& text) {
  if (text == "\\t" || text == "tab" || text == "TAB" || text == "\t") return '\t';
  if (text.size() == 1 && text[0] != '\n' && text[0] != '\r') return text[0];
  throw UsageError("--delimiter must be a single character (or \\t), got '" + text + "'");
}

ingest::Schema build_schema(const IngestArgs& a) {
  ingest::Schema schema;
  schema.delimiter = parse_delimiter(a.delimiter);
  try {
    schema.time = ingest::parse_time_format(a.time_format);
    schema.time.tz_offset_minutes = ingest::parse_tz_offset(a.tz);
    schema.time.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const bool numeric = !a.time_field.empty() &&
                       std::all_of(a.time_field.begin(), a.time_field.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
  if (numeric) {
    schema.time.field = static_cast<std::size_t>(std::stoull(a.time_field));
  } else if (!a.time_field.empty()) {
    schema.time.field = a.time_field;
  } else {
    throw UsageError("--time-field must be a column name or 0-based index");
  }
  return schema;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed: '" + path + "'");
}

int do_generate(const GenerateArgs& a, store::Store& st, std::ostream& out) {
  ingest::SyntheticSpec spec{a.span, a.rate, a.amplitude, a.seed, a.start};
  if (st.contains(store::Kind::segment, a.out)) {
    throw ConflictError("segment '" + a.out + "' already exists");
  }
  auto segment = ingest::generate_synthetic(spec);
  segment.segment_id = a.out;
  st.write_segment(segment);
  out << "segment " << a.out << ": " << segment.count() << " events, span " << segment.span_seconds
      << " s\n";
  return kExitOk;
}

int do_ingest(const IngestArgs& a, store::Store& st, std::ostream& out, std::ostream& err) {
  const auto schema = build_schema(a);
  if (st.contains(store::Kind::segment, a.out)) {
    throw ConflictError("segment '" + a.out + "' already exists");
  }
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw IoError("cannot open input '" + a.input + "'");
  const std::string rejects_path = a.out + ".rejects";
  std::ofstream rejects(rejects_path, std::ios::binary | std::ios::trunc);
  if (!rejects) throw IoError("cannot write '" + rejects_path + "'");

  auto result = ingest::ingest(in, schema, a.span, &rejects, &err);
  auto& segment = result.segment;
  segment.segment_id = a.out;
  segment.config = {{"source", "ingest"},
                    {"input", a.input},
                    {"delimiter", std::string(1, schema.delimiter)},
                    {"time_field", a.time_field},
                    {"time_format", a.time_format},
                    {"tz", a.tz},
                    {"declared_span", a.span ? std::to_string(*a.span) : ""},
                    {"parsed", std::to_string(result.stats.parsed)},
                    {"rejected", std::to_string(result.stats.rejected)}};
  st.write_segment(segment);
  out << "segment " << a.out << ": " << result.stats.parsed << " parsed, "
      << result.stats.rejected << " rejected (" << rejects_path << "), span "
      << segment.span_seconds << " s\n";
  return kExitOk;
}

int do_simulate(const SimulateArgs& a, store::Store& st, std::ostream& out) {
  const auto mode = [&] {
    try {
      return parse_sample_mode(a.mode);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }();
  const std::string id =
      a.out.empty() ? a.segment + "-" + std::to_string(a.range) + "s" : a.out;
  require_id("--out", id);
  if (st.contains(store::Kind::stream, id)) throw ConflictError("stream '" + id + "' already exists");
  const auto segment = st.read_segment(a.segment);
  const auto stream = transform::simulate(segment, a.range, mode, id);
  st.write_stream(stream);
  out << "stream " << id << ": " << stream.count() << " of " << segment.count()
      << " events kept, range " << stream.window << " s, multiple " << stream.multiple.str()
      << '\n';
  return kExitOk;
}

int do_replay(const ReplayArgs& a, store::Store& st, std::ostream& out, std::ostream& err) {
  std::unique_ptr<replay::Sink> sink;
  try {
    sink = a.sink == "stdout" ? std::make_unique<replay::OstreamSink>(out)
                              : replay::make_sink(a.sink);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const auto manifest = st.read_manifest(store::Kind::stream, a.stream);
  const auto buckets = replay::load(st, a.stream, manifest.window);
  sink->open();
  std::unique_ptr<replay::Clock> clock;
  if (a.virtual_clock) {
    clock = std::make_unique<replay::VirtualClock>();
  } else {
    clock = std::make_unique<replay::SteadyClock>();
  }
  const auto report = replay::replay(buckets, *sink, *clock);
  if (!a.report.empty()) write_text_file(a.report, replay::to_json(report).dump(2) + "\n");
  err << "replay " << a.stream << ": status " << report.status << ", " << report.total_events
      << " events, " << report.total_bytes << " bytes, " << report.ticks.size() << " ticks, wall "
      << report.wall_time_seconds << " s, max lateness " << report.max_lateness_ms() << " ms\n";
  if (report.status != 0) {
    print_error(err, "replay", report.error.value_or("replay failed"));
    return kExitFault;
  }
  return kExitOk;
}

int do_stats(const StatsArgs& a, store::Store& st, std::ostream& out) {
  std::string label;
  metrics::PerSecondHistogram hist;
  if (!a.stream.empty()) {
    const auto s = st.read_stream(a.stream);
    label = s.stream_id;
    hist = metrics::histogram(s);
  } else {
    const auto seg = st.read_segment(a.segment);
    label = seg.segment_id;
    hist = metrics::histogram(seg);
  }
  const std::pair<std::string, metrics::VolatilityStats> row{label, metrics::volatility(hist)};
  const std::int64_t range = hist.range;
  out << metrics::format_table({&row, 1}, {&range, 1});
  return kExitOk;
}

int do_report(const ReportArgs& a, store::Store& st, std::ostream& out) {
  const auto segment = st.read_segment(a.segment);
  std::vector<SimulatedStream> streams;
  for (const auto& id : a.streams) streams.push_back(st.read_stream(id));
  const auto report = metrics::fidelity(segment, streams);
  const auto table = metrics::format_table(report);
  write_text_file(a.out, metrics::to_json(report).dump(2) + "\n");
  write_text_file(a.out + ".txt", table);
  out << table;
  return kExitOk;
}

int do_list(store::Store& st, std::ostream& out, std::ostream& err) {
  const auto catalog = st.list();
  char line[256];
  for (const auto& m : catalog.entries) {
    const bool seg = m.kind == store::Kind::segment;
    std::snprintf(line, sizeof line, "%-8s %-32s %12llu %8s=%-8lld %.12s\n", store::to_string(m.kind),
                  m.id.c_str(), static_cast<unsigned long long>(m.count), seg ? "span" : "range",
                  static_cast<long long>(seg ? m.span_seconds : m.window), m.digest.c_str());
    out << line;
  }
  for (const auto& e : catalog.errors) print_error(err, "list", e.path.string() + ": " + e.message);
  return catalog.errors.empty() ? kExitOk : kExitFault;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compress day-scale event logs into short windows and replay them in real time",
               "chronoflow"};
  app.require_subcommand(1);
  std::string store_root;
  app.add_option("--store", store_root, "Store root (default: $CHRONO_STORE or ./chrono-store)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic diurnal segment");
  generate->add_option("--span", gen.span, "Span in seconds")->check(CLI::PositiveNumber);
  generate->add_option("--rate", gen.rate, "Mean events per second")->check(CLI::PositiveNumber);
  generate->add_option("--amplitude", gen.amplitude, "Diurnal amplitude in [0, 1)")
      ->check(CLI::Range(0.0, 0.999999999));
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--start", gen.start, "First epoch second")->check(CLI::NonNegativeNumber);
  generate->add_option("--out", gen.out, "Segment id")->required();

  IngestArgs ing;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse a delimited log into a segment");
  ingest_cmd->add_option("--input", ing.input, "Input file")->required();
  ingest_cmd->add_option("--delimiter", ing.delimiter, "Field delimiter (default TAB)");
  ingest_cmd->add_option("--time-field", ing.time_field,
                         "Time column: header name, or 0-based index (default 0)");
  ingest_cmd->add_option("--time-format", ing.time_format, "epoch | epoch-ms | pattern:STR");
  ingest_cmd->add_option("--tz", ing.tz, "Offset of wall-clock times, +HH:MM");
  ingest_cmd->add_option("--span", ing.span, "Declared original span in seconds")
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--out", ing.out, "Segment id")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Normalize and sample a segment into a stream");
  simulate->add_option("--segment", sim.segment, "Source segment id")->required();
  simulate->add_option("--range", sim.range, "Target time range W in seconds")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--mode", sim.mode, "systematic | prefix")
      ->check(CLI::IsMember({"systematic", "prefix"}));
  simulate->add_option("--out", sim.out, "Stream id (default <segment>-<range>s)");

  ReplayArgs rep;
  auto* replay_cmd = app.add_subcommand("replay", "Emit a stream one bucket per second");
  replay_cmd->add_option("--stream", rep.stream, "Stream id")->required();
  replay_cmd->add_option("--sink", rep.sink, "stdout | file:PATH | tcp:HOST:PORT");
  replay_cmd->add_flag("--virtual-clock", rep.virtual_clock, "Advance time instantly");
  replay_cmd->add_option("--report", rep.report, "Write the replay report (JSON) here");

  StatsArgs sta;
  auto* stats = app.add_subcommand("stats", "Print the volatility of a stream or segment");
  auto* stats_stream = stats->add_option("--stream", sta.stream, "Stream id");
  auto* stats_segment = stats->add_option("--segment", sta.segment, "Segment id");
  stats_stream->excludes(stats_segment);
  stats_segment->excludes(stats_stream);
  stats->require_option(1);

  ReportArgs rpt;
  auto* report = app.add_subcommand("report", "Compare a segment with its simulated streams");
  report->add_option("--segment", rpt.segment, "Segment id")->required();
  report->add_option("--streams", rpt.streams, "Comma-separated stream ids")
      ->required()
      ->delimiter(',');
  report->add_option("--out", rpt.out, "JSON report path (table goes to PATH.txt)")->required();

  app.add_subcommand("list", "List stored segments and streams");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    print_error(err, "usage", e.what());
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (generate->parsed()) require_id("--out", gen.out);
    if (ingest_cmd->parsed()) require_id("--out", ing.out);
    if (simulate->parsed()) require_id("--segment", sim.segment);
    if (replay_cmd->parsed()) require_id("--stream", rep.stream);
    if (stats->parsed()) require_id(sta.stream.empty() ? "--segment" : "--stream",
                                    sta.stream.empty() ? sta.segment : sta.stream);
    if (report->parsed()) {
      require_id("--segment", rpt.segment);
      for (const auto& id : rpt.streams) require_id("--streams", id);
    }

    store::Store st(store_root.empty() ? store::Store::default_root()
                                      : std::filesystem::path(store_root));
    if (generate->parsed()) return do_generate(gen, st, out);
    if (ingest_cmd->parsed()) return do_ingest(ing, st, out, err);
    if (simulate->parsed()) return do_simulate(sim, st, out);
    if (replay_cmd->parsed()) return do_replay(rep, st, out, err);
    if (stats->parsed()) return do_stats(sta, st, out);
    if (report->parsed()) return do_report(rpt, st, out);
    return do_list(st, out, err);
  } catch (const UsageError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return kExitFault;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kExitFault;
  }
}

}  // namespace chronoflow::cli
