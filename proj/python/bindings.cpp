#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "chronoflow/cli.hpp"
#include "chronoflow/errors.hpp"
#include "chronoflow/ingest.hpp"
#include "chronoflow/metrics.hpp"
#include "chronoflow/replay.hpp"
#include "chronoflow/store.hpp"
#include "chronoflow/transform.hpp"

namespace py = pybind11;
using namespace chronoflow;

namespace {

ingest::TimeFieldSpec time_spec(const std::string& format, const std::string& tz) {
  auto spec = ingest::parse_time_format(format);
  spec.tz_offset_minutes = ingest::parse_tz_offset(tz);
  spec.validate();
  return spec;
}

py::tuple ingest_text(const std::string& text, const std::string& delimiter,
                      const std::variant<std::size_t, std::string>& time_field,
                      const std::string& time_format, const std::string& tz,
                      std::optional<std::int64_t> span, const std::string& segment_id) {
  if (delimiter.size() != 1) throw ConfigError("delimiter must be one character");
  ingest::Schema schema;
  schema.delimiter = delimiter[0];
  schema.time = time_spec(time_format, tz);
  schema.time.field = time_field;
  std::istringstream in(text);
  std::ostringstream rejects;
  auto result = ingest::ingest(in, schema, span, &rejects);
  result.segment.segment_id = segment_id;
  py::dict stats;
  stats["input_lines"] = result.stats.input_lines;
  stats["parsed"] = result.stats.parsed;
  stats["rejected"] = result.stats.rejected;
  return py::make_tuple(std::move(result.segment), stats, rejects.str());
}

std::vector<std::uint64_t> counts_of(const metrics::PerSecondHistogram& h) { return h.counts; }

py::dict stats_dict(const metrics::VolatilityStats& s) {
  py::dict d;
  d["average"] = s.average;
  d["variance"] = s.variance;
  d["standard_variance"] = s.standard_variance;
  return d;
}

std::string replay_json(const SimulatedStream& stream, const std::string& sink_spec,
                        bool virtual_clock) {
  auto sink = replay::open_sink(sink_spec);
  std::unique_ptr<replay::Clock> clock;
  if (virtual_clock) {
    clock = std::make_unique<replay::VirtualClock>();
  } else {
    clock = std::make_unique<replay::SteadyClock>();
  }
  replay::ReplayReport report;
  {
    py::gil_scoped_release release;
    report = replay::replay(replay::bucketize(stream), *sink, *clock);
  }
  return replay::to_json(report).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Time-compressed replay of timestamped event streams.";

  auto base = py::register_exception<Error>(m, "ChronoflowError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<CorruptionError>(m, "CorruptionError", base.ptr());
  py::register_exception<KindMismatchError>(m, "KindMismatchError", base.ptr());
  py::register_exception<ConnectionError>(m, "ConnectionError", base.ptr());
  py::register_exception<UndefinedError>(m, "UndefinedError", base.ptr());

  py::class_<Event>(m, "Event")
      .def(py::init<EpochSeconds, std::string>(), py::arg("t"), py::arg("payload"))
      .def_readwrite("t", &Event::t)
      .def_readwrite("payload", &Event::payload)
      .def("__repr__", [](const Event& e) {
        return "Event(t=" + std::to_string(e.t) + ", payload=" + py::repr(py::str(e.payload)).cast<std::string>() + ")";
      });

  py::class_<StreamSegment>(m, "StreamSegment")
      .def(py::init([](std::string id, std::vector<Event> events, std::optional<std::int64_t> span) {
             StreamSegment s;
             s.segment_id = std::move(id);
             s.events = std::move(events);
             finalize_segment(s);
             s.span_seconds = span.value_or(s.t_max - s.t_min + 1);
             if (s.span_seconds < 1) throw ConfigError("span must be >= 1");
             return s;
           }),
           py::arg("segment_id"), py::arg("events"), py::arg("span_seconds") = py::none())
      .def_readwrite("segment_id", &StreamSegment::segment_id)
      .def_readonly("events", &StreamSegment::events)
      .def_readonly("t_min", &StreamSegment::t_min)
      .def_readonly("t_max", &StreamSegment::t_max)
      .def_readonly("span_seconds", &StreamSegment::span_seconds)
      .def_readonly("config", &StreamSegment::config)
      .def_property_readonly("count", &StreamSegment::count)
      .def("__len__", &StreamSegment::count)
      .def(py::self == py::self);

  py::class_<ScaledEvent>(m, "ScaledEvent")
      .def_readonly("scale_stamp", &ScaledEvent::scale_stamp)
      .def_readonly("t_original", &ScaledEvent::t_original)
      .def_readonly("payload", &ScaledEvent::payload);

  py::class_<SimulatedStream>(m, "SimulatedStream")
      .def_readwrite("stream_id", &SimulatedStream::stream_id)
      .def_readonly("range", &SimulatedStream::window)
      .def_property_readonly("multiple", [](const SimulatedStream& s) { return s.multiple.str(); })
      .def_property_readonly("mode", [](const SimulatedStream& s) { return to_string(s.mode); })
      .def_readonly("events", &SimulatedStream::events)
      .def_readonly("source_segment_id", &SimulatedStream::source_segment_id)
      .def_readonly("config", &SimulatedStream::config)
      .def_property_readonly("count", &SimulatedStream::count)
      .def("__len__", &SimulatedStream::count)
      .def(py::self == py::self);

  m.def("parse_time", [](const std::string& raw, const std::string& format, const std::string& tz) {
    return ingest::parse_time(raw, time_spec(format, tz));
  }, py::arg("raw"), py::arg("format") = "epoch", py::arg("tz") = "+00:00");

  m.def("ingest_text", &ingest_text, py::arg("text"), py::arg("delimiter") = "\t",
        py::arg("time_field") = std::size_t{0}, py::arg("time_format") = "epoch",
        py::arg("tz") = "+00:00", py::arg("span") = py::none(), py::arg("segment_id") = "",
        "Parse newline-delimited records; returns (segment, stats, rejected_text).");

  m.def("generate_synthetic",
        [](std::int64_t span, double rate, double amplitude, std::uint64_t seed,
           const std::string& segment_id) {
          auto s = ingest::generate_synthetic({span, rate, amplitude, seed});
          s.segment_id = segment_id;
          return s;
        },
        py::arg("span"), py::arg("mean_rate"), py::arg("amplitude") = 0.0, py::arg("seed") = 0,
        py::arg("segment_id") = "synthetic");

  m.def("simulate",
        [](const StreamSegment& seg, std::int64_t range, const std::string& mode,
           const std::string& stream_id) {
          return transform::simulate(seg, range, parse_sample_mode(mode), stream_id);
        },
        py::arg("segment"), py::arg("range"), py::arg("mode") = "systematic",
        py::arg("stream_id") = "");

  m.def("scale_stamps", [](const StreamSegment& seg, std::int64_t range) {
    std::vector<std::int64_t> out;
    for (const auto& e : transform::normalize(seg, range)) out.push_back(e.scale_stamp);
    return out;
  }, py::arg("segment"), py::arg("range"));

  m.def("histogram", [](const StreamSegment& s) { return counts_of(metrics::histogram(s)); });
  m.def("histogram", [](const SimulatedStream& s) { return counts_of(metrics::histogram(s)); });
  m.def("volatility", [](const std::vector<std::uint64_t>& counts) {
    return stats_dict(metrics::volatility(counts));
  }, py::arg("counts"));
  m.def("bytes_trend_correlation", [](const StreamSegment& seg, const SimulatedStream& s) {
    return metrics::bytes_trend_correlation(metrics::histogram(seg), metrics::histogram(s));
  });
  m.def("_fidelity_json", [](const StreamSegment& seg, const std::vector<SimulatedStream>& streams) {
    return metrics::to_json(metrics::fidelity(seg, streams)).dump();
  });
  m.def("_replay_json", &replay_json, py::arg("stream"), py::arg("sink"),
        py::arg("virtual_clock") = true);

  py::class_<store::Store>(m, "Store")
      .def(py::init<std::filesystem::path>(), py::arg("root"))
      .def_property_readonly("root", &store::Store::root)
      .def("write_segment", &store::Store::write_segment)
      .def("read_segment", &store::Store::read_segment)
      .def("write_stream", &store::Store::write_stream)
      .def("read_stream", &store::Store::read_stream)
      .def("list", [](const store::Store& st) {
        const auto cat = st.list();
        py::list entries;
        for (const auto& e : cat.entries) {
          py::dict d;
          d["kind"] = store::to_string(e.kind);
          d["id"] = e.id;
          d["count"] = e.count;
          d["digest"] = e.digest;
          entries.append(d);
        }
        py::list errors;
        for (const auto& e : cat.errors) errors.append(py::make_tuple(e.path.string(), e.message));
        return py::make_tuple(entries, errors);
      });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run a chronoflow subcommand; returns (exit_code, stdout, stderr).");
}
