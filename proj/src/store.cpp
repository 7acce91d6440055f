#include "chronoflow/store.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chronoflow/digest.hpp"
#include "chronoflow/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace chronoflow::store {
namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kDataFile = "data.tsv";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void require_id(const std::string& id) {
  if (!is_valid_id(id)) {
    throw ConfigError("invalid id '" + id + "' (allowed: letters, digits, '.', '_', '-')");
  }
}

void check_payload(const std::string& payload, const std::string& owner) {
  if (payload.find('\n') != std::string::npos) {
    throw ConfigError("payload in '" + owner + "' contains a newline");
  }
}

std::int64_t parse_int(std::string_view text, std::size_t line_no, const std::string& id) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw CorruptionError("'" + id + "' data line " + std::to_string(line_no) +
                          ": bad integer field '" + std::string(text) + "'");
  }
  return v;
}

// Calls fn(line, line_no) for each '\n'-terminated line.
template <typename Fn>
void for_each_line(const std::string& data, const std::string& id, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      throw CorruptionError("'" + id + "' data file lacks a final newline");
    }
    fn(std::string_view(data).substr(pos, nl - pos), ++line_no);
    pos = nl + 1;
  }
}

std::string_view take_field(std::string_view& line, std::size_t line_no, const std::string& id) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw CorruptionError("'" + id + "' data line " + std::to_string(line_no) +
                          ": missing TAB separator");
  }
  auto field = line.substr(0, tab);
  line.remove_prefix(tab + 1);
  return field;
}

json manifest_json(const Manifest& m) {
  json j = {{"format_version", kFormatVersion},
            {"kind", to_string(m.kind)},
            {"id", m.id},
            {"count", m.count},
            {"digest", {{"algorithm", "sha256"}, {"value", m.digest}}},
            {"data_bytes", m.data_bytes},
            {"config", m.config}};
  if (m.kind == Kind::segment) {
    j["t_min"] = m.t_min;
    j["t_max"] = m.t_max;
    j["span_seconds"] = m.span_seconds;
  } else {
    j["range"] = m.window;
    j["multiple"] = m.multiple;
    j["mode"] = m.mode;
    j["source_segment"] = m.source_segment;
  }
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  if (j.at("format_version").get<int>() != kFormatVersion) {
    throw CorruptionError("unsupported manifest format_version");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "segment") {
    m.kind = Kind::segment;
  } else if (kind == "stream") {
    m.kind = Kind::stream;
  } else {
    throw CorruptionError("unknown manifest kind '" + kind + "'");
  }
  m.id = j.at("id").get<std::string>();
  m.count = j.at("count").get<std::uint64_t>();
  if (j.at("digest").at("algorithm").get<std::string>() != "sha256") {
    throw CorruptionError("unsupported digest algorithm");
  }
  m.digest = j.at("digest").at("value").get<std::string>();
  m.data_bytes = j.at("data_bytes").get<std::uint64_t>();
  m.config = j.at("config").get<ConfigEcho>();
  if (m.kind == Kind::segment) {
    m.t_min = j.at("t_min").get<EpochSeconds>();
    m.t_max = j.at("t_max").get<EpochSeconds>();
    m.span_seconds = j.at("span_seconds").get<std::int64_t>();
  } else {
    m.window = j.at("range").get<std::int64_t>();
    m.multiple = j.at("multiple").get<std::string>();
    m.mode = j.at("mode").get<std::string>();
    m.source_segment = j.at("source_segment").get<std::string>();
  }
  return m;
}

Manifest parse_manifest(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return manifest_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw CorruptionError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace

const char* to_string(Kind kind) noexcept { return kind == Kind::segment ? "segment" : "stream"; }

bool is_valid_id(const std::string& id) {
  if (id.empty() || id.size() > 200 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

std::string encode_segment_data(const StreamSegment& segment) {
  std::string out;
  for (const auto& ev : segment.events) {
    check_payload(ev.payload, segment.segment_id);
    out += std::to_string(ev.t);
    out += '\t';
    out += ev.payload;
    out += '\n';
  }
  return out;
}

std::string encode_stream_data(const SimulatedStream& stream) {
  std::string out;
  for (const auto& ev : stream.events) {
    check_payload(ev.payload, stream.stream_id);
    out += std::to_string(ev.scale_stamp);
    out += '\t';
    out += std::to_string(ev.t_original);
    out += '\t';
    out += ev.payload;
    out += '\n';
  }
  return out;
}

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::default_root() {
  if (const char* env = std::getenv("CHRONO_STORE"); env && *env) return env;
  return "chrono-store";
}

fs::path Store::entry_dir(Kind kind, const std::string& id) const {
  return root_ / to_string(kind) / id;
}

fs::path Store::data_path(Kind kind, const std::string& id) const {
  return entry_dir(kind, id) / kDataFile;
}

bool Store::contains(Kind kind, const std::string& id) const {
  std::error_code ec;
  return is_valid_id(id) && fs::exists(entry_dir(kind, id) / kManifestFile, ec);
}

void Store::commit(Kind kind, const std::string& id, const std::string& data,
                   const std::string& manifest_text) {
  const auto final_dir = entry_dir(kind, id);
  std::error_code ec;
  if (fs::exists(final_dir, ec)) {
    throw ConflictError(std::string(to_string(kind)) + " '" + id + "' already exists");
  }
  fs::create_directories(final_dir.parent_path(), ec);
  if (ec) throw IoError("cannot create " + final_dir.parent_path().string() + ": " + ec.message());

  static std::atomic<unsigned> counter{0};
  const auto staging = final_dir.parent_path() /
                       (".tmp-" + id + "-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot create " + staging.string() + ": " + ec.message());
  try {
    write_file(staging / kDataFile, data);
    write_file(staging / kManifestFile, manifest_text);
    if (fs::exists(final_dir)) {
      throw ConflictError(std::string(to_string(kind)) + " '" + id + "' already exists");
    }
    fs::rename(staging, final_dir);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw IoError(std::string("commit failed: ") + e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

std::string Store::write_segment(const StreamSegment& segment) {
  require_id(segment.segment_id);
  const auto data = encode_segment_data(segment);
  Manifest m;
  m.kind = Kind::segment;
  m.id = segment.segment_id;
  m.count = segment.count();
  m.digest = sha256_hex(data);
  m.data_bytes = data.size();
  m.t_min = segment.t_min;
  m.t_max = segment.t_max;
  m.span_seconds = segment.span_seconds;
  m.config = segment.config;
  commit(Kind::segment, m.id, data, manifest_json(m).dump(2) + "\n");
  return m.id;
}

std::string Store::write_stream(const SimulatedStream& stream) {
  require_id(stream.stream_id);
  const auto data = encode_stream_data(stream);
  Manifest m;
  m.kind = Kind::stream;
  m.id = stream.stream_id;
  m.count = stream.count();
  m.digest = sha256_hex(data);
  m.data_bytes = data.size();
  m.window = stream.window;
  m.multiple = stream.multiple.str();
  m.mode = to_string(stream.mode);
  m.source_segment = stream.source_segment_id;
  m.config = stream.config;
  commit(Kind::stream, m.id, data, manifest_json(m).dump(2) + "\n");
  return m.id;
}

Manifest Store::read_manifest(Kind kind, const std::string& id) const {
  require_id(id);
  const auto dir = entry_dir(kind, id);
  std::error_code ec;
  if (!fs::exists(dir, ec)) {
    const Kind other = kind == Kind::segment ? Kind::stream : Kind::segment;
    if (fs::exists(entry_dir(other, id), ec)) {
      throw KindMismatchError("'" + id + "' is a " + to_string(other) + ", not a " +
                              to_string(kind));
    }
    throw NotFoundError(std::string(to_string(kind)) + " '" + id + "' not found in " +
                        root_.string());
  }
  const auto manifest_path = dir / kManifestFile;
  if (!fs::exists(manifest_path, ec)) {
    throw CorruptionError(std::string(to_string(kind)) + " '" + id + "' has no manifest");
  }
  auto m = parse_manifest(manifest_path);
  if (m.kind != kind || m.id != id) {
    throw CorruptionError("manifest at " + manifest_path.string() + " describes " +
                          to_string(m.kind) + " '" + m.id + "'");
  }
  return m;
}

std::pair<Manifest, std::string> Store::load_verified(Kind kind, const std::string& id) const {
  auto m = read_manifest(kind, id);
  std::string data = read_file(entry_dir(kind, id) / kDataFile);
  if (data.size() != m.data_bytes || sha256_hex(data) != m.digest) {
    throw CorruptionError(std::string(to_string(kind)) + " '" + id +
                          "': data digest does not match manifest");
  }
  return {std::move(m), std::move(data)};
}

StreamSegment Store::read_segment(const std::string& id) const {
  auto [m, data] = load_verified(Kind::segment, id);
  StreamSegment seg;
  seg.segment_id = m.id;
  seg.span_seconds = m.span_seconds;
  seg.t_min = m.t_min;
  seg.t_max = m.t_max;
  seg.config = std::move(m.config);
  seg.events.reserve(m.count);
  for_each_line(data, id, [&](std::string_view line, std::size_t no) {
    const auto t = parse_int(take_field(line, no, id), no, id);
    seg.events.push_back(Event{t, std::string(line)});
  });
  if (seg.events.size() != m.count) {
    throw CorruptionError("segment '" + id + "': manifest count disagrees with data");
  }
  return seg;
}

SimulatedStream Store::read_stream(const std::string& id) const {
  auto [m, data] = load_verified(Kind::stream, id);
  SimulatedStream s;
  s.stream_id = m.id;
  s.window = m.window;
  try {
    s.multiple = Rational::parse(m.multiple);
    s.mode = parse_sample_mode(m.mode);
  } catch (const Error& e) {
    throw CorruptionError("stream '" + id + "': " + e.what());
  }
  s.source_segment_id = m.source_segment;
  s.config = std::move(m.config);
  s.events.reserve(m.count);
  for_each_line(data, id, [&](std::string_view line, std::size_t no) {
    const auto stamp = parse_int(take_field(line, no, id), no, id);
    const auto t = parse_int(take_field(line, no, id), no, id);
    s.events.push_back(ScaledEvent{stamp, t, std::string(line)});
  });
  if (s.events.size() != m.count) {
    throw CorruptionError("stream '" + id + "': manifest count disagrees with data");
  }
  return s;
}

Catalog Store::list() const {
  Catalog catalog;
  for (const Kind kind : {Kind::segment, Kind::stream}) {
    const auto kind_dir = root_ / to_string(kind);
    std::error_code ec;
    if (!fs::is_directory(kind_dir, ec)) continue;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(kind_dir, ec)) {
      const auto name = entry.path().filename().string();
      if (!entry.is_directory() || name.empty() || name.front() == '.') continue;
      dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
      try {
        catalog.entries.push_back(read_manifest(kind, dir.filename().string()));
      } catch (const Error& e) {
        catalog.errors.push_back({dir, e.what()});
      }
    }
  }
  return catalog;
}

}  // namespace chronoflow::store
