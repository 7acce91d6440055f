#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chronoflow/types.hpp"

namespace chronoflow::store {

enum class Kind { segment, stream };

const char* to_string(Kind kind) noexcept;

struct Manifest {
  Kind kind = Kind::segment;
  std::string id;
  std::uint64_t count = 0;
  std::string digest;  // sha256 hex of data.tsv
  std::uint64_t data_bytes = 0;
  // segment
  EpochSeconds t_min = 0;
  EpochSeconds t_max = 0;
  std::int64_t span_seconds = 0;
  // stream
  std::int64_t window = 0;
  std::string multiple;
  std::string mode;
  std::string source_segment;
  ConfigEcho config;
};

struct ListError {
  std::filesystem::path path;
  std::string message;
};

struct Catalog {
  std::vector<Manifest> entries;
  std::vector<ListError> errors;
};

// Accepts [A-Za-z0-9._-]{1,200} not starting with '.'.
bool is_valid_id(const std::string& id);

// Data line encodings; exposed for tests and tools.
std::string encode_segment_data(const StreamSegment& segment);
std::string encode_stream_data(const SimulatedStream& stream);

// On-disk layout under the root:
//   <root>/segment/<id>/{manifest.json,data.tsv}
//   <root>/stream/<id>/{manifest.json,data.tsv}
// Writes are staged in a hidden sibling directory and renamed into place.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  // CHRONO_STORE if set, else ./chrono-store.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const noexcept { return root_; }

  std::string write_segment(const StreamSegment& segment);
  StreamSegment read_segment(const std::string& id) const;

  std::string write_stream(const SimulatedStream& stream);
  SimulatedStream read_stream(const std::string& id) const;

  bool contains(Kind kind, const std::string& id) const;
  Manifest read_manifest(Kind kind, const std::string& id) const;
  std::filesystem::path data_path(Kind kind, const std::string& id) const;

  Catalog list() const;

 private:
  std::filesystem::path entry_dir(Kind kind, const std::string& id) const;
  void commit(Kind kind, const std::string& id, const std::string& data,
              const std::string& manifest_text);
  // Verifies the manifest and digest; returns the manifest and the data bytes.
  std::pair<Manifest, std::string> load_verified(Kind kind, const std::string& id) const;

  std::filesystem::path root_;
};

}  // namespace chronoflow::store
