#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <span>
#include <string>

namespace chronoflow::replay {

// Destination for replayed records. Every reference sink frames records with
// a trailing '\n'; bytes_emitted() counts payload plus framing bytes written.
class Sink {
 public:
  virtual ~Sink() = default;

  virtual void open() = 0;
  // Delivers the batch in order. Throws on failure.
  virtual void emit(std::span<const std::string> batch) = 0;
  virtual void close() = 0;

  std::uint64_t bytes_emitted() const noexcept { return bytes_; }
  std::uint64_t records_emitted() const noexcept { return records_; }

 protected:
  void account(std::uint64_t records, std::uint64_t bytes) noexcept {
    records_ += records;
    bytes_ += bytes;
  }

 private:
  std::uint64_t bytes_ = 0;
  std::uint64_t records_ = 0;
};

// Newline-framed records on any std::ostream (stdout sink, tests).
class OstreamSink : public Sink {
 public:
  explicit OstreamSink(std::ostream& out) : out_(&out) {}

  void open() override {}
  void emit(std::span<const std::string> batch) override;
  void close() override;

 protected:
  OstreamSink() = default;
  std::ostream* out_ = nullptr;
};

// Appends newline-framed records to a file.
class FileSink final : public OstreamSink {
 public:
  explicit FileSink(std::string path) : path_(std::move(path)) {}

  void open() override;
  void close() override;

 private:
  std::string path_;
  std::ofstream file_;
};

// One record per line over a TCP connection; the connection is made in open()
// and shut down cleanly in close().
class TcpSink final : public Sink {
 public:
  TcpSink(std::string host, std::uint16_t port) : host_(std::move(host)), port_(port) {}
  ~TcpSink() override;
  TcpSink(const TcpSink&) = delete;
  TcpSink& operator=(const TcpSink&) = delete;

  void open() override;
  void emit(std::span<const std::string> batch) override;
  void close() override;

 private:
  std::string host_;
  std::uint16_t port_;
  int fd_ = -1;
};

// Builds an unopened sink from the grammar; throws ConfigError.
std::unique_ptr<Sink> make_sink(const std::string& spec);

// Builds and opens a sink from `stdout | file:PATH | tcp:HOST:PORT`.
// `broker:` is reserved and rejected. Throws ConfigError, IoError or
// ConnectionError.
std::unique_ptr<Sink> open_sink(const std::string& spec);

// The newline-framed encoding shared by the reference sinks.
std::string frame_batch(std::span<const std::string> batch);

}  // namespace chronoflow::replay
