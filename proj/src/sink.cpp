#include "chronoflow/sink.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <iostream>

#include "chronoflow/errors.hpp"

namespace chronoflow::replay {

std::string frame_batch(std::span<const std::string> batch) {
  std::size_t size = 0;
  for (const auto& r : batch) size += r.size() + 1;
  std::string out;
  out.reserve(size);
  for (const auto& r : batch) {
    if (r.find('\n') != std::string::npos) throw ConfigError("record contains a newline");
    out += r;
    out += '\n';
  }
  return out;
}

void OstreamSink::emit(std::span<const std::string> batch) {
  if (!out_) throw IoError("sink is not open");
  const auto framed = frame_batch(batch);
  out_->write(framed.data(), static_cast<std::streamsize>(framed.size()));
  out_->flush();
  if (!*out_) throw IoError("write to output stream failed");
  account(batch.size(), framed.size());
}

void OstreamSink::close() {
  if (out_) out_->flush();
}

void FileSink::open() {
  file_.open(path_, std::ios::binary | std::ios::app);
  if (!file_) throw IoError("cannot open '" + path_ + "' for appending");
  out_ = &file_;
}

void FileSink::close() {
  if (!file_.is_open()) return;
  file_.close();
  out_ = nullptr;
  if (file_.fail()) throw IoError("closing '" + path_ + "' failed");
}

TcpSink::~TcpSink() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpSink::open() {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port = std::to_string(port_);
  if (const int rc = ::getaddrinfo(host_.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw ConnectionError("cannot resolve " + host_ + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no addresses";
  for (auto* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) {
    throw ConnectionError("cannot connect to " + host_ + ":" + port + ": " + last_error);
  }
}

void TcpSink::emit(std::span<const std::string> batch) {
  if (fd_ < 0) throw ConnectionError("tcp sink is not connected");
  const auto framed = frame_batch(batch);
  std::size_t sent = 0;
  while (sent < framed.size()) {
    const auto n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      account(0, sent);
      throw ConnectionError(std::string("tcp send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  account(batch.size(), sent);
}

void TcpSink::close() {
  if (fd_ < 0) return;
  ::shutdown(fd_, SHUT_WR);
  ::close(fd_);
  fd_ = -1;
}

std::unique_ptr<Sink> make_sink(const std::string& spec) {
  std::unique_ptr<Sink> sink;
  if (spec == "stdout") {
    sink = std::make_unique<OstreamSink>(std::cout);
  } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    sink = std::make_unique<FileSink>(spec.substr(5));
  } else if (spec.rfind("tcp:", 0) == 0) {
    const auto rest = spec.substr(4);
    const auto colon = rest.rfind(':');
    std::uint16_t port = 0;
    if (colon == std::string::npos || colon == 0) {
      throw ConfigError("malformed tcp sink '" + spec + "' (expected tcp:HOST:PORT)");
    }
    std::string host = rest.substr(0, colon);
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
      host = host.substr(1, host.size() - 2);
    }
    const auto port_text = std::string_view(rest).substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0) {
      throw ConfigError("malformed tcp port in '" + spec + "'");
    }
    sink = std::make_unique<TcpSink>(std::move(host), port);
  } else if (spec.rfind("broker:", 0) == 0) {
    throw ConfigError("broker sinks are a reserved extension point and not available");
  } else {
    throw ConfigError("unknown sink '" + spec + "' (expected stdout | file:PATH | tcp:HOST:PORT)");
  }
  return sink;
}

std::unique_ptr<Sink> open_sink(const std::string& spec) {
  auto sink = make_sink(spec);
  sink->open();
  return sink;
}

}  // namespace chronoflow::replay
