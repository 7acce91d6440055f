#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chronoflow {

// Every failure raised by the library derives from Error and carries a stable
// machine-readable kind, which the CLI prints on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CHRONOFLOW_DEFINE_ERROR(Name, tag)                        \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(tag, what) {} \
  };

CHRONOFLOW_DEFINE_ERROR(ParseError, "parse")
CHRONOFLOW_DEFINE_ERROR(RangeError, "range")
CHRONOFLOW_DEFINE_ERROR(ConfigError, "config")
CHRONOFLOW_DEFINE_ERROR(EmptyInputError, "empty_input")
CHRONOFLOW_DEFINE_ERROR(NotFoundError, "not_found")
CHRONOFLOW_DEFINE_ERROR(ConflictError, "conflict")
CHRONOFLOW_DEFINE_ERROR(CorruptionError, "corruption")
CHRONOFLOW_DEFINE_ERROR(KindMismatchError, "kind_mismatch")
CHRONOFLOW_DEFINE_ERROR(IoError, "io")
CHRONOFLOW_DEFINE_ERROR(ConnectionError, "connection")
CHRONOFLOW_DEFINE_ERROR(UndefinedError, "undefined")
// Raised when an internal invariant is broken; always a bug upstream.
CHRONOFLOW_DEFINE_ERROR(InvariantError, "invariant")

#undef CHRONOFLOW_DEFINE_ERROR

}  // namespace chronoflow
