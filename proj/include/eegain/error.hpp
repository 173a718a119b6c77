#pragma once

#include <stdexcept>
#include <string>

namespace eegain {

// Broad failure classes. The CLI maps them onto exit codes: invalid_argument
// and data -> 2, io -> 3.
enum class ErrorKind {
  invalid_argument,  // precondition violated by the caller
  data,              // malformed or inconsistent dataset / config content
  io,                // filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what,
                    ErrorKind kind = ErrorKind::invalid_argument) {
  if (!condition) throw Error(kind, what);
}

}  // namespace eegain
