#pragma once

#include <stdexcept>
#include <string>

namespace ssep {

enum class ErrorKind {
  Domain,     // argument outside the operation's mathematical domain
  Size,       // state space or grid too large for the requested method
  Numerical,  // quadrature / iteration failed to reach tolerance
  Config,     // invalid experiment configuration or profile class violation
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace ssep
