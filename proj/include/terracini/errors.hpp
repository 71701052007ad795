#pragma once

#include <stdexcept>
#include <string>

namespace terracini {

enum class ErrorKind { usage, domain, unsupported, numerical, not_hyperbolic };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported: return "unsupported-operation";
    case ErrorKind::numerical: return "numerical-failure";
    case ErrorKind::not_hyperbolic: return "not-hyperbolic";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
  throw Error(kind, detail);
}

inline void require(bool cond, const std::string& detail) {
  if (!cond) fail(ErrorKind::usage, detail);
}

}  // namespace terracini
