#pragma once

#include <stdexcept>
#include <string>

namespace bitopt {

enum class ErrorKind {
  Parse,        // malformed input text (N-Triples or query)
  Io,           // filesystem problems
  Unsupported,  // valid input the index-backed engine cannot evaluate
  Rejected,     // query violates a structural requirement (unsafe filter, not well-designed, ...)
  Contract,     // caller broke an operation's precondition
  Limit,        // oracle size cap exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace bitopt
