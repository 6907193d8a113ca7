#pragma once

#include <stdexcept>
#include <string>

namespace densub {

enum class ErrorKind {
  InvalidArgument,
  InvalidSpec,
  InfeasibleRule,
  InfeasibleCertificate,
  BudgetExceeded,
  NumericalFailure,
  TooLarge,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers (the CLI in
/// particular) which failure class occurred.
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

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace densub
