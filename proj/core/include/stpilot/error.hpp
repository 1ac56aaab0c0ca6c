#pragma once

#include <stdexcept>
#include <string>

namespace stpilot {

/// Broad failure category. The CLI maps these onto process exit codes.
enum class ErrorKind {
  InvalidArgument,  ///< a precondition on an input value was violated
  InvalidPose,
  ShapeMismatch,
  OutOfRange,
  ScaleUndefined,
  UndefinedMetric,
  Validation,  ///< data failed a semantic check (trajectory validity, plan continuity)
  Io,
  Checksum,
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

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace stpilot
