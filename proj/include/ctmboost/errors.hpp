#pragma once

#include <stdexcept>
#include <string>

namespace ctm {

/// Failure categories. The CLI maps these onto its exit-code partition;
/// tests assert on them to pin down which contract a call violated.
enum class ErrorKind {
  config,        // invalid configuration semantics
  data,          // malformed or inadmissible input data
  domain,        // evaluation point outside a declared basis domain
  level,         // unknown categorical level
  dimension,     // incompatible sizes (coefficient length, matrix order, ...)
  margin,        // inadmissible grid request
  degenerate,    // response unusable for distribution estimation
  calibration,   // smoothing-parameter calibration cannot reach the target
  solve,         // penalized least-squares system not solvable as posed
  monotonicity,  // estimated distribution function decreases where it must not
  tail,          // requested probability level outside the attainable range
  numeric,       // non-finite intermediate quantity
  parse,         // unreadable document structure
  version,       // document version not supported
  io,            // file system failure
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ctm
