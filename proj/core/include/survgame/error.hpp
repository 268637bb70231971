#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace survgame {

enum class ErrorKind {
  InvalidParameters,
  ControlOutOfBounds,
  PolarSingularity,
  NonFinite,
  Singular,
  DegenerateCostate,
  OutOfRange,
  Boundary,
  UnsupportedRegime,
  Coverage,
  AlreadyEscaped,
  InsideBody,
  NonConvergence,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a wheel switching function vanishes; `wheel` is 1 or 2.
class SingularControlError : public Error {
 public:
  SingularControlError(int wheel, double argument);
  int wheel() const noexcept { return wheel_; }
  double argument() const noexcept { return argument_; }

 private:
  int wheel_;
  double argument_;
};

}  // namespace survgame
