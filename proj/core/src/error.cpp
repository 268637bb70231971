#include "survgame/error.hpp"

#include <sstream>

namespace survgame {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameters: return "INVALID_PARAMETERS";
    case ErrorKind::ControlOutOfBounds: return "CONTROL_OUT_OF_BOUNDS";
    case ErrorKind::PolarSingularity: return "POLAR_SINGULARITY";
    case ErrorKind::NonFinite: return "NON_FINITE";
    case ErrorKind::Singular: return "SINGULAR";
    case ErrorKind::DegenerateCostate: return "DEGENERATE_COSTATE";
    case ErrorKind::OutOfRange: return "OUT_OF_RANGE";
    case ErrorKind::Boundary: return "BOUNDARY";
    case ErrorKind::UnsupportedRegime: return "UNSUPPORTED_REGIME";
    case ErrorKind::Coverage: return "COVERAGE";
    case ErrorKind::AlreadyEscaped: return "ALREADY_ESCAPED";
    case ErrorKind::InsideBody: return "INSIDE_BODY";
    case ErrorKind::NonConvergence: return "NON_CONVERGENCE";
  }
  return "UNKNOWN";
}

namespace {
std::string singular_message(int wheel, double argument) {
  std::ostringstream os;
  os << "SINGULAR(u" << wheel << "): switching argument " << argument
     << " is zero to tolerance";
  return os.str();
}
}  // namespace

SingularControlError::SingularControlError(int wheel, double argument)
    : Error(ErrorKind::Singular, singular_message(wheel, argument)),
      wheel_(wheel),
      argument_(argument) {}

}  // namespace survgame
