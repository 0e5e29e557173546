#include "tmsat/error.hpp"

namespace tmsat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::IncompatibleGrid: return "incompatible-grid";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::GridExtent: return "grid-extent";
    case ErrorKind::DegenerateChannel: return "degenerate-channel";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::ParameterMismatch: return "parameter-mismatch";
    case ErrorKind::VersionMismatch: return "version-mismatch";
    case ErrorKind::Checksum: return "checksum";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace tmsat
