#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmsat {

enum class ErrorKind {
  InvalidParameter,
  IncompatibleGrid,
  Truncation,
  InvalidGeometry,
  Resolution,
  GridExtent,
  DegenerateChannel,
  UnsupportedDimension,
  OutOfRange,
  ParameterMismatch,
  VersionMismatch,
  Checksum,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws InvalidParameter with `message` unless `condition` holds.
inline void require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::InvalidParameter) {
  if (!condition) throw Error(kind, message);
}

}  // namespace tmsat
