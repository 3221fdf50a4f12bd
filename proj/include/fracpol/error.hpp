#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracpol {

enum class ErrorKind {
  InvalidArgument,
  IncompatiblePolarizer,
  ShapeOutsideGrid,
  NegativeInput,
  InvalidParams,
  GridMismatch,
  ZeroFunction,
  UnsupportedP,
  EmptyDomain,
  SupercriticalQ,
  NoConvergence,
  HoleEscapesDomain,
  AsymmetricInput,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; the kind selects CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace fracpol
