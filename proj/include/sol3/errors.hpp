#pragma once

#include <stdexcept>
#include <string>

namespace sol3 {

enum class ErrorKind {
  DivisionByZero,
  Degenerate,
  StepRejected,
  IntegrabilityFailure,
  NotConverged,
  DegenerateMesh,
  InvalidArgument,
  OutOfSupport,
  Io,
};

const char* to_string(ErrorKind kind);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sol3
