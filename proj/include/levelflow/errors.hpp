#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace levelflow {

// Every error carries the name of the operation that raised it, so the CLI
// can report "<operation>: <message>" without extra bookkeeping.
class Error : public std::runtime_error {
 public:
  Error(std::string_view operation, const std::string& message)
      : std::runtime_error(std::string(operation) + ": " + message),
        operation_(operation) {}

  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string operation_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (step sizes, grid sizes, file contents).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, invariant violation inside a solver.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace levelflow
