#pragma once

#include <stdexcept>
#include <string>

namespace slp {

/// Error taxonomy mapped to CLI exit codes: validation -> 1, solver -> 2,
/// acceptance -> 3.
enum class ErrorKind { validation, solver, acceptance };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(std::string msg)
      : Error(ErrorKind::validation, std::move(msg)) {}
};

struct SolverError : Error {
  explicit SolverError(std::string msg)
      : Error(ErrorKind::solver, std::move(msg)) {}
};

} // namespace slp
