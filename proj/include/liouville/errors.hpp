#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liouville {

enum class ErrorKind {
  // validation
  InvalidWeight,
  InvalidParams,
  InvalidInputs,
  EmptyWindow,
  // numerical
  DivergedStep,
  NotConverged,
  MissingZero,
  NoInteriorMin,
  NoSolution,
  NoBracket,
  ResidualTooLarge,
  NewtonDiverged,
  SingularJacobian,
  BranchLost,
  // environment
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidInputs: return "InvalidInputs";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::DivergedStep: return "DivergedStep";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::MissingZero: return "MissingZero";
    case ErrorKind::NoInteriorMin: return "NoInteriorMin";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::BranchLost: return "BranchLost";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Process exit status for a failed run: 1 for rejected inputs, 2 for
/// numerical or I/O failure.
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidWeight:
    case ErrorKind::InvalidParams:
    case ErrorKind::InvalidInputs:
    case ErrorKind::EmptyWindow:
      return 1;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace liouville
