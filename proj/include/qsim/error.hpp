#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsim {

enum class ErrorKind {
  // script / IR
  MissingQinit,
  UnknownMnemonic,
  QubitOutOfRange,
  CregOutOfRange,
  DuplicateQubitArg,
  MalformedInstruction,
  UnbalancedBlock,
  MalformedAngle,
  MeasureInsideDagger,
  MeasureInsideControl,
  ControlQubitCollision,
  NonUnitaryU4,
  // resources
  TooManyQubits,
  BranchExplosion,
  TensorTooLarge,
  // backends
  DegenerateState,
  UncuttableGate,
  UnsupportedGate,
  SharedVertexNotMerged,
  InvalidProbability,
  DegenerateBranch,
  DomainEscape,
  BranchUndefined,
  DomainError,
  InvalidArgument,
  IoError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Coarse classification used for process exit codes.
enum class ErrorCategory { Parse, Resource, Numeric };

ErrorCategory error_category(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::optional<int> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<int> line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

  /// "<Kind>: line N: <detail>" or "<Kind>: <detail>".
  std::string render() const;

 private:
  ErrorKind kind_;
  std::optional<int> line_;
  std::string detail_;
};

}  // namespace qsim
