#include "qsim/error.hpp"

namespace qsim {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingQinit: return "MissingQinit";
    case ErrorKind::UnknownMnemonic: return "UnknownMnemonic";
    case ErrorKind::QubitOutOfRange: return "QubitOutOfRange";
    case ErrorKind::CregOutOfRange: return "CregOutOfRange";
    case ErrorKind::DuplicateQubitArg: return "DuplicateQubitArg";
    case ErrorKind::MalformedInstruction: return "MalformedInstruction";
    case ErrorKind::UnbalancedBlock: return "UnbalancedBlock";
    case ErrorKind::MalformedAngle: return "MalformedAngle";
    case ErrorKind::MeasureInsideDagger: return "MeasureInsideDagger";
    case ErrorKind::MeasureInsideControl: return "MeasureInsideControl";
    case ErrorKind::ControlQubitCollision: return "ControlQubitCollision";
    case ErrorKind::NonUnitaryU4: return "NonUnitaryU4";
    case ErrorKind::TooManyQubits: return "TooManyQubits";
    case ErrorKind::BranchExplosion: return "BranchExplosion";
    case ErrorKind::TensorTooLarge: return "TensorTooLarge";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::UncuttableGate: return "UncuttableGate";
    case ErrorKind::UnsupportedGate: return "UnsupportedGate";
    case ErrorKind::SharedVertexNotMerged: return "SharedVertexNotMerged";
    case ErrorKind::InvalidProbability: return "InvalidProbability";
    case ErrorKind::DegenerateBranch: return "DegenerateBranch";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::BranchUndefined: return "BranchUndefined";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

ErrorCategory error_category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingQinit:
    case ErrorKind::UnknownMnemonic:
    case ErrorKind::QubitOutOfRange:
    case ErrorKind::CregOutOfRange:
    case ErrorKind::DuplicateQubitArg:
    case ErrorKind::MalformedInstruction:
    case ErrorKind::UnbalancedBlock:
    case ErrorKind::MalformedAngle:
    case ErrorKind::MeasureInsideDagger:
    case ErrorKind::MeasureInsideControl:
    case ErrorKind::ControlQubitCollision:
    case ErrorKind::NonUnitaryU4:
    case ErrorKind::InvalidArgument:
      return ErrorCategory::Parse;
    case ErrorKind::TooManyQubits:
    case ErrorKind::BranchExplosion:
    case ErrorKind::TensorTooLarge:
      return ErrorCategory::Resource;
    default:
      return ErrorCategory::Numeric;
  }
}

Error::Error(ErrorKind kind, std::string message, std::optional<int> line)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
      kind_(kind),
      line_(line),
      detail_(std::move(message)) {}

std::string Error::render() const {
  std::string out(error_kind_name(kind_));
  out += ": ";
  if (line_) {
    out += "line " + std::to_string(*line_);
    if (!detail_.empty()) out += ": ";
  }
  out += detail_;
  return out;
}

}  // namespace qsim
