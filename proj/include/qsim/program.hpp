#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsim {

using cplx = std::complex<double>;
using Matrix2 = std::array<cplx, 4>;  // row-major

enum class GateKind {
  H, X, Y, Z, S, T,
  RX, RY, RZ,
  U4,
  CNOT, CZ, CR,
  SWAP, ISWAP,
  TOFFOLI,
  // Non-unitary projectors inserted by the partition engine; not part of the script syntax.
  P0, P1,
};

enum class InstructionKind { Gate, Measure, PMeasure };

std::string_view gate_mnemonic(GateKind kind);
std::optional<GateKind> gate_from_mnemonic(std::string_view mnemonic);

/// Number of qubit arguments the mnemonic takes in a script line.
int gate_arity(GateKind kind);
/// Number of angle arguments (CR, RX, RY, RZ take one).
int gate_angle_count(GateKind kind);

struct Instruction {
  InstructionKind kind = InstructionKind::Gate;
  GateKind gate = GateKind::H;
  /// Extra controls added by CONTROL blocks, outermost (most significant) first.
  std::vector<int> controls;
  /// Mnemonic arguments in script order: control(s) first, target last.
  std::vector<int> qubits;
  std::vector<double> angles;
  /// Explicit 2x2 matrix: U4 element form, or the adjoint of S, T and U4.
  std::optional<Matrix2> matrix;
  /// Conjugate-transposed iSWAP (the only gate whose adjoint has no mnemonic).
  bool adjoint = false;
  std::optional<int> creg;
  /// Source line; not part of equality.
  int line = 0;

  /// controls followed by qubits.
  std::vector<int> all_qubits() const;

  friend bool operator==(const Instruction& a, const Instruction& b);
};

struct Program {
  int qubit_count = 0;
  int creg_count = 0;
  std::vector<Instruction> instructions;

  int source_line(std::size_t index) const { return instructions.at(index).line; }

  friend bool operator==(const Program& a, const Program& b) = default;
};

/// Parses an instruction script. DAGGER and CONTROL blocks are expanded.
Program parse_program(std::string_view text);

/// Evaluates an angle literal such as "pi/2" or "-pi/8". Quotes are optional.
double eval_angle(std::string_view expr);

/// Parses "re", "re+imi", "re-imi" or "imi".
cplx parse_complex_literal(std::string_view text);

std::vector<Instruction> expand_dagger(const std::vector<Instruction>& block);
std::vector<Instruction> expand_control(const std::vector<Instruction>& block, int control);

/// Serializes a program back to script text. Reparsing yields an equal Program.
std::string to_script(const Program& program);

}  // namespace qsim
