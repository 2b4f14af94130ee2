#pragma once

#include <complex>
#include <vector>

#include "qsim/program.hpp"

namespace qsim {

/// Dense gate matrix bound to qubits. The first bound qubit is the most
/// significant bit of the row/column index.
struct GateMatrix {
  int dimension = 0;
  std::vector<cplx> entries;  // row-major, dimension x dimension
  std::vector<int> qubits;
  bool is_unitary = true;

  cplx operator()(int row, int col) const { return entries[static_cast<std::size_t>(row * dimension + col)]; }
  bool is_diagonal() const;
};

namespace gates {

Matrix2 hadamard();
Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();
Matrix2 phase_s();
Matrix2 phase_t();
Matrix2 rx(double theta);
Matrix2 ry(double theta);
Matrix2 rz(double theta);
/// Angle form of U4 with parameters (alpha, beta, gamma, delta).
Matrix2 u4_angles(double alpha, double beta, double gamma, double delta);
Matrix2 projector(int bit);
Matrix2 identity2();

Matrix2 adjoint(const Matrix2& m);
Matrix2 multiply(const Matrix2& a, const Matrix2& b);
bool is_unitary(const Matrix2& m, double tol);

}  // namespace gates

/// Dense matrix of an instruction over inst.all_qubits(); CONTROL-added
/// controls extend it to the block-diagonal controlled form.
GateMatrix gate_matrix(const Instruction& inst);

/// Form consumed by the amplitude kernels: a 2x2 (one target) or 4x4 (two
/// targets) base matrix applied where every control bit is 1.
struct KernelGate {
  std::vector<int> controls;
  std::vector<int> targets;  // targets[0] is the most significant index bit of base
  std::vector<cplx> base;
  bool is_unitary = true;
};

KernelGate kernel_gate(const Instruction& inst);

/// Max elementwise |U U^dagger - I|.
double unitarity_error(const GateMatrix& m);

}  // namespace qsim
