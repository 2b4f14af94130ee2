#include "qsim/gates.hpp"

#include <cmath>
#include <numbers>

#include "qsim/error.hpp"

namespace qsim {
namespace gates {

namespace {
constexpr cplx kI{0.0, 1.0};
}

Matrix2 hadamard() {
  const double h = std::sqrt(2.0) / 2.0;
  return {h, h, h, -h};
}
Matrix2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
Matrix2 pauli_y() { return {0.0, -kI, kI, 0.0}; }
Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
Matrix2 phase_s() { return {1.0, 0.0, 0.0, kI}; }
Matrix2 phase_t() { return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0)}; }
Matrix2 identity2() { return {1.0, 0.0, 0.0, 1.0}; }

Matrix2 rx(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return {c, -kI * s, -kI * s, c};
}

Matrix2 ry(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return {c, -s, s, c};
}

Matrix2 rz(double theta) {
  return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
}

Matrix2 u4_angles(double alpha, double beta, double gamma, double delta) {
  const double c = std::cos(gamma / 2.0), s = std::sin(gamma / 2.0);
  // e^{i alpha} RZ(beta) RY(gamma) RZ(delta)
  return {std::polar(c, alpha - (beta + delta) / 2.0), -std::polar(s, alpha - (beta - delta) / 2.0),
          std::polar(s, alpha + (beta - delta) / 2.0), std::polar(c, alpha + (beta + delta) / 2.0)};
}

Matrix2 projector(int bit) {
  return bit == 0 ? Matrix2{1.0, 0.0, 0.0, 0.0} : Matrix2{0.0, 0.0, 0.0, 1.0};
}

Matrix2 adjoint(const Matrix2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

bool is_unitary(const Matrix2& m, double tol) {
  const Matrix2 p = multiply(m, adjoint(m));
  const Matrix2 id = identity2();
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p[i] - id[i]) > tol) return false;
  }
  return true;
}

}  // namespace gates

bool GateMatrix::is_diagonal() const {
  for (int r = 0; r < dimension; ++r) {
    for (int c = 0; c < dimension; ++c) {
      if (r != c && (*this)(r, c) != cplx{}) return false;
    }
  }
  return true;
}

namespace {

std::vector<cplx> from2(const Matrix2& m) { return {m.begin(), m.end()}; }

std::vector<cplx> identity(int dim) {
  std::vector<cplx> out(static_cast<std::size_t>(dim * dim));
  for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i * dim + i)] = 1.0;
  return out;
}

Matrix2 single_qubit_matrix(const Instruction& inst) {
  using namespace gates;
  if (inst.matrix) return *inst.matrix;
  switch (inst.gate) {
    case GateKind::H: return hadamard();
    case GateKind::X: return pauli_x();
    case GateKind::Y: return pauli_y();
    case GateKind::Z: return pauli_z();
    case GateKind::S: return phase_s();
    case GateKind::T: return phase_t();
    case GateKind::RX: return rx(inst.angles.at(0));
    case GateKind::RY: return ry(inst.angles.at(0));
    case GateKind::RZ: return rz(inst.angles.at(0));
    case GateKind::U4:
      return u4_angles(inst.angles.at(0), inst.angles.at(1), inst.angles.at(2), inst.angles.at(3));
    case GateKind::P0: return projector(0);
    case GateKind::P1: return projector(1);
    default: break;
  }
  throw Error(ErrorKind::UnsupportedGate, "not a single-qubit gate: " + std::string(gate_mnemonic(inst.gate)),
              inst.line);
}

// Mnemonic matrix over inst.qubits, without CONTROL extras.
std::vector<cplx> mnemonic_matrix(const Instruction& inst) {
  constexpr cplx kI{0.0, 1.0};
  switch (inst.gate) {
    case GateKind::CNOT:
      return {1, 0, 0, 0,  0, 1, 0, 0,  0, 0, 0, 1,  0, 0, 1, 0};
    case GateKind::CZ:
      return {1, 0, 0, 0,  0, 1, 0, 0,  0, 0, 1, 0,  0, 0, 0, -1};
    case GateKind::CR: {
      std::vector<cplx> m = identity(4);
      m[15] = std::polar(1.0, inst.angles.at(0));
      return m;
    }
    case GateKind::SWAP:
      return {1, 0, 0, 0,  0, 0, 1, 0,  0, 1, 0, 0,  0, 0, 0, 1};
    case GateKind::ISWAP: {
      const cplx off = inst.adjoint ? kI : -kI;
      return {1, 0, 0, 0,  0, 0, off, 0,  0, off, 0, 0,  0, 0, 0, 1};
    }
    case GateKind::TOFFOLI: {
      std::vector<cplx> m = identity(8);
      m[6 * 8 + 6] = 0.0;
      m[7 * 8 + 7] = 0.0;
      m[6 * 8 + 7] = 1.0;
      m[7 * 8 + 6] = 1.0;
      return m;
    }
    default:
      return from2(single_qubit_matrix(inst));
  }
}

}  // namespace

GateMatrix gate_matrix(const Instruction& inst) {
  if (inst.kind != InstructionKind::Gate) {
    throw Error(ErrorKind::InvalidArgument, "measurement has no gate matrix", inst.line);
  }
  std::vector<cplx> base = mnemonic_matrix(inst);
  const int base_dim = 1 << inst.qubits.size();
  const int dim = base_dim << inst.controls.size();

  GateMatrix out;
  out.dimension = dim;
  out.qubits = inst.all_qubits();
  out.is_unitary = inst.gate != GateKind::P0 && inst.gate != GateKind::P1;
  if (dim == base_dim) {
    out.entries = std::move(base);
    return out;
  }
  // All controls set selects the last base_dim x base_dim block.
  out.entries = identity(dim);
  const int offset = dim - base_dim;
  for (int r = 0; r < base_dim; ++r) {
    for (int c = 0; c < base_dim; ++c) {
      out.entries[static_cast<std::size_t>((offset + r) * dim + offset + c)] =
          base[static_cast<std::size_t>(r * base_dim + c)];
    }
  }
  return out;
}

KernelGate kernel_gate(const Instruction& inst) {
  if (inst.kind != InstructionKind::Gate) {
    throw Error(ErrorKind::InvalidArgument, "measurement has no kernel form", inst.line);
  }
  KernelGate k;
  k.controls = inst.controls;
  const auto& q = inst.qubits;
  switch (inst.gate) {
    case GateKind::CNOT:
      k.controls.push_back(q[0]);
      k.targets = {q[1]};
      k.base = from2(gates::pauli_x());
      break;
    case GateKind::CZ:
      k.controls.push_back(q[0]);
      k.targets = {q[1]};
      k.base = from2(gates::pauli_z());
      break;
    case GateKind::CR:
      k.controls.push_back(q[0]);
      k.targets = {q[1]};
      k.base = {1.0, 0.0, 0.0, std::polar(1.0, inst.angles.at(0))};
      break;
    case GateKind::TOFFOLI:
      k.controls.push_back(q[0]);
      k.controls.push_back(q[1]);
      k.targets = {q[2]};
      k.base = from2(gates::pauli_x());
      break;
    case GateKind::SWAP:
    case GateKind::ISWAP:
      k.targets = {q[0], q[1]};
      k.base = mnemonic_matrix(inst);
      break;
    default:
      k.targets = {q[0]};
      k.base = from2(single_qubit_matrix(inst));
      k.is_unitary = inst.gate != GateKind::P0 && inst.gate != GateKind::P1;
      break;
  }
  return k;
}

double unitarity_error(const GateMatrix& m) {
  const int d = m.dimension;
  double worst = 0.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      cplx acc{};
      for (int k = 0; k < d; ++k) acc += m(r, k) * std::conj(m(c, k));
      worst = std::max(worst, std::abs(acc - (r == c ? cplx{1.0} : cplx{})));
    }
  }
  return worst;
}

}  // namespace qsim
