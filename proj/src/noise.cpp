#include "qsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "qsim/error.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

namespace {

Matrix2 scaled(const Matrix2& m, double s) { return {m[0] * s, m[1] * s, m[2] * s, m[3] * s}; }

// Positive real multiple of the identity: applying it and renormalizing is a no-op.
bool is_positive_identity(const GateMatrix& k) {
  const cplx c = k(0, 0);
  if (c.imag() != 0.0 || c.real() <= 0.0) return false;
  for (int r = 0; r < k.dimension; ++r) {
    for (int col = 0; col < k.dimension; ++col) {
      if (k(r, col) != (r == col ? c : cplx{})) return false;
    }
  }
  return true;
}

void apply_bound(StateVector& state, const GateMatrix& k) {
  if (k.dimension == 2) {
    state.apply_single_qubit({k.entries[0], k.entries[1], k.entries[2], k.entries[3]}, k.qubits.at(0));
  } else if (k.dimension == 4) {
    state.apply_two_qubit(k.entries, k.qubits.at(0), k.qubits.at(1));
  } else {
    throw Error(ErrorKind::UnsupportedGate, "Kraus operators act on one or two qubits");
  }
}

}  // namespace

std::string_view noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::BitFlip: return "bitflip";
    case NoiseKind::PhaseFlip: return "phaseflip";
    case NoiseKind::BitPhaseFlip: return "bitphaseflip";
    case NoiseKind::AmplitudeDamping: return "ampdamp";
    case NoiseKind::PhaseDamping: return "phasedamp";
    case NoiseKind::Depolarizing: return "depolarizing";
  }
  return "unknown";
}

std::optional<NoiseKind> noise_kind_from_name(std::string_view name) {
  for (NoiseKind k : {NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::BitPhaseFlip, NoiseKind::AmplitudeDamping,
                      NoiseKind::PhaseDamping, NoiseKind::Depolarizing}) {
    if (noise_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<Matrix2> kraus_ops(NoiseKind kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::InvalidProbability, "noise intensity " + std::to_string(p) + " is outside [0, 1]");
  }
  const Matrix2 id = gates::identity2();
  const Matrix2 x = gates::pauli_x();
  const Matrix2 y = gates::pauli_y();
  const Matrix2 z = gates::pauli_z();
  switch (kind) {
    case NoiseKind::BitFlip:
      return {scaled(id, std::sqrt(p)), scaled(x, std::sqrt(1.0 - p))};
    case NoiseKind::PhaseFlip:
      return {scaled(id, std::sqrt(p)), scaled(z, std::sqrt(1.0 - p))};
    case NoiseKind::BitPhaseFlip:
      return {scaled(id, std::sqrt(p)), scaled(y, std::sqrt(1.0 - p))};
    case NoiseKind::AmplitudeDamping:
      return {Matrix2{1.0, 0.0, 0.0, std::sqrt(1.0 - p)}, Matrix2{0.0, std::sqrt(p), 0.0, 0.0}};
    case NoiseKind::PhaseDamping:
      return {Matrix2{1.0, 0.0, 0.0, std::sqrt(1.0 - p)}, Matrix2{0.0, 0.0, 0.0, std::sqrt(p)}};
    case NoiseKind::Depolarizing: {
      const double s = std::sqrt(p) / 2.0;
      return {scaled(id, std::sqrt(1.0 - 3.0 * p / 4.0)), scaled(x, s), scaled(y, s), scaled(z, s)};
    }
  }
  return {};
}

NoiseChannel NoiseChannel::make(NoiseKind kind, double p) { return {kind, p, kraus_ops(kind, p)}; }

std::vector<std::vector<cplx>> two_qubit_kraus(const NoiseChannel& a, const NoiseChannel& b) {
  std::vector<std::vector<cplx>> out;
  out.reserve(a.kraus.size() * b.kraus.size());
  for (const Matrix2& ka : a.kraus) {
    for (const Matrix2& kb : b.kraus) {
      std::vector<cplx> m(16);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          m[static_cast<std::size_t>(r * 4 + c)] = ka[(r >> 1) * 2 + (c >> 1)] * kb[(r & 1) * 2 + (c & 1)];
        }
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::size_t sample_noisy_gate(StateVector& state, const KernelGate& gate, std::span<const GateMatrix> kraus,
                              std::mt19937_64& rng) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus set");
  std::vector<double> probs(kraus.size(), 0.0);
  std::vector<std::optional<StateVector>> branches(kraus.size());
  double total = 0.0;
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    if (is_positive_identity(kraus[i])) {
      probs[i] = kraus[i](0, 0).real() * kraus[i](0, 0).real() * state.norm_squared();
    } else {
      StateVector trial = state;
      apply_bound(trial, kraus[i]);
      probs[i] = trial.norm_squared();
      branches[i] = std::move(trial);
    }
    total += probs[i];
  }
  if (std::all_of(probs.begin(), probs.end(), [](double p) { return p < 1e-12; })) {
    throw Error(ErrorKind::DegenerateBranch, "every Kraus branch has zero probability");
  }

  const double draw = uniform01(rng) * total;
  std::size_t chosen = kraus.size();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    if (draw < cumulative) {
      chosen = i;
      break;
    }
  }
  if (chosen == kraus.size()) {
    // Rounding left the draw past the last bucket; take the last nonzero branch.
    for (std::size_t i = kraus.size(); i-- > 0;) {
      if (probs[i] > 0.0) {
        chosen = i;
        break;
      }
    }
  }

  if (branches[chosen]) {
    state = std::move(*branches[chosen]);
    state.apply(gate);
    state.normalize();
  } else {
    state.apply(gate);
  }
  return chosen;
}

void NoiseModel::add(NoiseAssignment assignment) {
  for (const auto& existing : assignments_) {
    if (existing.gates.empty() && assignment.gates.empty()) {
      throw Error(ErrorKind::InvalidArgument, "noise for all gates assigned twice");
    }
    for (GateKind g : assignment.gates) {
      if (existing.gates.count(g)) {
        throw Error(ErrorKind::InvalidArgument,
                    "noise for " + std::string(gate_mnemonic(g)) + " assigned twice");
      }
    }
  }
  assignments_.push_back(std::move(assignment));
}

void NoiseModel::add_spec(std::string_view spec) {
  const auto bad = [&](const std::string& why) {
    return Error(ErrorKind::InvalidArgument, "noise spec '" + std::string(spec) + "': " + why);
  };
  const std::size_t c1 = spec.find(':');
  if (c1 == std::string_view::npos) throw bad("expected <kind>:<p>[:<gates>]");
  const std::size_t c2 = spec.find(':', c1 + 1);
  const auto kind = noise_kind_from_name(spec.substr(0, c1));
  if (!kind) throw bad("unknown noise kind");
  const std::string p_text(spec.substr(c1 + 1, c2 == std::string_view::npos ? std::string_view::npos : c2 - c1 - 1));
  char* end = nullptr;
  const double p = std::strtod(p_text.c_str(), &end);
  if (p_text.empty() || end != p_text.c_str() + p_text.size()) throw bad("intensity is not a number");

  NoiseAssignment a;
  a.single = a.first = a.second = NoiseChannel::make(*kind, p);
  if (c2 != std::string_view::npos) {
    std::string_view list = spec.substr(c2 + 1);
    while (!list.empty()) {
      const std::size_t comma = list.find(',');
      const std::string_view name = list.substr(0, comma);
      const auto gate = gate_from_mnemonic(name);
      if (!gate) throw bad("unknown mnemonic '" + std::string(name) + "'");
      a.gates.insert(*gate);
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    if (a.gates.empty()) throw bad("empty gate list");
  }
  add(std::move(a));
}

const NoiseAssignment* NoiseModel::lookup(GateKind gate) const {
  const NoiseAssignment* fallback = nullptr;
  for (const auto& a : assignments_) {
    if (a.gates.empty()) {
      fallback = &a;
    } else if (a.gates.count(gate)) {
      return &a;
    }
  }
  return fallback;
}

std::vector<GateMatrix> NoiseModel::kraus_for(const Instruction& inst) const {
  std::vector<GateMatrix> out;
  if (inst.kind != InstructionKind::Gate) return out;
  const NoiseAssignment* a = lookup(inst.gate);
  if (a == nullptr) return out;
  const std::vector<int> qubits = inst.all_qubits();
  if (qubits.size() == 1) {
    for (const Matrix2& k : a->single.kraus) out.push_back({2, {k.begin(), k.end()}, qubits, false});
  } else if (qubits.size() == 2) {
    for (auto& k : two_qubit_kraus(a->first, a->second)) out.push_back({4, std::move(k), qubits, false});
  }
  return out;
}

}  // namespace qsim
