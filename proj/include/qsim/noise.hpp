#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsim/gates.hpp"
#include "qsim/program.hpp"

namespace qsim {

class StateVector;

enum class NoiseKind { BitFlip, PhaseFlip, BitPhaseFlip, AmplitudeDamping, PhaseDamping, Depolarizing };

std::string_view noise_kind_name(NoiseKind kind);
/// CLI names: bitflip, phaseflip, bitphaseflip, ampdamp, phasedamp, depolarizing.
std::optional<NoiseKind> noise_kind_from_name(std::string_view name);

/// Kraus operators of a single-qubit channel. For the flip channels p -> 1 is
/// noiseless; for the damping and depolarizing channels p -> 0 is noiseless.
std::vector<Matrix2> kraus_ops(NoiseKind kind, double p);

struct NoiseChannel {
  NoiseKind kind = NoiseKind::BitFlip;
  double p = 1.0;
  std::vector<Matrix2> kraus;

  static NoiseChannel make(NoiseKind kind, double p);
};

/// All products A_i (x) B_j, A acting on the more significant qubit; ordered
/// (A_1 B_1, A_1 B_2, ..., A_2 B_1, ...). Each entry is 4x4 row-major.
std::vector<std::vector<cplx>> two_qubit_kraus(const NoiseChannel& a, const NoiseChannel& b);

/// Samples one Kraus branch with p_i = |K_i psi|^2, applies U K_i and renormalizes.
/// Returns the chosen branch index.
std::size_t sample_noisy_gate(StateVector& state, const KernelGate& gate, std::span<const GateMatrix> kraus,
                              std::mt19937_64& rng);

struct NoiseAssignment {
  /// Mnemonics this assignment covers; empty means every gate.
  std::set<GateKind> gates;
  NoiseChannel single;
  /// Channels for the first and second qubit of a two-qubit gate.
  NoiseChannel first;
  NoiseChannel second;
};

class NoiseModel {
 public:
  explicit NoiseModel(std::uint64_t rng_seed = 0) : rng_seed_(rng_seed) {}

  /// Throws InvalidArgument if a mnemonic (or "all gates") is already assigned.
  void add(NoiseAssignment assignment);

  /// Parses "<kind>:<p>[:<mnemonic,list>]".
  void add_spec(std::string_view spec);

  /// Explicit mnemonic assignments take precedence over the catch-all.
  const NoiseAssignment* lookup(GateKind gate) const;

  /// Kraus operators bound to the gate's qubits, or empty if the gate is clean.
  /// Gates on more than two qubits are never noisy.
  std::vector<GateMatrix> kraus_for(const Instruction& inst) const;

  std::uint64_t rng_seed() const noexcept { return rng_seed_; }
  bool empty() const noexcept { return assignments_.empty(); }

 private:
  std::vector<NoiseAssignment> assignments_;
  std::uint64_t rng_seed_;
};

}  // namespace qsim
