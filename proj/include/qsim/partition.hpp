#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsim/program.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

class WorkerPool;

/// A controlled gate whose control and target sit on opposite sides of the cut.
struct CrossingGate {
  std::size_t instruction_index = 0;
  int control = 0;
  int target = 0;
  /// Target-side matrix applied when the control projects onto |1>.
  Matrix2 local{};
};

/// Qubits below `cut` form the lower block, the rest the upper block.
struct PartitionPlan {
  Program program;
  int cut = 0;
  std::vector<CrossingGate> crossing_gates;

  int crossing_count() const noexcept { return static_cast<int>(crossing_gates.size()); }
  std::uint64_t branch_count() const noexcept { return std::uint64_t{1} << crossing_gates.size(); }
  std::uint64_t subcircuit_count() const noexcept { return branch_count() * 2; }
  int lower_qubits() const noexcept { return cut; }
  int upper_qubits() const noexcept { return program.qubit_count - cut; }
  /// Amplitudes held while simulating one branch: 2^upper + 2^lower.
  std::uint64_t resident_amplitudes_per_branch() const noexcept {
    return (std::uint64_t{1} << upper_qubits()) + (std::uint64_t{1} << lower_qubits());
  }
};

struct BranchCircuit {
  /// Bit j selects the P_0 (0) or P_1 (1) term of crossing gate j.
  std::uint64_t branch_id = 0;
  Program upper_program;
  Program lower_program;
};

constexpr std::uint64_t kDefaultBranchBudget = std::uint64_t{1} << 16;

PartitionPlan plan_partition(const Program& program, int cut, std::uint64_t branch_budget = kDefaultBranchBudget);

/// Builds one branch; qubits are re-indexed to be local to each block.
BranchCircuit make_branch(const PartitionPlan& plan, std::uint64_t branch_id);

/// Every branch in ascending branch_id order.
std::vector<BranchCircuit> decompose_crossing(const PartitionPlan& plan);

struct TargetAmplitude {
  std::string bits;  // qubit n-1 leftmost
  cplx amplitude;
};

struct PartialRunOptions {
  std::uint64_t branch_budget = kDefaultBranchBudget;
  WorkerPool* pool = nullptr;
  int max_qubits = 30;
  int chunk_log2 = 12;
};

/// Default cut: floor(n / 2).
inline int default_cut(int qubit_count) { return qubit_count / 2; }

std::uint64_t parse_target(const std::string& bits, int qubit_count);

std::vector<TargetAmplitude> run_partial(const Program& program, int cut, const std::vector<std::string>& targets,
                                         const PartialRunOptions& options = {});

}  // namespace qsim
