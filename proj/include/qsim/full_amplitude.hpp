#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsim/noise.hpp"
#include "qsim/program.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

struct PMeasureResult {
  std::vector<int> qubits;
  ProbabilityTable table;
  int line = 0;
};

struct RunResult {
  /// -1 marks a register never written by MEASURE.
  std::vector<int> cregs;
  std::vector<PMeasureResult> tables;
};

struct FullRunOptions {
  std::uint64_t seed = 0;
  const NoiseModel* noise = nullptr;
  StateVectorOptions state;
};

/// Evolves |0...0> through every gate of the program (projectors included)
/// and returns the final state. MEASURE and PMEASURE are handled as in run_full.
StateVector simulate(const Program& program, const FullRunOptions& options, RunResult* result = nullptr);

RunResult run_full(const Program& program, const FullRunOptions& options);

}  // namespace qsim
