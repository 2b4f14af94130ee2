#include "qsim/full_amplitude.hpp"

#include "qsim/error.hpp"

namespace qsim {

namespace {
// Separate stream for Kraus sampling so enabling noise does not shift MEASURE draws.
constexpr std::uint64_t kNoiseStreamSalt = 0x9E3779B97F4A7C15ULL;
}  // namespace

StateVector simulate(const Program& program, const FullRunOptions& options, RunResult* result) {
  StateVector state(program.qubit_count, options.state);
  std::mt19937_64 measure_rng(options.seed);
  std::mt19937_64 noise_rng((options.noise ? options.noise->rng_seed() : options.seed) ^ kNoiseStreamSalt);
  if (result) result->cregs.assign(static_cast<std::size_t>(program.creg_count), -1);

  for (const Instruction& inst : program.instructions) {
    switch (inst.kind) {
      case InstructionKind::Gate: {
        const KernelGate gate = kernel_gate(inst);
        if (options.noise != nullptr) {
          const auto kraus = options.noise->kraus_for(inst);
          if (!kraus.empty()) {
            sample_noisy_gate(state, gate, kraus, noise_rng);
            break;
          }
        }
        state.apply(gate);
        break;
      }
      case InstructionKind::Measure: {
        const int bit = state.measure(inst.qubits.at(0), measure_rng);
        if (result) result->cregs.at(static_cast<std::size_t>(inst.creg.value())) = bit;
        break;
      }
      case InstructionKind::PMeasure:
        if (result) result->tables.push_back({inst.qubits, state.pmeasure(inst.qubits), inst.line});
        break;
    }
  }
  return state;
}

RunResult run_full(const Program& program, const FullRunOptions& options) {
  RunResult result;
  simulate(program, options, &result);
  return result;
}

}  // namespace qsim
