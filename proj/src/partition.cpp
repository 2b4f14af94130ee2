#include "qsim/partition.hpp"

#include <algorithm>

#include "qsim/error.hpp"
#include "qsim/full_amplitude.hpp"
#include "qsim/worker_pool.hpp"

namespace qsim {

namespace {

constexpr std::size_t kBranchBatch = 256;

Instruction projector_at(int bit, int qubit, int line) {
  Instruction p;
  p.gate = bit ? GateKind::P1 : GateKind::P0;
  p.qubits = {qubit};
  p.line = line;
  return p;
}

Instruction local_gate(const Matrix2& u, int qubit, int line) {
  Instruction g;
  g.gate = GateKind::U4;
  g.qubits = {qubit};
  g.matrix = u;
  g.line = line;
  return g;
}

Instruction shifted(const Instruction& inst, int offset) {
  Instruction out = inst;
  for (int& q : out.controls) q -= offset;
  for (int& q : out.qubits) q -= offset;
  return out;
}

}  // namespace

PartitionPlan plan_partition(const Program& program, int cut, std::uint64_t branch_budget) {
  if (cut <= 0 || cut >= program.qubit_count) {
    throw Error(ErrorKind::InvalidArgument,
                "cut " + std::to_string(cut) + " must lie in (0, " + std::to_string(program.qubit_count) + ")");
  }
  PartitionPlan plan;
  plan.program = program;
  plan.cut = cut;
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const Instruction& inst = program.instructions[i];
    if (inst.kind == InstructionKind::Measure) {
      throw Error(ErrorKind::InvalidArgument, "partial amplitude mode does not support MEASURE", inst.line);
    }
    if (inst.kind != InstructionKind::Gate) continue;
    const auto qubits = inst.all_qubits();
    const bool has_lower = std::any_of(qubits.begin(), qubits.end(), [&](int q) { return q < cut; });
    const bool has_upper = std::any_of(qubits.begin(), qubits.end(), [&](int q) { return q >= cut; });
    if (!(has_lower && has_upper)) continue;

    const KernelGate k = kernel_gate(inst);
    if (k.controls.size() != 1 || k.targets.size() != 1) {
      throw Error(ErrorKind::UncuttableGate,
                  std::string(gate_mnemonic(inst.gate)) + " crosses the cut but is not a controlled two-qubit gate",
                  inst.line);
    }
    plan.crossing_gates.push_back({i, k.controls[0], k.targets[0], {k.base[0], k.base[1], k.base[2], k.base[3]}});
    if (plan.crossing_gates.size() >= 63 || plan.branch_count() > branch_budget) {
      throw Error(ErrorKind::BranchExplosion, std::to_string(plan.crossing_gates.size()) +
                                                  " crossing gates exceed the branch budget of " +
                                                  std::to_string(branch_budget),
                  inst.line);
    }
  }
  return plan;
}

BranchCircuit make_branch(const PartitionPlan& plan, std::uint64_t branch_id) {
  const Program& program = plan.program;
  const int cut = plan.cut;
  BranchCircuit branch;
  branch.branch_id = branch_id;
  branch.lower_program.qubit_count = cut;
  branch.upper_program.qubit_count = program.qubit_count - cut;

  auto side_of = [&](int q) -> Program& { return q < cut ? branch.lower_program : branch.upper_program; };
  auto local = [&](int q) { return q < cut ? q : q - cut; };

  std::size_t next_crossing = 0;
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const Instruction& inst = program.instructions[i];
    if (inst.kind != InstructionKind::Gate) continue;
    if (next_crossing < plan.crossing_gates.size() && plan.crossing_gates[next_crossing].instruction_index == i) {
      const CrossingGate& g = plan.crossing_gates[next_crossing];
      const int bit = static_cast<int>((branch_id >> next_crossing) & 1U);
      side_of(g.control).instructions.push_back(projector_at(bit, local(g.control), inst.line));
      if (bit) side_of(g.target).instructions.push_back(local_gate(g.local, local(g.target), inst.line));
      ++next_crossing;
      continue;
    }
    const int q = inst.all_qubits().front();
    side_of(q).instructions.push_back(q < cut ? inst : shifted(inst, cut));
  }
  return branch;
}

std::vector<BranchCircuit> decompose_crossing(const PartitionPlan& plan) {
  std::vector<BranchCircuit> out;
  out.reserve(plan.branch_count());
  for (std::uint64_t b = 0; b < plan.branch_count(); ++b) out.push_back(make_branch(plan, b));
  return out;
}

std::uint64_t parse_target(const std::string& bits, int qubit_count) {
  if (static_cast<int>(bits.size()) != qubit_count) {
    throw Error(ErrorKind::InvalidArgument,
                "target '" + bits + "' must have " + std::to_string(qubit_count) + " characters");
  }
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error(ErrorKind::InvalidArgument, "target '" + bits + "' is not a bitstring");
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return index;
}

std::vector<TargetAmplitude> run_partial(const Program& program, int cut, const std::vector<std::string>& targets,
                                         const PartialRunOptions& options) {
  const PartitionPlan plan = plan_partition(program, cut, options.branch_budget);
  std::vector<std::uint64_t> upper_index, lower_index;
  const std::uint64_t lower_mask = (std::uint64_t{1} << cut) - 1;
  for (const auto& t : targets) {
    const std::uint64_t index = parse_target(t, program.qubit_count);
    upper_index.push_back(index >> cut);
    lower_index.push_back(index & lower_mask);
  }

  const std::uint64_t branches = plan.branch_count();
  const std::size_t workers = options.pool ? options.pool->size() : 1;
  // Few branches: run them one by one and let each use the whole pool.
  const bool branch_parallel = branches >= workers && workers > 1;

  auto simulate_branch = [&](std::uint64_t b, std::vector<cplx>& contribution) {
    const BranchCircuit branch = make_branch(plan, b);
    FullRunOptions sub;
    sub.state.max_qubits = options.max_qubits;
    sub.state.chunk_log2 = options.chunk_log2;
    sub.state.pool = branch_parallel ? nullptr : options.pool;
    const StateVector upper = simulate(branch.upper_program, sub);
    const StateVector lower = simulate(branch.lower_program, sub);
    contribution.resize(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
      contribution[t] = upper.amplitude(upper_index[t]) * lower.amplitude(lower_index[t]);
    }
  };

  std::vector<cplx> total(targets.size());
  std::vector<std::vector<cplx>> batch;
  for (std::uint64_t first = 0; first < branches; first += kBranchBatch) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kBranchBatch, branches - first));
    batch.assign(count, {});
    if (branch_parallel) {
      options.pool->run(count, [&](std::size_t k) { simulate_branch(first + k, batch[k]); });
    } else {
      for (std::size_t k = 0; k < count; ++k) simulate_branch(first + k, batch[k]);
    }
    // Fixed branch_id order keeps the sum bit-reproducible.
    for (const auto& contribution : batch) {
      for (std::size_t t = 0; t < targets.size(); ++t) total[t] += contribution[t];
    }
  }

  std::vector<TargetAmplitude> out;
  out.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) out.push_back({targets[t], total[t]});
  return out;
}

}  // namespace qsim
