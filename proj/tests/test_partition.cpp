#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "qsim/error.hpp"
#include "qsim/full_amplitude.hpp"
#include "qsim/partition.hpp"
#include "qsim/worker_pool.hpp"

using namespace qsim;

namespace {

// Product of a block program's gates as a dense matrix on its own qubits.
oracle::Dense block_matrix(const Program& p) {
  oracle::Dense m = oracle::Dense::identity(1 << p.qubit_count);
  for (const auto& inst : p.instructions) {
    if (inst.kind != InstructionKind::Gate) continue;
    m = oracle::multiply(oracle::embed(oracle::instruction_matrix(inst), inst.all_qubits(), p.qubit_count), m);
  }
  return m;
}

// Sum over branches of upper (x) lower; should reproduce the original two-qubit gate.
oracle::Dense branch_sum(const std::string& script) {
  const PartitionPlan plan = plan_partition(parse_program(script), 1);
  oracle::Dense total{4, std::vector<cplx>(16)};
  for (const auto& b : decompose_crossing(plan)) {
    const auto term = oracle::kron(block_matrix(b.upper_program), block_matrix(b.lower_program));
    for (std::size_t i = 0; i < 16; ++i) total.m[i] += term.m[i];
  }
  return total;
}

oracle::Dense direct(const std::string& script) {
  const Program p = parse_program(script);
  return oracle::embed(oracle::instruction_matrix(p.instructions[0]), p.instructions[0].all_qubits(), 2);
}

std::string bits_of(std::uint64_t i, int n) {
  std::string s;
  for (int q = n - 1; q >= 0; --q) s += ((i >> q) & 1U) ? '1' : '0';
  return s;
}

// Layered random circuit; only CNOT/CZ/CR may straddle the cut.
std::string random_cuttable(int n, int cut, int depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  const char* singles[] = {"H", "X", "Y", "T", "S", "RX", "RY", "RZ"};
  const char* crossing[] = {"CNOT", "CZ", "CR"};
  const char* local2[] = {"CNOT", "CZ", "CR", "SWAP", "iSWAP"};
  std::string text = "QINIT " + std::to_string(n) + "\n";
  int crossings = 0;
  for (int layer = 0; layer < depth; ++layer) {
    for (int q = 0; q < n; ++q) {
      const char* g = singles[rng() % 8];
      text += std::string(g) + " " + std::to_string(q);
      if (g[0] == 'R') text += "," + std::to_string(angle(rng));
      text += "\n";
    }
    const int a = static_cast<int>(rng() % n);
    int b = static_cast<int>(rng() % n);
    if (a == b) b = (b + 1) % n;
    const bool crosses = (a < cut) != (b < cut);
    if (crosses && crossings >= 6) continue;
    crossings += crosses;
    const std::string g = crosses ? crossing[rng() % 3] : local2[rng() % 5];
    text += g + " " + std::to_string(a) + "," + std::to_string(b);
    if (g == "CR") text += "," + std::to_string(angle(rng));
    text += "\n";
  }
  return text;
}

}  // namespace

TEST(PlanPartition, FigureOneTopology) {
  const Program p = parse_program(
      "QINIT 8\nH 0\nH 4\nCZ 3,4\nCNOT 0,1\nSWAP 5,6\nCZ 7,2\nRX 6,0.3\n");
  const PartitionPlan plan = plan_partition(p, 4);
  EXPECT_EQ(plan.crossing_count(), 2);
  EXPECT_EQ(plan.branch_count(), 4u);
  EXPECT_EQ(plan.subcircuit_count(), 8u);
  EXPECT_EQ(plan.lower_qubits(), 4);
  EXPECT_EQ(plan.upper_qubits(), 4);
  const auto branches = decompose_crossing(plan);
  ASSERT_EQ(branches.size(), 4u);
  for (std::uint64_t b = 0; b < 4; ++b) {
    EXPECT_EQ(branches[b].branch_id, b);
    EXPECT_EQ(branches[b].upper_program.qubit_count, 4);
    EXPECT_EQ(branches[b].lower_program.qubit_count, 4);
  }
}

TEST(PlanPartition, SeparableHasOneBranch) {
  const PartitionPlan plan = plan_partition(parse_program("QINIT 4\nH 0\nCNOT 0,1\nCZ 2,3\n"), 2);
  EXPECT_EQ(plan.crossing_count(), 0);
  EXPECT_EQ(plan.branch_count(), 1u);
  EXPECT_EQ(plan.subcircuit_count(), 2u);
}

TEST(PlanPartition, Errors) {
  const auto kind_of = [](const std::string& script, int cut, std::uint64_t budget = kDefaultBranchBudget) {
    try {
      plan_partition(parse_program(script), cut, budget);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;  // sentinel: no throw
  };
  EXPECT_EQ(kind_of("QINIT 2\nSWAP 0,1", 1), ErrorKind::UncuttableGate);
  EXPECT_EQ(kind_of("QINIT 2\niSWAP 0,1", 1), ErrorKind::UncuttableGate);
  EXPECT_EQ(kind_of("QINIT 3\nTOFFOLI 0,1,2", 1), ErrorKind::UncuttableGate);
  EXPECT_EQ(kind_of("QINIT 2\nCZ 0,1\nCZ 0,1\nCZ 0,1", 1, 4), ErrorKind::BranchExplosion);
  EXPECT_EQ(kind_of("QINIT 2\nH 0", 0), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of("QINIT 2\nH 0", 2), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of("QINIT 2\nCREG 1\nMEASURE 0,$0", 1), ErrorKind::InvalidArgument);
}

TEST(DecomposeCrossing, BranchSelectorsEnumerate) {
  const PartitionPlan plan = plan_partition(parse_program("QINIT 2\nCZ 0,1\nCNOT 1,0"), 1);
  const auto branches = decompose_crossing(plan);
  ASSERT_EQ(branches.size(), 4u);
  // Selector bit j picks the P_1 term of crossing gate j.
  for (std::uint64_t b = 0; b < 4; ++b) {
    const auto& lower = branches[b].lower_program.instructions;
    ASSERT_FALSE(lower.empty());
    EXPECT_EQ(lower.front().gate, (b & 1) ? GateKind::P1 : GateKind::P0);
  }
}

TEST(DecomposeCrossing, BranchSumReproducesControlledGates) {
  EXPECT_LT(oracle::max_diff(branch_sum("QINIT 2\nCZ 0,1"), direct("QINIT 2\nCZ 0,1")), 1e-15);
  EXPECT_LT(oracle::max_diff(branch_sum("QINIT 2\nCNOT 0,1"), direct("QINIT 2\nCNOT 0,1")), 1e-15);
  EXPECT_LT(oracle::max_diff(branch_sum("QINIT 2\nCNOT 1,0"), direct("QINIT 2\nCNOT 1,0")), 1e-15);
  for (int k = 0; k < 32; ++k) {
    const double theta = 2 * M_PI * k / 32;
    const std::string s = "QINIT 2\nCR 0,1," + std::to_string(theta);
    EXPECT_LT(oracle::max_diff(branch_sum(s), direct(s)), 1e-15) << theta;
    const std::string m = "QINIT 2\nCR 1,0," + std::to_string(theta);
    EXPECT_LT(oracle::max_diff(branch_sum(m), direct(m)), 1e-15) << theta;
  }
}

TEST(DecomposeCrossing, ControlledSingleQubitGatesCross) {
  const std::string s = "QINIT 2\nCONTROL 0\nRY 1,0.7\nENDCONTROL";
  EXPECT_LT(oracle::max_diff(branch_sum(s), direct(s)), 1e-15);
}

TEST(RunPartial, HadamardCzExample) {
  const auto r = run_partial(parse_program("QINIT 2\nH 0\nCZ 0,1"), 1, {"00", "01", "11"});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].bits, "00");
  EXPECT_NEAR(std::abs(r[0].amplitude - cplx(std::sqrt(0.5))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r[1].amplitude - cplx(std::sqrt(0.5))), 0.0, 1e-15);
  EXPECT_EQ(r[2].amplitude, cplx(0));
}

TEST(RunPartial, TargetValidation) {
  const Program p = parse_program("QINIT 2\nH 0");
  EXPECT_THROW(run_partial(p, 1, {"0"}), Error);
  EXPECT_THROW(run_partial(p, 1, {"0a"}), Error);
  EXPECT_EQ(parse_target("10", 2), 2u);
}

TEST(RunPartial, SeparableMatchesFull) {
  const Program p = parse_program("QINIT 4\nH 0\nRY 1,0.4\nCNOT 0,1\nH 3\nCR 3,2,1.1\nT 2\nH 2");
  const StateVector full = simulate(p, {});
  std::vector<std::string> targets;
  for (std::uint64_t i = 0; i < 16; ++i) targets.push_back(bits_of(i, 4));
  const auto r = run_partial(p, 2, targets);
  for (std::uint64_t i = 0; i < 16; ++i) EXPECT_LT(std::abs(r[i].amplitude - full.amplitude(i)), 1e-12);
}

TEST(RunPartial, RandomCircuitsMatchFullAmplitude) {
  std::mt19937_64 rng(31);
  WorkerPool pool(2);
  std::vector<std::string> targets;
  for (std::uint64_t i = 0; i < 256; ++i) targets.push_back(bits_of(i, 8));
  double worst = 0;
  for (int c = 0; c < 200; ++c) {
    const Program p = parse_program(random_cuttable(8, 4, 12, rng));
    const StateVector full = simulate(p, {});
    PartialRunOptions options;
    options.pool = (c % 2) ? &pool : nullptr;
    const auto r = run_partial(p, 4, targets, options);
    for (std::uint64_t i = 0; i < 256; ++i) worst = std::max(worst, std::abs(r[i].amplitude - full.amplitude(i)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(RunPartial, ReproducibleAcrossWorkerCounts) {
  std::mt19937_64 rng(32);
  const Program p = parse_program(random_cuttable(8, 4, 12, rng));
  std::vector<std::string> targets{"00000000", "10110010", "11111111"};
  const auto a = run_partial(p, 4, targets);
  WorkerPool pool(4);
  PartialRunOptions options;
  options.pool = &pool;
  const auto b = run_partial(p, 4, targets, options);
  for (std::size_t i = 0; i < targets.size(); ++i) EXPECT_EQ(a[i].amplitude, b[i].amplitude);
}
