#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "qsim/error.hpp"
#include "qsim/full_amplitude.hpp"
#include "qsim/state_vector.hpp"
#include "qsim/worker_pool.hpp"

using namespace qsim;

namespace {

const double kInvSqrt2 = std::sqrt(0.5);

void randomize(StateVector& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (auto& a : s.amplitudes()) a = {g(rng), g(rng)};
  s.normalize();
}

std::vector<cplx> copy(const StateVector& s) { return {s.amplitudes().begin(), s.amplitudes().end()}; }

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

oracle::Dense dense2(const Matrix2& u) { return {2, {u[0], u[1], u[2], u[3]}}; }

Matrix2 random_u2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  return gates::u4_angles(a(rng), a(rng), a(rng), a(rng));
}

oracle::Dense random_u4(std::mt19937_64& rng) {
  const cplx I{0, 1};
  const oracle::Dense iswap{4, {1, 0, 0, 0, 0, 0, -I, 0, 0, -I, 0, 0, 0, 0, 0, 1}};
  const oracle::Dense cr{4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, std::polar(1.0, 0.77)}};
  oracle::Dense m = oracle::kron(dense2(random_u2(rng)), dense2(random_u2(rng)));
  m = oracle::multiply(m, iswap);
  m = oracle::multiply(m, oracle::kron(dense2(random_u2(rng)), dense2(random_u2(rng))));
  return oracle::multiply(m, cr);
}

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kAllGates{"H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ", "U4",
                                         "CNOT", "CZ", "CR", "SWAP", "iSWAP", "TOFFOLI"};

}  // namespace

TEST(InitState, BasisZero) {
  StateVector one(1);
  EXPECT_EQ(copy(one), (std::vector<cplx>{1, 0}));
  StateVector three(3);
  std::vector<cplx> expected(8);
  expected[0] = 1;
  EXPECT_EQ(copy(three), expected);
}

TEST(InitState, MemoryCeiling) {
  try {
    StateVector s(31);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooManyQubits);
  }
  StateVectorOptions small;
  small.max_qubits = 4;
  EXPECT_THROW(StateVector(5, small), Error);
  EXPECT_NO_THROW(StateVector(4, small));
}

TEST(SingleQubit, HadamardOnQubitOne) {
  StateVector s(2);
  s.apply_single_qubit(gates::hadamard(), 1);
  const auto a = copy(s);
  EXPECT_NEAR(a[0].real(), kInvSqrt2, 1e-15);
  EXPECT_EQ(a[1], cplx(0));
  EXPECT_NEAR(a[2].real(), kInvSqrt2, 1e-15);
  EXPECT_EQ(a[3], cplx(0));
}

TEST(SingleQubit, XSwapsPair) {
  StateVector s(1);
  s.amplitudes()[0] = {0.6, 0};
  s.amplitudes()[1] = {0, 0.8};
  s.apply_single_qubit(gates::pauli_x(), 0);
  EXPECT_EQ(s.amplitude(0), cplx(0, 0.8));
  EXPECT_EQ(s.amplitude(1), cplx(0.6, 0));
}

TEST(SingleQubit, MatchesKroneckerOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    StateVector s(3);
    randomize(s, rng);
    const Matrix2 u = random_u2(rng);
    const auto id = oracle::Dense::identity(2);
    const auto full = oracle::kron(oracle::kron(id, dense2(u)), id);
    const auto expected = oracle::apply(full, copy(s));
    s.apply_single_qubit(u, 1);
    EXPECT_LT(max_diff(copy(s), expected), 1e-14);
  }
}

TEST(Controlled, CnotFlipsTargetWhenControlSet) {
  StateVector s(2);
  s.apply_single_qubit(gates::pauli_x(), 0);
  const int c[] = {0};
  s.apply_controlled(gates::pauli_x(), c, 1);
  EXPECT_EQ(s.amplitude(3), cplx(1));
  EXPECT_EQ(s.amplitude(1), cplx(0));
}

TEST(Controlled, CrPiNegatesEleven) {
  StateVector s(2);
  s.amplitudes()[0] = 0;
  s.amplitudes()[3] = 1;
  const int c[] = {0};
  s.apply_controlled({1.0, 0.0, 0.0, std::polar(1.0, M_PI)}, c, 1);
  EXPECT_NEAR(std::abs(s.amplitude(3) - cplx(-1)), 0.0, 1e-15);
}

TEST(Controlled, ToffoliMatchesOracle) {
  std::mt19937_64 rng(2);
  const Program p = parse_program("QINIT 5\nTOFFOLI 0,1,3");
  StateVector s(5);
  randomize(s, rng);
  const auto& inst = p.instructions[0];
  const auto expected = oracle::apply(oracle::embed(oracle::instruction_matrix(inst), inst.all_qubits(), 5), copy(s));
  s.apply(kernel_gate(inst));
  EXPECT_LT(max_diff(copy(s), expected), 1e-14);
}

TEST(Controlled, ZeroControlLeavesStateBitIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    StateVector s(4);
    randomize(s, rng);
    s.apply_projector(0, 2);  // control qubit 2 now reads 0
    const auto before = copy(s);
    const int c[] = {2};
    s.apply_controlled(random_u2(rng), c, 0);
    EXPECT_EQ(copy(s), before);
  }
}

TEST(TwoQubit, SwapExchanges) {
  StateVector s(2);
  s.amplitudes()[0] = 0;
  s.amplitudes()[1] = 1;
  s.apply(kernel_gate(parse_program("QINIT 2\nSWAP 0,1").instructions[0]));
  EXPECT_EQ(s.amplitude(2), cplx(1));
  EXPECT_EQ(s.amplitude(1), cplx(0));
}

TEST(TwoQubit, IswapGivesMinusI) {
  StateVector s(2);
  s.amplitudes()[0] = 0;
  s.amplitudes()[1] = 1;
  s.apply(kernel_gate(parse_program("QINIT 2\niSWAP 0,1").instructions[0]));
  EXPECT_EQ(s.amplitude(2), cplx(0, -1));
}

TEST(TwoQubit, RandomUnitaryMatchesOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    StateVector s(4);
    randomize(s, rng);
    const oracle::Dense u = random_u4(rng);
    const auto expected = oracle::apply(oracle::embed(u, {2, 0}, 4), copy(s));
    s.apply_two_qubit(u.m, 2, 0);
    EXPECT_LT(max_diff(copy(s), expected), 1e-13);
  }
}

TEST(Projector, Examples) {
  StateVector plus(1);
  plus.apply_single_qubit(gates::hadamard(), 0);
  plus.apply_projector(0, 0);
  EXPECT_NEAR(plus.amplitude(0).real(), kInvSqrt2, 1e-15);
  EXPECT_EQ(plus.amplitude(1), cplx(0));
  EXPECT_NEAR(plus.norm_squared(), 0.5, 1e-15);

  StateVector zero(1);
  zero.apply_projector(1, 0);
  EXPECT_EQ(zero.norm_squared(), 0.0);

  std::mt19937_64 rng(5);
  StateVector r(3);
  randomize(r, rng);
  r.apply_projector(0, 1);
  r.apply_projector(1, 1);
  EXPECT_EQ(r.norm_squared(), 0.0);
}

TEST(Measure, EigenstateIsDeterministic) {
  std::mt19937_64 rng(6);
  StateVector s(1);
  EXPECT_EQ(s.measure(0, rng), 0);
  EXPECT_EQ(s.amplitude(0), cplx(1));
}

TEST(Measure, PlusStateFrequencyWithinThreeSigma) {
  std::mt19937_64 rng(7);
  const int trials = 100000;
  int ones = 0;
  for (int t = 0; t < trials; ++t) {
    StateVector s(1);
    s.apply_single_qubit(gates::hadamard(), 0);
    ones += s.measure(0, rng);
  }
  const double sigma = std::sqrt(trials * 0.25);
  EXPECT_LT(std::abs(ones - trials * 0.5), 3 * sigma);
}

TEST(Measure, BellCollapseIsExact) {
  for (std::uint64_t seed = 0;; ++seed) {
    std::mt19937_64 rng(seed);
    StateVector s(2);
    s.apply_single_qubit(gates::hadamard(), 0);
    const int c[] = {0};
    s.apply_controlled(gates::pauli_x(), c, 1);
    if (s.measure(0, rng) != 1) continue;
    EXPECT_EQ(s.amplitude(0), cplx(0));
    EXPECT_EQ(s.amplitude(1), cplx(0));
    EXPECT_EQ(s.amplitude(2), cplx(0));
    EXPECT_NEAR(std::abs(s.amplitude(3)), 1.0, 1e-15);
    break;
  }
}

TEST(Measure, DegenerateStateThrows) {
  std::mt19937_64 rng(8);
  StateVector s(1);
  s.apply_projector(1, 0);
  try {
    s.measure(0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateState);
  }
}

TEST(PMeasure, Examples) {
  StateVector bell(2);
  bell.apply_single_qubit(gates::hadamard(), 0);
  const int c[] = {0};
  bell.apply_controlled(gates::pauli_x(), c, 1);
  const int q0[] = {0};
  const ProbabilityTable t = bell.pmeasure(q0);
  EXPECT_NEAR(t.at("0"), 0.5, 1e-15);
  EXPECT_NEAR(t.at("1"), 0.5, 1e-15);

  StateVector basis(2);
  basis.apply_single_qubit(gates::pauli_x(), 0);
  const int q10[] = {1, 0};
  const ProbabilityTable b = basis.pmeasure(q10);
  EXPECT_EQ(b.at("01"), 1.0);
  EXPECT_EQ(b.at("10"), 0.0);
  EXPECT_EQ(b.size(), 4u);
}

TEST(PMeasure, AllQubitsIsSquaredModulusAndStateUnchanged) {
  std::mt19937_64 rng(9);
  StateVector s(4);
  randomize(s, rng);
  const auto before = copy(s);
  const int qs[] = {3, 2, 1, 0};
  const ProbabilityTable t = s.pmeasure(qs);
  for (std::size_t i = 0; i < 16; ++i) {
    std::string key;
    for (int q = 3; q >= 0; --q) key += ((i >> q) & 1U) ? '1' : '0';
    EXPECT_NEAR(t.at(key), std::norm(before[i]), 1e-15);
  }
  EXPECT_EQ(copy(s), before);
}

TEST(PMeasure, MatchesOracleMarginals) {
  std::mt19937_64 rng(10);
  StateVector s(5);
  randomize(s, rng);
  const std::vector<int> qs{4, 1, 2};
  const auto expected = oracle::marginal(copy(s), qs);
  const ProbabilityTable t = s.pmeasure(qs);
  std::size_t k = 0;
  for (const auto& [key, p] : t) EXPECT_NEAR(p, expected[k++], 1e-14) << key;
}

TEST(RunFull, Examples) {
  const RunResult h = run_full(parse_program("QINIT 1\nH 0\nPMEASURE 0"), {});
  ASSERT_EQ(h.tables.size(), 1u);
  EXPECT_NEAR(h.tables[0].table.at("0"), 0.5, 1e-15);

  const RunResult ghz = run_full(parse_program("QINIT 3\nH 0\nCNOT 0,1\nCNOT 1,2\nPMEASURE 2,1,0"), {});
  const auto& g = ghz.tables[0].table;
  EXPECT_NEAR(g.at("000"), 0.5, 1e-15);
  EXPECT_NEAR(g.at("111"), 0.5, 1e-15);
  EXPECT_EQ(g.at("010"), 0.0);
}

TEST(RunFull, GoldenTable) {
  const RunResult r = run_full(parse_program(read(QSIM_TEST_DATA "/golden.qprog")), {});
  ASSERT_EQ(r.tables.size(), 1u);
  const auto& t = r.tables[0].table;
  EXPECT_NEAR(t.at("000"), 0.820082, 1e-4);
  EXPECT_NEAR(t.at("010"), 0.106694, 1e-4);
  EXPECT_NEAR(t.at("100"), 0.0549175, 1e-4);
  EXPECT_NEAR(t.at("110"), 0.0183058, 1e-4);
  for (const char* odd : {"001", "011", "101", "111"}) EXPECT_NEAR(t.at(odd), 0.0, 1e-12);
}

TEST(RunFull, MeasureWritesRegistersReproducibly) {
  const Program p = parse_program("QINIT 3\nCREG 3\nH 0\nH 1\nCNOT 1,2\nMEASURE 0,$0\nMEASURE 1,$2\nMEASURE 2,$1");
  FullRunOptions options;
  options.seed = 99;
  const RunResult a = run_full(p, options), b = run_full(p, options);
  EXPECT_EQ(a.cregs, b.cregs);
  EXPECT_EQ(a.cregs[1], a.cregs[2]);  // q1 and q2 are perfectly correlated
}

TEST(Properties, KernelsMatchDenseOracle) {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 6; ++n) {
    std::string script = oracle::random_script(n, 500, kAllGates, rng);
    if (n >= 3) script += "CONTROL " + std::to_string(n - 1) + "\nDAGGER\nRY 0,0.4\nCNOT 0,1\nENDDAGGER\nENDCONTROL\n";
    const Program p = parse_program(script);
    const StateVector s = simulate(p, {});
    EXPECT_LT(max_diff(copy(s), oracle::run(p)), 1e-10) << "n=" << n;
  }
}

TEST(Properties, NormPreserved) {
  std::mt19937_64 rng(13);
  const Program p = parse_program(oracle::random_script(6, 300, kAllGates, rng));
  StateVector s(6);
  int count = 0;
  for (const auto& inst : p.instructions) {
    s.apply(kernel_gate(inst));
    ++count;
    ASSERT_LE(std::abs(s.norm_squared() - 1.0), 1e-12 * count);
  }
}

TEST(Properties, ChunkAndWorkerInvariance) {
  std::mt19937_64 rng(14);
  const Program p = parse_program(oracle::random_script(8, 200, kAllGates, rng));
  const auto reference = copy(simulate(p, {}));
  for (std::size_t workers : {1u, 2u, 4u}) {
    WorkerPool pool(workers);
    for (int chunk = 0; chunk <= 8; ++chunk) {
      FullRunOptions options;
      options.state.pool = &pool;
      options.state.chunk_log2 = chunk;
      EXPECT_LT(max_diff(copy(simulate(p, options)), reference), 1e-12) << workers << " " << chunk;
    }
  }
}

TEST(StateDump, RoundTrip) {
  std::mt19937_64 rng(15);
  StateVector s(5);
  randomize(s, rng);
  const std::string path = ::testing::TempDir() + "qsim_state_dump.bin";
  write_state_dump(s, path);
  int n = 0;
  EXPECT_EQ(read_state_dump(path, &n), copy(s));
  EXPECT_EQ(n, 5);
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "QSV1");
  std::remove(path.c_str());
}
