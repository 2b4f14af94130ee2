#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qsim/cli.hpp"

using namespace qsim;

namespace {

const std::string kData = QSIM_TEST_DATA;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Cli, GoldenTableMatchesPublishedValues) {
  const CliResult r = cli({"run", kData + "/golden.qprog", "--mode", "full"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::map<std::string, double> published{{"000", 0.820082}, {"001", 0}, {"010", 0.106694},
                                                {"011", 0},        {"100", 0.0549175}, {"101", 0},
                                                {"110", 0.0183058}, {"111", 0}};
  std::istringstream lines(r.out);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto colon = line.find(": ");
    ASSERT_NE(colon, std::string::npos) << line;
    const std::string bits = line.substr(0, colon);
    ASSERT_TRUE(published.count(bits)) << bits;
    EXPECT_NEAR(std::stod(line.substr(colon + 2)), published.at(bits), 1e-4) << line;
    ++count;
  }
  EXPECT_EQ(count, 8u);
  EXPECT_NE(r.out.find("001: 0\n"), std::string::npos);
}

TEST(Cli, GhzSingleAmplitude) {
  const CliResult r = cli({"run", kData + "/ghz.qprog", "--mode", "single", "--out-bits", "111"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "amplitude: 0.707107+0.000000i\n");
}

TEST(Cli, PartialTargetsFile) {
  const std::string targets = temp_file("qsim_targets.txt", "# wanted\n000\n\n010\n111\n");
  EXPECT_EQ(read_targets(targets), (std::vector<std::string>{"000", "010", "111"}));
  const CliResult r = cli({"run", kData + "/ghz.qprog", "--mode", "partial", "--targets", targets, "--cut", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "000: 0.707107+0.000000i\n010: 0.000000+0.000000i\n111: 0.707107+0.000000i\n");
  std::remove(targets.c_str());
}

TEST(Cli, QubitOutOfRangeReportsLine) {
  const CliResult r = cli({"run", kData + "/bad_qubit_out_of_range.qprog"});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_EQ(r.err.rfind("QubitOutOfRange: line 3", 0), 0u) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, EveryScriptErrorClassHasACorpusFile) {
  const std::vector<std::pair<std::string, std::string>> corpus{
      {"bad_missing_qinit", "MissingQinit: line 1"},
      {"bad_unknown_mnemonic", "UnknownMnemonic: line 2"},
      {"bad_qubit_out_of_range", "QubitOutOfRange: line 3"},
      {"bad_creg_out_of_range", "CregOutOfRange: line 3"},
      {"bad_duplicate_qubit", "DuplicateQubitArg: line 2"},
      {"bad_malformed_instruction", "MalformedInstruction: line 2"},
      {"bad_unbalanced_block", "UnbalancedBlock: line 2"},
      {"bad_malformed_angle", "MalformedAngle: line 2"},
      {"bad_measure_inside_dagger", "MeasureInsideDagger: line 4"},
      {"bad_measure_inside_control", "MeasureInsideControl: line 4"},
      {"bad_control_collision", "ControlQubitCollision: line 3"},
      {"bad_non_unitary_u4", "NonUnitaryU4: line 2"},
  };
  for (const auto& [file, prefix] : corpus) {
    const CliResult r = cli({"run", kData + "/" + file + ".qprog"});
    EXPECT_EQ(r.code, kExitParse) << file;
    EXPECT_EQ(r.err.rfind(prefix, 0), 0u) << file << ": " << r.err;
  }
}

TEST(Cli, ExitCodesByCategory) {
  const std::string big = temp_file("qsim_big.qprog", "QINIT 31\nH 0\n");
  EXPECT_EQ(cli({"run", big}).code, kExitResource);
  std::remove(big.c_str());
  EXPECT_EQ(cli({"qfbe", "log2", "0", "--bits", "3"}).code, kExitNumeric);
  EXPECT_EQ(cli({"run", "--bogus-flag"}).code, kExitParse);
  EXPECT_EQ(cli({"run", kData + "/no_such_file.qprog"}).code, kExitNumeric);  // IoError
  EXPECT_EQ(cli({"run", kData + "/ghz.qprog", "--mode", "partial", "--noise", "bitflip:0.5"}).code, kExitParse);
  EXPECT_EQ(cli({"run", kData + "/ghz.qprog", "--mode", "single", "--out-bits", "1"}).code, kExitParse);
}

TEST(Cli, LogFileReceivesDiagnostics) {
  const std::string log = ::testing::TempDir() + "qsim_cli.log";
  const CliResult r = cli({"run", kData + "/bad_qubit_out_of_range.qprog", "--log", log});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_EQ(slurp(log).rfind("QubitOutOfRange: line 3", 0), 0u);
  std::remove(log.c_str());
}

TEST(Cli, SameSeedGivesByteIdenticalOutput) {
  const std::string script = temp_file(
      "qsim_measure.qprog", "QINIT 4\nCREG 4\nH 0\nH 1\nCNOT 1,2\nRY 3,0.4\nMEASURE 0,$0\nMEASURE 2,$1\nPMEASURE 3,1\n");
  const std::string a = ::testing::TempDir() + "qsim_a.txt", b = ::testing::TempDir() + "qsim_b.txt";
  for (const auto& path : {a, b}) {
    ASSERT_EQ(cli({"run", script, "--seed", "11", "--noise", "depolarizing:0.2", "--out", path}).code, 0);
  }
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
  for (const auto& p : {script, a, b}) std::remove(p.c_str());
}

TEST(Cli, RqcAndQfbeSubcommands) {
  const CliResult rqc = cli({"rqc", "--rows", "1", "--cols", "2", "--depth", "1", "--seed", "7"});
  ASSERT_EQ(rqc.code, 0);
  EXPECT_EQ(rqc.out.rfind("QINIT 2\nH 0\nH 1\n", 0), 0u);

  const CliResult arctan = cli({"qfbe", "arctan", "1", "--bits", "6"});
  EXPECT_EQ(arctan.out, "digits: 0.010000\nvalue: 0.25\n");
  const CliResult cosine = cli({"qfbe", "cos", "0.11b", "--bits", "3"});
  EXPECT_EQ(cosine.out, "bits: 11.011\nvalue: -0.625\n");
}

TEST(FormatPMeasure, Examples) {
  EXPECT_EQ(format_pmeasure({{"0", 0.5}, {"1", 0.5}}), "0: 0.5\n1: 0.5\n");
  EXPECT_EQ(format_pmeasure({{"000", 0.8200824}, {"001", 0.0}}), "000: 0.820082\n001: 0\n");
  EXPECT_EQ(format_pmeasure({{"10", 0.0549175}}), "10: 0.0549175\n");
}

TEST(FormatAmplitude, SignsAndTinyValues) {
  EXPECT_EQ(format_amplitude({0.5, -0.25}), "0.500000-0.250000i");
  EXPECT_EQ(format_amplitude({-1e-9, 1e-12}), "0.000000+0.000000i");
}

TEST(ProbabilitySum, WarningBeyondTolerance) {
  std::string warning;
  EXPECT_TRUE(check_probability_sum({{"0", 0.5}, {"1", 0.5 + 5e-10}}, 1e-9, &warning));
  EXPECT_TRUE(warning.empty());
  EXPECT_FALSE(check_probability_sum({{"0", 0.5}, {"1", 0.49}}, 1e-9, &warning));
  EXPECT_FALSE(warning.empty());
}
