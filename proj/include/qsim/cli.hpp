#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsim/error.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

enum class RunMode { Full, Partial, Single };

struct RunConfig {
  RunMode mode = RunMode::Full;
  std::string script_path;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::optional<int> cut;
  std::string targets_path;
  std::string input_bits;  // empty: all zeros
  std::string output_bits;
  std::optional<int> split_n;
  std::vector<std::string> noise;  // "kind:p[:GATE,...]"
  std::string output_path;         // empty: stdout
  std::string log_path;            // empty: stderr
  std::string dump_state_path;
};

enum ExitCode : int { kExitOk = 0, kExitParse = 2, kExitResource = 3, kExitNumeric = 4 };

int exit_code_for(const Error& error);

/// One "bits: value" line per entry, ascending, 6 significant digits, zeros as "0".
std::string format_pmeasure(const ProbabilityTable& table);

/// "re+imi" with six decimals; values below display precision print as zero.
std::string format_amplitude(cplx a);

/// Returns false (and fills `warning`) when the table sums to 1 +- more than `tolerance`.
bool check_probability_sum(const ProbabilityTable& table, double tolerance = 1e-9, std::string* warning = nullptr);

/// Reads a targets file: one bitstring per line, blank lines and '#' comments ignored.
std::vector<std::string> read_targets(const std::string& path);

/// Executes one run; the returned text is what goes to the output file.
std::string execute_run(const RunConfig& config, std::ostream& log);

/// Whole command line (argv[0] is the program name). Results go to `out`
/// unless redirected with --out; diagnostics go to `err` unless --log is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsim
