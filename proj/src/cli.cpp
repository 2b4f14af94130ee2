#include "qsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "qsim/full_amplitude.hpp"
#include "qsim/noise.hpp"
#include "qsim/partition.hpp"
#include "qsim/program.hpp"
#include "qsim/qfbe.hpp"
#include "qsim/rqc.hpp"
#include "qsim/tensor_graph.hpp"
#include "qsim/worker_pool.hpp"

namespace qsim {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  file << text;
}

double display_value(double v) { return std::abs(v) < 5e-7 ? 0.0 : v; }

std::string full_mode(const RunConfig& config, const Program& program, WorkerPool& pool, std::ostream& log) {
  NoiseModel noise(config.seed);
  for (const auto& spec : config.noise) noise.add_spec(spec);
  FullRunOptions options;
  options.seed = config.seed;
  options.noise = noise.empty() ? nullptr : &noise;
  options.state.pool = &pool;
  RunResult result;
  const StateVector state = simulate(program, options, &result);
  if (!config.dump_state_path.empty()) write_state_dump(state, config.dump_state_path);

  std::string text;
  for (const auto& table : result.tables) {
    std::string warning;
    if (!check_probability_sum(table.table, 1e-9, &warning)) {
      log << "warning: PMEASURE at line " << table.line << ": " << warning << "\n";
    }
    if (!text.empty()) text += "\n";
    text += format_pmeasure(table.table);
  }
  std::string cregs;
  for (std::size_t j = 0; j < result.cregs.size(); ++j) {
    if (result.cregs[j] >= 0) cregs += "$" + std::to_string(j) + ": " + std::to_string(result.cregs[j]) + "\n";
  }
  if (!cregs.empty()) text += (text.empty() ? "" : "\n") + cregs;
  return text;
}

std::string partial_mode(const RunConfig& config, const Program& program, WorkerPool& pool) {
  if (config.targets_path.empty()) throw Error(ErrorKind::InvalidArgument, "partial mode needs --targets");
  PartialRunOptions options;
  options.pool = &pool;
  const int cut = config.cut.value_or(default_cut(program.qubit_count));
  std::string text;
  for (const auto& t : run_partial(program, cut, read_targets(config.targets_path), options)) {
    text += t.bits + ": " + format_amplitude(t.amplitude) + "\n";
  }
  return text;
}

std::string single_mode(const RunConfig& config, const Program& program, WorkerPool& pool, std::ostream& log) {
  if (config.output_bits.empty()) throw Error(ErrorKind::InvalidArgument, "single mode needs --out-bits");
  const std::string input =
      config.input_bits.empty() ? std::string(static_cast<std::size_t>(program.qubit_count), '0') : config.input_bits;
  SingleRunOptions options;
  options.pool = &pool;
  options.split_n = config.split_n.value_or(default_split_count(config.workers));
  ContractStats stats;
  const cplx a = run_single(program, input, config.output_bits, options, &stats);
  log << "single: " << stats.subgraphs << " subgraphs, peak tensor rank " << stats.peak_rank << "\n";
  return "amplitude: " + format_amplitude(a) + "\n";
}

std::string qfbe_command(const std::string& function, const std::string& x_text, int bits, int int_bits) {
  const qfbe::Real x = qfbe::parse_real(x_text);
  char value[64];
  if (function == "arctan") {
    const qfbe::FbeTrace trace = qfbe::arctan_digits(x, bits);
    std::snprintf(value, sizeof value, "%.17g", trace.value_double());
    return "digits: " + trace.binary() + "\nvalue: " + value + "\n";
  }
  const std::string fixed = qfbe::reference_value(function, x, int_bits, bits);
  std::snprintf(value, sizeof value, "%.17g", qfbe::fixed_point_value(fixed));
  return "bits: " + fixed + "\nvalue: " + value + "\n";
}

}  // namespace

int exit_code_for(const Error& error) {
  switch (error_category(error.kind())) {
    case ErrorCategory::Parse:
      return kExitParse;
    case ErrorCategory::Resource:
      return kExitResource;
    case ErrorCategory::Numeric:
      break;
  }
  return kExitNumeric;
}

std::string format_pmeasure(const ProbabilityTable& table) {
  std::string text;
  char buf[64];
  for (const auto& [bits, p] : table) {
    if (p == 0.0) {
      text += bits + ": 0\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.6g", p);
      text += bits + ": " + buf + "\n";
    }
  }
  return text;
}

std::string format_amplitude(cplx a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f%+.6fi", display_value(a.real()), display_value(a.imag()));
  return buf;
}

bool check_probability_sum(const ProbabilityTable& table, double tolerance, std::string* warning) {
  double sum = 0.0;
  for (const auto& entry : table) sum += entry.second;
  if (std::abs(sum - 1.0) <= tolerance) return true;
  if (warning) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "probabilities sum to %.12g", sum);
    *warning = buf;
  }
  return false;
}

std::vector<std::string> read_targets(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> targets;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    targets.push_back(line.substr(first, last - first + 1));
  }
  if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "targets file '" + path + "' lists no bitstrings");
  return targets;
}

std::string execute_run(const RunConfig& config, std::ostream& log) {
  const Program program = parse_program(read_file(config.script_path));
  if (config.mode != RunMode::Full && !config.noise.empty()) {
    throw Error(ErrorKind::InvalidArgument, "noise is only supported in full mode");
  }
  WorkerPool pool(config.workers);
  switch (config.mode) {
    case RunMode::Full:
      return full_mode(config, program, pool, log);
    case RunMode::Partial:
      return partial_mode(config, program, pool);
    case RunMode::Single:
      return single_mode(config, program, pool, log);
  }
  return {};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum circuit simulator with full, partial and single amplitude backends"};
  app.name("qsim");
  app.require_subcommand(1);

  RunConfig config;
  std::string mode = "full";
  auto* run = app.add_subcommand("run", "Execute an instruction script");
  run->add_option("script", config.script_path, "Instruction script")->required();
  run->add_option("--mode", mode, "full, partial or single")->check(CLI::IsMember({"full", "partial", "single"}));
  run->add_option("--workers", config.workers, "Worker threads")->check(CLI::Range(1, 1024));
  run->add_option("--seed", config.seed, "RNG seed for MEASURE and noise");
  run->add_option("--cut", config.cut, "Partial mode: qubits below the cut form the lower block");
  run->add_option("--targets", config.targets_path, "Partial mode: file of target bitstrings");
  run->add_option("--in-bits", config.input_bits, "Single mode: input basis state, qubit n-1 first");
  run->add_option("--out-bits", config.output_bits, "Single mode: output basis state, qubit n-1 first");
  run->add_option("--split-n", config.split_n, "Single mode: number of split vertices");
  run->add_option("--noise", config.noise, "kind:p[:GATE,...], repeatable");
  run->add_option("--out", config.output_path, "Output file (default stdout)");
  run->add_option("--log", config.log_path, "Diagnostics file (default stderr)");
  run->add_option("--dump-state", config.dump_state_path, "Full mode: write the final state vector");

  RqcConfig rqc_config;
  std::string rqc_out;
  auto* rqc = app.add_subcommand("rqc", "Generate a random grid circuit");
  rqc->add_option("--rows", rqc_config.rows)->required();
  rqc->add_option("--cols", rqc_config.cols)->required();
  rqc->add_option("--depth", rqc_config.depth)->required();
  rqc->add_option("--seed", rqc_config.seed);
  rqc->add_option("--out", rqc_out);

  std::string function, x_text;
  int bits = 0, int_bits = 2;
  auto* fbe = app.add_subcommand("qfbe", "Binary expansion of a function value");
  fbe->add_option("function", function, "arctan (digit recurrence) or a reference function such as cos")->required();
  fbe->add_option("x", x_text, "Decimal, or binary with a trailing b (0.01b)")->required();
  fbe->add_option("--bits", bits, "Fractional bits")->required();
  fbe->add_option("--int-bits", int_bits, "Integer bits including sign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  std::ofstream log_file;
  std::ostream* log = &err;
  if (!config.log_path.empty()) {
    log_file.open(config.log_path, std::ios::trunc);
    if (!log_file) {
      err << "IoError: cannot write '" << config.log_path << "'\n";
      return kExitNumeric;
    }
    log = &log_file;
  }

  try {
    if (*run) {
      config.mode = mode == "partial" ? RunMode::Partial : mode == "single" ? RunMode::Single : RunMode::Full;
      write_output(execute_run(config, *log), config.output_path, out);
    } else if (*rqc) {
      write_output(to_script(generate_rqc(rqc_config)), rqc_out, out);
    } else if (*fbe) {
      out << qfbe_command(function, x_text, bits, int_bits);
    }
  } catch (const Error& e) {
    *log << e.render() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    *log << "InternalError: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qsim
