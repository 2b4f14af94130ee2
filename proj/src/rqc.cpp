#include "qsim/rqc.hpp"

#include <random>

#include "qsim/error.hpp"

namespace qsim {

std::vector<std::pair<int, int>> cz_pairs(int rows, int cols, CzPattern pattern) {
  std::vector<std::pair<int, int>> pairs;
  const bool horizontal = pattern == CzPattern::HorizontalEven || pattern == CzPattern::HorizontalOdd;
  const int parity = (pattern == CzPattern::HorizontalOdd || pattern == CzPattern::VerticalOdd) ? 1 : 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (horizontal && c % 2 == parity && c + 1 < cols) pairs.emplace_back(r * cols + c, r * cols + c + 1);
      if (!horizontal && r % 2 == parity && r + 1 < rows) pairs.emplace_back(r * cols + c, (r + 1) * cols + c);
    }
  }
  return pairs;
}

Program generate_rqc(const RqcConfig& config) {
  if (config.depth < 1 || config.rows < 1 || config.cols < 1 || config.rows * config.cols < 2) {
    throw Error(ErrorKind::InvalidArgument, "rqc needs depth >= 1 and at least two qubits");
  }
  if (config.single_qubit_pool.empty() || config.pattern_cycle.empty()) {
    throw Error(ErrorKind::InvalidArgument, "rqc needs a gate pool and a pattern cycle");
  }
  const int n = config.rows * config.cols;
  std::mt19937_64 rng(config.seed);
  std::string text = "QINIT " + std::to_string(n) + "\n";
  for (int q = 0; q < n; ++q) text += "H " + std::to_string(q) + "\n";
  for (int layer = 0; layer < config.depth; ++layer) {
    const auto pattern = config.pattern_cycle[static_cast<std::size_t>(layer) % config.pattern_cycle.size()];
    std::vector<bool> touched(static_cast<std::size_t>(n), false);
    for (const auto& [a, b] : cz_pairs(config.rows, config.cols, pattern)) {
      text += "CZ " + std::to_string(a) + "," + std::to_string(b) + "\n";
      touched[static_cast<std::size_t>(a)] = touched[static_cast<std::size_t>(b)] = true;
    }
    for (int q = 0; q < n; ++q) {
      if (touched[static_cast<std::size_t>(q)]) continue;
      const std::string& gate = config.single_qubit_pool[rng() % config.single_qubit_pool.size()];
      const auto space = gate.find(' ');
      if (space == std::string::npos) {
        text += gate + " " + std::to_string(q) + "\n";
      } else {
        text += gate.substr(0, space) + " " + std::to_string(q) + "," + gate.substr(space + 1) + "\n";
      }
    }
  }
  return parse_program(text);
}

}  // namespace qsim
