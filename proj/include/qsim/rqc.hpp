#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsim/program.hpp"

namespace qsim {

enum class CzPattern { HorizontalEven, HorizontalOdd, VerticalEven, VerticalOdd };

/// Qubits are numbered row-major: (r, c) -> r * cols + c.
struct RqcConfig {
  int rows = 2;
  int cols = 2;
  int depth = 1;
  std::uint64_t seed = 0;
  /// Mnemonics with optional angle, e.g. {"T", "RX pi/2", "RY pi/2"}.
  std::vector<std::string> single_qubit_pool{"T", "RX pi/2", "RY pi/2"};
  std::vector<CzPattern> pattern_cycle{CzPattern::HorizontalEven, CzPattern::HorizontalOdd, CzPattern::VerticalEven,
                                       CzPattern::VerticalOdd};
};

/// CZ pairs of one pattern, (a, b) with a < b.
std::vector<std::pair<int, int>> cz_pairs(int rows, int cols, CzPattern pattern);

/// Leading H layer, then `depth` layers of CZ plus random single-qubit gates
/// on the untouched qubits.
Program generate_rqc(const RqcConfig& config);

}  // namespace qsim
