#include "qsim/program.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>

#include "qsim/error.hpp"
#include "qsim/gates.hpp"

namespace qsim {

namespace {

struct MnemonicInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  int angles;
};

constexpr MnemonicInfo kMnemonics[] = {
    {GateKind::H, "H", 1, 0},        {GateKind::X, "X", 1, 0},
    {GateKind::Y, "Y", 1, 0},        {GateKind::Z, "Z", 1, 0},
    {GateKind::S, "S", 1, 0},        {GateKind::T, "T", 1, 0},
    {GateKind::RX, "RX", 1, 1},      {GateKind::RY, "RY", 1, 1},
    {GateKind::RZ, "RZ", 1, 1},      {GateKind::U4, "U4", 1, 0},
    {GateKind::CNOT, "CNOT", 2, 0},  {GateKind::CZ, "CZ", 2, 0},
    {GateKind::CR, "CR", 2, 1},      {GateKind::SWAP, "SWAP", 2, 0},
    {GateKind::ISWAP, "iSWAP", 2, 0}, {GateKind::TOFFOLI, "TOFFOLI", 3, 0},
    {GateKind::P0, "P0", 1, 0},      {GateKind::P1, "P1", 1, 0},
};

const MnemonicInfo& info(GateKind kind) {
  for (const auto& m : kMnemonics) {
    if (m.kind == kind) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown gate kind");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return trim(s);
}

// Splits on commas that are not inside double quotes.
std::vector<std::string_view> split_args(std::string_view s, int line) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == ',' && !quoted) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (quoted) throw Error(ErrorKind::MalformedInstruction, "unterminated quote", line);
  std::string_view last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

int parse_index(std::string_view s, int line, std::string_view what) {
  s = trim(s);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      s.size() > 9) {
    throw Error(ErrorKind::MalformedInstruction, "expected " + std::string(what) + " index, got '" + std::string(s) + "'",
                line);
  }
  return std::stoi(std::string(s));
}

class AngleLexer {
 public:
  explicit AngleLexer(std::string_view text) : text_(text) {}

  double expression() {
    double value = term();
    for (;;) {
      skip_space();
      if (at_end()) return value;
      const char op = text_[pos_];
      if (op != '*' && op != '/') fail();
      ++pos_;
      const double rhs = term();
      value = op == '*' ? value * rhs : value / rhs;
    }
  }

  void expect_end() {
    skip_space();
    if (!at_end()) fail();
  }

 private:
  double term() {
    skip_space();
    if (at_end()) fail();
    if (text_[pos_] == '-') {
      ++pos_;
      return -term();
    }
    if (text_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    std::size_t end = pos_;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) ++end;
    if (end == pos_) fail();
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
      const std::size_t digits = exp;
      while (exp < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp]))) ++exp;
      if (exp == digits) fail();
      end = exp;
    }
    double value = 0.0;
    if (!parse_double(text_.substr(pos_, end - pos_), value)) fail();
    pos_ = end;
    return value;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  [[noreturn]] void fail() const {
    throw Error(ErrorKind::MalformedAngle, "cannot evaluate angle '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double angle_at(std::string_view expr, int line) {
  try {
    return eval_angle(expr);
  } catch (const Error& e) {
    throw Error(e.kind(), e.detail(), line);
  }
}

bool has_imaginary_part(std::string_view s) {
  s = trim(s);
  return !s.empty() && s.back() == 'i' && !(s.size() >= 2 && s.substr(s.size() - 2) == "pi");
}

Instruction parse_gate(GateKind kind, std::string_view args, int line, int qubit_count) {
  const MnemonicInfo& m = info(kind);
  Instruction inst;
  inst.kind = InstructionKind::Gate;
  inst.gate = kind;
  inst.line = line;
  const auto parts = split_args(args, line);
  const int params = kind == GateKind::U4 ? 1 : m.angles;
  if (static_cast<int>(parts.size()) != m.arity + params) {
    throw Error(ErrorKind::MalformedInstruction,
                std::string(m.name) + " expects " + std::to_string(m.arity) + " qubit(s) and " +
                    std::to_string(params) + " parameter(s)",
                line);
  }
  for (int i = 0; i < m.arity; ++i) inst.qubits.push_back(parse_index(parts[static_cast<std::size_t>(i)], line, "qubit"));
  for (int q : inst.qubits) {
    if (q >= qubit_count) {
      throw Error(ErrorKind::QubitOutOfRange,
                  "qubit " + std::to_string(q) + " not in [0, " + std::to_string(qubit_count - 1) + "]", line);
    }
  }
  for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.qubits.size(); ++j) {
      if (inst.qubits[i] == inst.qubits[j]) {
        throw Error(ErrorKind::DuplicateQubitArg, "qubit " + std::to_string(inst.qubits[i]) + " repeated", line);
      }
    }
  }
  if (kind == GateKind::U4) {
    std::string_view body = unquote(parts.back());
    const auto entries = split_args(body, line);
    if (entries.size() != 4) {
      throw Error(ErrorKind::MalformedInstruction, "U4 expects four comma-separated parameters", line);
    }
    if (std::any_of(entries.begin(), entries.end(), has_imaginary_part)) {
      Matrix2 u{};
      for (std::size_t k = 0; k < 4; ++k) {
        try {
          u[k] = parse_complex_literal(entries[k]);
        } catch (const Error& e) {
          throw Error(e.kind(), e.detail(), line);
        }
      }
      if (!gates::is_unitary(u, 1e-9)) throw Error(ErrorKind::NonUnitaryU4, "U4 element form is not unitary", line);
      inst.matrix = u;
    } else {
      for (const auto& e : entries) inst.angles.push_back(angle_at(e, line));
    }
  } else {
    for (int i = 0; i < m.angles; ++i) inst.angles.push_back(angle_at(parts[static_cast<std::size_t>(m.arity + i)], line));
  }
  return inst;
}

enum class FrameKind { Root, Dagger, Control };

struct Frame {
  FrameKind kind;
  int control = -1;
  int line = 0;
  std::vector<Instruction> body;
};

void check_no_measure(const std::vector<Instruction>& block, ErrorKind kind) {
  for (const auto& inst : block) {
    if (inst.kind != InstructionKind::Gate) {
      throw Error(kind, "measurement cannot appear inside a block", inst.line);
    }
  }
}

Instruction adjoint_of(const Instruction& inst) {
  Instruction out = inst;
  switch (inst.gate) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
    case GateKind::TOFFOLI:
    case GateKind::P0:
    case GateKind::P1:
      if (inst.matrix) out.matrix = gates::adjoint(*inst.matrix);
      break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::CR:
      out.angles[0] = -inst.angles[0];
      break;
    case GateKind::ISWAP:
      out.adjoint = !inst.adjoint;
      break;
    case GateKind::S:
    case GateKind::T:
    case GateKind::U4: {
      Instruction plain = inst;
      plain.controls.clear();
      const GateMatrix m = gate_matrix(plain);
      const Matrix2 adj = gates::adjoint({m.entries[0], m.entries[1], m.entries[2], m.entries[3]});
      out.gate = GateKind::U4;
      out.angles.clear();
      out.matrix = adj;
      break;
    }
  }
  return out;
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string_view gate_mnemonic(GateKind kind) { return info(kind).name; }

std::optional<GateKind> gate_from_mnemonic(std::string_view mnemonic) {
  for (const auto& m : kMnemonics) {
    if (m.name == mnemonic && m.kind != GateKind::P0 && m.kind != GateKind::P1) return m.kind;
  }
  return std::nullopt;
}

int gate_arity(GateKind kind) { return info(kind).arity; }
int gate_angle_count(GateKind kind) { return info(kind).angles; }

std::vector<int> Instruction::all_qubits() const {
  std::vector<int> out = controls;
  out.insert(out.end(), qubits.begin(), qubits.end());
  return out;
}

bool operator==(const Instruction& a, const Instruction& b) {
  return a.kind == b.kind && a.gate == b.gate && a.controls == b.controls && a.qubits == b.qubits &&
         a.angles == b.angles && a.matrix == b.matrix && a.adjoint == b.adjoint && a.creg == b.creg;
}

double eval_angle(std::string_view expr) {
  AngleLexer lexer(unquote(expr));
  const double value = lexer.expression();
  lexer.expect_end();
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::MalformedAngle, "angle '" + std::string(expr) + "' is not finite");
  }
  return value;
}

cplx parse_complex_literal(std::string_view text) {
  const std::string_view s = trim(text);
  const auto fail = [&]() -> cplx {
    throw Error(ErrorKind::MalformedAngle, "malformed complex literal '" + std::string(s) + "'");
  };
  if (s.empty()) return fail();
  double re = 0.0, im = 0.0;
  if (s.back() != 'i') {
    if (!parse_double(s, re)) return fail();
    return {re, 0.0};
  }
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::string_view imag = body;
  if (split != std::string_view::npos) {
    if (!parse_double(body.substr(0, split), re)) return fail();
    imag = body.substr(split);
  }
  if (imag.empty() || imag == "+") {
    im = 1.0;
  } else if (imag == "-") {
    im = -1.0;
  } else if (!parse_double(imag, im)) {
    return fail();
  }
  return {re, im};
}

std::vector<Instruction> expand_dagger(const std::vector<Instruction>& block) {
  check_no_measure(block, ErrorKind::MeasureInsideDagger);
  std::vector<Instruction> out;
  out.reserve(block.size());
  for (auto it = block.rbegin(); it != block.rend(); ++it) out.push_back(adjoint_of(*it));
  return out;
}

std::vector<Instruction> expand_control(const std::vector<Instruction>& block, int control) {
  check_no_measure(block, ErrorKind::MeasureInsideControl);
  std::vector<Instruction> out;
  out.reserve(block.size());
  for (const auto& inst : block) {
    const auto qs = inst.all_qubits();
    if (std::find(qs.begin(), qs.end(), control) != qs.end()) {
      throw Error(ErrorKind::ControlQubitCollision,
                  "control qubit " + std::to_string(control) + " is also used inside the block", inst.line);
    }
    Instruction c = inst;
    c.controls.insert(c.controls.begin(), control);
    out.push_back(std::move(c));
  }
  return out;
}

Program parse_program(std::string_view text) {
  Program program;
  bool have_qinit = false;
  bool have_creg = false;
  std::vector<Frame> stack;
  stack.push_back({FrameKind::Root, -1, 0, {}});

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '%') {
      if (nl == std::string_view::npos) break;
      continue;
    }

    std::size_t sp = 0;
    while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
    const std::string_view word = line.substr(0, sp);
    const std::string_view args = trim(line.substr(sp));

    if (word == "QINIT") {
      if (have_qinit) throw Error(ErrorKind::MalformedInstruction, "duplicate QINIT", line_no);
      program.qubit_count = parse_index(args, line_no, "qubit count");
      if (program.qubit_count < 1) throw Error(ErrorKind::MalformedInstruction, "QINIT needs at least one qubit", line_no);
      have_qinit = true;
    } else if (!have_qinit) {
      throw Error(ErrorKind::MissingQinit, "'" + std::string(word) + "' before QINIT", line_no);
    } else if (word == "CREG") {
      if (have_creg) throw Error(ErrorKind::MalformedInstruction, "duplicate CREG", line_no);
      program.creg_count = parse_index(args, line_no, "register count");
      have_creg = true;
    } else if (word == "DAGGER") {
      if (!args.empty()) throw Error(ErrorKind::MalformedInstruction, "DAGGER takes no arguments", line_no);
      stack.push_back({FrameKind::Dagger, -1, line_no, {}});
    } else if (word == "ENDDAGGER") {
      if (stack.back().kind != FrameKind::Dagger) {
        throw Error(ErrorKind::UnbalancedBlock, "ENDDAGGER without matching DAGGER", line_no);
      }
      Frame frame = std::move(stack.back());
      stack.pop_back();
      auto expanded = expand_dagger(frame.body);
      auto& parent = stack.back().body;
      parent.insert(parent.end(), expanded.begin(), expanded.end());
    } else if (word == "CONTROL") {
      const int c = parse_index(args, line_no, "qubit");
      if (c >= program.qubit_count) {
        throw Error(ErrorKind::QubitOutOfRange, "qubit " + std::to_string(c) + " not in [0, " +
                                                    std::to_string(program.qubit_count - 1) + "]",
                    line_no);
      }
      stack.push_back({FrameKind::Control, c, line_no, {}});
    } else if (word == "ENDCONTROL") {
      // The qubit argument is optional; when present it must name the open block.
      const int c = args.empty() ? stack.back().control : parse_index(args, line_no, "qubit");
      if (stack.back().kind != FrameKind::Control || stack.back().control != c) {
        throw Error(ErrorKind::UnbalancedBlock, "ENDCONTROL does not close an open CONTROL " + std::to_string(c) + " block",
                    line_no);
      }
      Frame frame = std::move(stack.back());
      stack.pop_back();
      auto expanded = expand_control(frame.body, frame.control);
      auto& parent = stack.back().body;
      parent.insert(parent.end(), expanded.begin(), expanded.end());
    } else if (word == "MEASURE") {
      const auto parts = split_args(args, line_no);
      if (parts.size() != 2 || parts[1].empty() || parts[1].front() != '$') {
        throw Error(ErrorKind::MalformedInstruction, "MEASURE expects 'i,$j'", line_no);
      }
      Instruction inst;
      inst.kind = InstructionKind::Measure;
      inst.line = line_no;
      inst.qubits = {parse_index(parts[0], line_no, "qubit")};
      inst.creg = parse_index(parts[1].substr(1), line_no, "register");
      if (inst.qubits[0] >= program.qubit_count) {
        throw Error(ErrorKind::QubitOutOfRange, "qubit " + std::to_string(inst.qubits[0]) + " not in [0, " +
                                                    std::to_string(program.qubit_count - 1) + "]",
                    line_no);
      }
      if (*inst.creg >= program.creg_count) {
        throw Error(ErrorKind::CregOutOfRange, "register " + std::to_string(*inst.creg) + " not allocated by CREG",
                    line_no);
      }
      stack.back().body.push_back(std::move(inst));
    } else if (word == "PMEASURE") {
      Instruction inst;
      inst.kind = InstructionKind::PMeasure;
      inst.line = line_no;
      for (auto part : split_args(args, line_no)) inst.qubits.push_back(parse_index(part, line_no, "qubit"));
      if (inst.qubits.empty()) throw Error(ErrorKind::MalformedInstruction, "PMEASURE needs qubits", line_no);
      std::set<int> seen;
      for (int q : inst.qubits) {
        if (q >= program.qubit_count) {
          throw Error(ErrorKind::QubitOutOfRange, "qubit " + std::to_string(q) + " not in [0, " +
                                                      std::to_string(program.qubit_count - 1) + "]",
                      line_no);
        }
        if (!seen.insert(q).second) {
          throw Error(ErrorKind::DuplicateQubitArg, "qubit " + std::to_string(q) + " repeated", line_no);
        }
      }
      stack.back().body.push_back(std::move(inst));
    } else if (const auto kind = gate_from_mnemonic(word)) {
      stack.back().body.push_back(parse_gate(*kind, args, line_no, program.qubit_count));
    } else {
      throw Error(ErrorKind::UnknownMnemonic, "unknown instruction '" + std::string(word) + "'", line_no);
    }
    if (nl == std::string_view::npos) break;
  }

  if (!have_qinit) throw Error(ErrorKind::MissingQinit, "script has no QINIT");
  if (stack.size() != 1) {
    const Frame& open = stack.back();
    throw Error(ErrorKind::UnbalancedBlock,
                std::string(open.kind == FrameKind::Dagger ? "DAGGER" : "CONTROL") + " is never closed", open.line);
  }
  program.instructions = std::move(stack.front().body);
  return program;
}

std::string to_script(const Program& program) {
  std::string out = "QINIT " + std::to_string(program.qubit_count) + "\n";
  if (program.creg_count > 0) out += "CREG " + std::to_string(program.creg_count) + "\n";
  for (const auto& inst : program.instructions) {
    if (inst.kind == InstructionKind::Measure) {
      out += "MEASURE " + std::to_string(inst.qubits[0]) + ",$" + std::to_string(inst.creg.value_or(0)) + "\n";
      continue;
    }
    if (inst.kind == InstructionKind::PMeasure) {
      out += "PMEASURE ";
      for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(inst.qubits[i]);
      }
      out += '\n';
      continue;
    }
    if (inst.gate == GateKind::P0 || inst.gate == GateKind::P1) {
      throw Error(ErrorKind::InvalidArgument, "projectors have no script form", inst.line);
    }
    for (int c : inst.controls) out += "CONTROL " + std::to_string(c) + "\n";
    if (inst.adjoint) out += "DAGGER\n";
    out += gate_mnemonic(inst.gate);
    out += ' ';
    for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(inst.qubits[i]);
    }
    if (inst.matrix) {
      out += ",\"";
      for (std::size_t k = 0; k < 4; ++k) {
        if (k) out += ',';
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", (*inst.matrix)[k].real(), (*inst.matrix)[k].imag());
        out += buf;
      }
      out += '"';
    } else if (inst.gate == GateKind::U4) {
      out += ",\"";
      for (std::size_t k = 0; k < inst.angles.size(); ++k) {
        if (k) out += ',';
        append_number(out, inst.angles[k]);
      }
      out += '"';
    } else {
      for (double a : inst.angles) {
        out += ",\"";
        append_number(out, a);
        out += '"';
      }
    }
    out += '\n';
    if (inst.adjoint) out += "ENDDAGGER\n";
    for (auto it = inst.controls.rbegin(); it != inst.controls.rend(); ++it) {
      out += "ENDCONTROL " + std::to_string(*it) + "\n";
    }
  }
  return out;
}

}  // namespace qsim
