#include "qsim/qfbe.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <boost/math/constants/constants.hpp>

#include "qsim/error.hpp"

namespace qsim::qfbe {

namespace mp = boost::multiprecision;

namespace {

// Iterates within this distance of +-1 are treated as exact poles; the
// doubling map loses about one bit per step, and kMaxDigits steps of loss
// still leave the tolerance far above accumulated rounding.
const Real& pole_tolerance() {
  static const Real tol = mp::ldexp(Real(1), -100);
  return tol;
}

const Real& pi() {
  static const Real value = boost::math::constants::pi<Real>();
  return value;
}

Real doubling_map(const Real& a) {
  if (is_negative_infinity(a)) return Real(0);
  const Real denom = 1 - a * a;
  if (mp::abs(denom) <= pole_tolerance()) return negative_infinity();
  return 2 * a / denom;
}

void require_finite_or_pole(const Real& b) {
  if (mp::isnan(b) || (mp::isinf(b) && b > 0)) {
    throw Error(ErrorKind::BranchUndefined, "inverse branch undefined at this iterate");
  }
}

// Solutions of 2a/(1-a^2) = b are a = (-1 +- sqrt(1+b^2))/b; each branch keeps
// the root inside its own domain.
Real arctan_inverse_d0(const Real& b) {
  require_finite_or_pole(b);
  if (is_negative_infinity(b)) return Real(1);
  if (b == 0) return Real(0);
  const Real s = mp::sqrt(1 + b * b);
  return b > 0 ? b / (1 + s) : -(1 + s) / b;
}

Real arctan_inverse_d1(const Real& b) {
  require_finite_or_pole(b);
  if (is_negative_infinity(b)) return Real(-1);
  if (b == 0) return negative_infinity();
  const Real s = mp::sqrt(1 + b * b);
  return b > 0 ? -(1 + s) / b : b / (1 + s);
}

enum class Fn { Log2, Ln, Arccos, Arcsin, Arccot, Arctan, Exp2, Cos, Sin, Cot, Tan };

const std::map<std::string, Fn>& function_table() {
  static const std::map<std::string, Fn> table{
      {"log2", Fn::Log2},     {"log", Fn::Log2},      {"ln", Fn::Ln},         {"arccos", Fn::Arccos},
      {"arcsin", Fn::Arcsin}, {"arccot", Fn::Arccot}, {"arctan", Fn::Arctan}, {"exp2", Fn::Exp2},
      {"exp", Fn::Exp2},      {"cos", Fn::Cos},       {"sin", Fn::Sin},       {"cot", Fn::Cot},
      {"tan", Fn::Tan}};
  return table;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Real evaluate(Fn fn, const Real& x, const std::string& name) {
  const Real tiny = mp::ldexp(Real(1), -300);
  auto domain_error = [&](const char* why) {
    return Error(ErrorKind::DomainError, name + " is undefined at this x: " + why);
  };
  switch (fn) {
    case Fn::Log2:
    case Fn::Ln:
      if (x <= 0) throw domain_error("argument must be positive");
      return fn == Fn::Ln ? Real(mp::log(x)) : Real(mp::log(x) / mp::log(Real(2)));
    case Fn::Arccos:
    case Fn::Arcsin:
      if (mp::abs(x) > 1) throw domain_error("argument must lie in [-1, 1]");
      return fn == Fn::Arccos ? Real(mp::acos(x) / pi()) : Real(mp::asin(x) / pi());
    case Fn::Arccot:
      return Real(0.5) - mp::atan(x) / pi();
    case Fn::Arctan:
      return mp::atan(x) / pi();
    case Fn::Exp2:
      return mp::exp(x * mp::log(Real(2)));
    case Fn::Cos:
      return mp::cos(pi() * x);
    case Fn::Sin:
      return mp::sin(pi() * x);
    case Fn::Cot: {
      const Real s = mp::sin(pi() * x);
      if (mp::abs(s) < tiny) throw domain_error("pole at integer x");
      return mp::cos(pi() * x) / s;
    }
    case Fn::Tan: {
      const Real c = mp::cos(pi() * x);
      if (mp::abs(c) < tiny) throw domain_error("pole at half-integer x");
      return mp::sin(pi() * x) / c;
    }
  }
  throw domain_error("unknown function");
}

}  // namespace

Real negative_infinity() { return -std::numeric_limits<Real>::infinity(); }

bool is_negative_infinity(const Real& a) { return mp::isinf(a) && a < 0; }

Real FbeTrace::value() const {
  Real sum = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k]) sum += mp::ldexp(Real(1), -static_cast<int>(k + 1));
  }
  return sum;
}

double FbeTrace::value_double() const { return value().convert_to<double>(); }

std::string FbeTrace::binary() const {
  std::string out = "0.";
  for (int d : digits) out += d ? '1' : '0';
  return out;
}

FbeTrace fbe_digits(const FbeSpec& spec, const Real& x, int n) {
  if (n < 0 || n > kMaxDigits) {
    throw Error(ErrorKind::InvalidArgument, "digit count must lie in [0, " + std::to_string(kMaxDigits) + "]");
  }
  if (!spec.in_interval(x)) throw Error(ErrorKind::DomainEscape, "x lies outside the iteration interval");
  FbeTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(n) + 1);
  trace.iterates.push_back(x);
  for (int k = 0; k < n; ++k) {
    const Real& a = trace.iterates.back();
    const int d = spec.domain(a);
    trace.digits.push_back(d);
    Real next = d ? spec.r1(a) : spec.r0(a);
    if (!spec.in_interval(next)) {
      throw Error(ErrorKind::DomainEscape, "iterate " + std::to_string(k + 1) + " left the interval");
    }
    trace.iterates.push_back(std::move(next));
  }
  return trace;
}

const FbeSpec& arctan_spec() {
  static const FbeSpec spec{
      [](const Real& a) { return !mp::isnan(a) && !(mp::isinf(a) && a > 0); },
      [](const Real& a) { return a < 0 ? 1 : 0; },
      doubling_map,
      doubling_map,
      arctan_inverse_d0,
      arctan_inverse_d1,
  };
  return spec;
}

FbeTrace arctan_digits(const Real& x, int n) {
  if (!(x >= 0)) throw Error(ErrorKind::DomainError, "arctan recurrence needs x >= 0");
  return fbe_digits(arctan_spec(), x, n);
}

FbeTrace arctan_digits(double x, int n) { return arctan_digits(Real(x), n); }

Real inverse_fbe(const FbeSpec& spec, const std::vector<int>& digits, const Real& a0) {
  if (!spec.r0_inv || !spec.r1_inv) throw Error(ErrorKind::BranchUndefined, "spec has no inverse maps");
  Real a = a0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) a = *it ? spec.r1_inv(a) : spec.r0_inv(a);
  return a;
}

bool is_reference_function(const std::string& name) { return function_table().count(lowercase(name)) != 0; }

std::string reference_value(const std::string& function, const Real& x, int int_bits, int frac_bits) {
  const auto it = function_table().find(lowercase(function));
  if (it == function_table().end()) throw Error(ErrorKind::InvalidArgument, "unknown function '" + function + "'");
  if (int_bits < 1 || frac_bits < 0 || int_bits + frac_bits > 62) {
    throw Error(ErrorKind::InvalidArgument, "need int_bits >= 1, frac_bits >= 0, total <= 62");
  }
  Real scaled = mp::ldexp(evaluate(it->second, x, function), frac_bits);
  // Values that are exactly on the grid may come back a few ulps off.
  const Real nearest = mp::round(scaled);
  if (mp::abs(scaled - nearest) < mp::ldexp(Real(1), -200) * std::max(Real(1), Real(mp::abs(scaled)))) scaled = nearest;
  const Real truncated = mp::trunc(scaled);

  const int total = int_bits + frac_bits;
  const Real limit = mp::ldexp(Real(1), total - 1);
  if (truncated >= limit || truncated < -limit) {
    throw Error(ErrorKind::DomainError, function + " value does not fit in " + std::to_string(int_bits) +
                                            " integer bits");
  }
  const auto t = truncated.convert_to<long long>();
  const auto code = static_cast<unsigned long long>(t) & ((1ULL << total) - 1);
  std::string out;
  for (int b = total - 1; b >= 0; --b) {
    out += ((code >> b) & 1ULL) ? '1' : '0';
    if (b == frac_bits && frac_bits > 0) out += '.';
  }
  return out;
}

std::string reference_value(const std::string& function, double x, int int_bits, int frac_bits) {
  return reference_value(function, Real(x), int_bits, frac_bits);
}

Real parse_real(const std::string& text) {
  auto bad = [&] { return Error(ErrorKind::InvalidArgument, "cannot parse number '" + text + "'"); };
  if (text.empty()) throw bad();
  if (text.back() == 'b') {
    std::string body = text.substr(0, text.size() - 1);
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
      negative = true;
      body.erase(0, 1);
    }
    const auto dot = body.find('.');
    const std::string int_part = body.substr(0, dot);
    const std::string frac_part = dot == std::string::npos ? "" : body.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw bad();
    Real value = 0;
    for (char c : int_part) {
      if (c != '0' && c != '1') throw bad();
      value = 2 * value + (c - '0');
    }
    for (std::size_t k = 0; k < frac_part.size(); ++k) {
      if (frac_part[k] != '0' && frac_part[k] != '1') throw bad();
      if (frac_part[k] == '1') value += mp::ldexp(Real(1), -static_cast<int>(k + 1));
    }
    return negative ? Real(-value) : value;
  }
  try {
    return Real(text);
  } catch (const std::exception&) {
    throw bad();
  }
}

double fixed_point_value(const std::string& bits) {
  const auto dot = bits.find('.');
  std::string digits = bits;
  int frac_bits = 0;
  if (dot != std::string::npos) {
    digits.erase(dot, 1);
    frac_bits = static_cast<int>(bits.size() - dot - 1);
  }
  if (digits.empty() || digits.size() > 62) throw Error(ErrorKind::InvalidArgument, "bad fixed-point string");
  long long code = 0;
  for (char c : digits) {
    if (c != '0' && c != '1') throw Error(ErrorKind::InvalidArgument, "bad fixed-point string");
    code = code * 2 + (c - '0');
  }
  if (digits.front() == '1') code -= 1LL << digits.size();
  return std::ldexp(static_cast<double>(code), -frac_bits);
}

}  // namespace qsim::qfbe
