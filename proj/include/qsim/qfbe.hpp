#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

namespace qsim::qfbe {

/// About 400 bits; -inf is used as the pole sentinel.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<120>,
                                           boost::multiprecision::et_off>;

/// Longest digit string the working precision supports.
constexpr int kMaxDigits = 256;

Real negative_infinity();
bool is_negative_infinity(const Real& a);

struct FbeSpec {
  /// Membership in I.
  std::function<bool(const Real&)> in_interval;
  /// 1 if a lies in D_1, else 0.
  std::function<int(const Real&)> domain;
  std::function<Real(const Real&)> r0;
  std::function<Real(const Real&)> r1;
  /// Optional inverse branches; must return a value in their own domain.
  std::function<Real(const Real&)> r0_inv;
  std::function<Real(const Real&)> r1_inv;
};

struct FbeTrace {
  std::vector<Real> iterates;  // a_0 ... a_n
  std::vector<int> digits;     // digit k = 1 iff a_k in D_1

  /// sum of 2^-(k+1) over set digits (exact for the supported lengths).
  Real value() const;
  double value_double() const;
  /// "0.0100..." binary fraction.
  std::string binary() const;
};

FbeTrace fbe_digits(const FbeSpec& spec, const Real& x, int n);

/// D_1 = {a < 0}, r(a) = 2a/(1-a^2) on both domains, +-1 -> -inf, r(-inf) = 0.
const FbeSpec& arctan_spec();

FbeTrace arctan_digits(const Real& x, int n);
FbeTrace arctan_digits(double x, int n);

/// `digits` in printed order v_{n-1} ... v_0; v_0 is consumed first. Returns a_n.
Real inverse_fbe(const FbeSpec& spec, const std::vector<int>& digits, const Real& a0);

/// Names: log2 (alias log), ln, arccos, arcsin, arccot, arctan (all divided by
/// pi), exp2 (alias exp, meaning 2^x), cos, sin, cot, tan (all of pi*x).
bool is_reference_function(const std::string& name);

/// Two's complement "II.FFF" of f(x), truncated toward zero to frac_bits.
std::string reference_value(const std::string& function, const Real& x, int int_bits, int frac_bits);
std::string reference_value(const std::string& function, double x, int int_bits, int frac_bits);

/// Parses "0.01b"-style binary fixed point or a plain decimal number.
Real parse_real(const std::string& text);

/// Decimal value of a two's complement "II.FFF" string.
double fixed_point_value(const std::string& bits);

}  // namespace qsim::qfbe
