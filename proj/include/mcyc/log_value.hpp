#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace mcyc {

/// Signed real stored as sign and natural log of magnitude.
///
/// Used wherever a quantity can leave the double range: monomials of the
/// form (y/a)^(2m) with m in the thousands, widths of inner ovals, and the
/// partial sums of Abelian integrals built from such terms.
struct LogValue {
  int sign = 0;
  double logmag = -std::numeric_limits<double>::infinity();

  static LogValue zero() { return {}; }
  static LogValue from_double(double v);
  static LogValue from_log(int sign, double logmag);

  bool is_zero() const { return sign == 0; }
  double to_double() const;
  LogValue operator-() const { return from_log(-sign, logmag); }

  std::string str() const;
};

LogValue operator*(const LogValue& a, const LogValue& b);
LogValue operator/(const LogValue& a, const LogValue& b);
LogValue operator+(const LogValue& a, const LogValue& b);
LogValue operator-(const LogValue& a, const LogValue& b);

/// |a| < |b| by log magnitude.
inline bool abs_less(const LogValue& a, const LogValue& b) {
  return a.logmag < b.logmag;
}

/// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
double log_add(double a, double b);

/// log(exp(a) - exp(b)) for a >= b.
double log_sub(double a, double b);

}  // namespace mcyc
