#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "mcyc/log_value.hpp"

namespace mcyc {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational conversion of a finite double (every double is dyadic).
Rational rational_from_double(double v);

/// Polynomial coefficient.
///
/// Exact rationals stay exact under +, -, *. As soon as a real enters, the
/// value is carried as a double while it sits comfortably inside the double
/// range and as a LogValue outside it, so coefficients like 1/a^(2m) with m
/// in the thousands survive construction.
class Scalar {
 public:
  enum class Kind { exact, real, log };

  Scalar() = default;
  Scalar(long long v) : kind_(Kind::exact), q_(v) {}  // NOLINT(implicit)
  Scalar(int v) : Scalar(static_cast<long long>(v)) {}  // NOLINT(implicit)

  static Scalar exact(Rational q);
  static Scalar ratio(long long num, long long den) { return exact(Rational(num, den)); }
  static Scalar real(double v);
  static Scalar from_log(LogValue v);

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ == Kind::exact; }
  bool is_zero() const;
  int sign() const;

  /// Only meaningful when is_exact().
  const Rational& rational() const { return q_; }

  double to_double() const;
  LogValue to_log() const;

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);

  /// Text form: "p/q" for exact values, "%.17g" for reals, "e^L" for log values.
  std::string str() const;
  static Scalar parse(const std::string& text);

 private:
  Kind kind_ = Kind::exact;
  Rational q_{0};
  double d_ = 0.0;
  LogValue l_{};
};

}  // namespace mcyc
