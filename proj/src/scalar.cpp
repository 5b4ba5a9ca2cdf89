#include "mcyc/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mcyc {

namespace {

// Reals whose log magnitude leaves this window are carried in log form.
constexpr double kLogRealMax = 640.0;

bool fits_real(double logmag) { return std::fabs(logmag) <= kLogRealMax; }

}  // namespace

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("rational_from_double: non-finite value");
  if (v == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(v, &exp);  // v = mant * 2^exp, 0.5 <= |mant| < 1
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  using boost::multiprecision::cpp_int;
  cpp_int num = scaled;
  if (exp >= 0) return Rational(num << exp);
  return Rational(num, cpp_int(1) << -exp);
}

Scalar Scalar::exact(Rational q) {
  Scalar s;
  s.kind_ = Kind::exact;
  s.q_ = std::move(q);
  return s;
}

Scalar Scalar::real(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("Scalar::real: non-finite value");
  Scalar s;
  if (v == 0.0) return s;
  s.kind_ = Kind::real;
  s.q_ = 0;
  s.d_ = v;
  return s;
}

Scalar Scalar::from_log(LogValue v) {
  if (v.is_zero()) return {};
  if (fits_real(v.logmag)) return real(v.to_double());
  Scalar s;
  s.kind_ = Kind::log;
  s.q_ = 0;
  s.l_ = v;
  return s;
}

bool Scalar::is_zero() const {
  switch (kind_) {
    case Kind::exact: return q_ == 0;
    case Kind::real: return d_ == 0.0;
    case Kind::log: return l_.is_zero();
  }
  return true;
}

int Scalar::sign() const {
  switch (kind_) {
    case Kind::exact: return q_ > 0 ? 1 : (q_ < 0 ? -1 : 0);
    case Kind::real: return d_ > 0 ? 1 : (d_ < 0 ? -1 : 0);
    case Kind::log: return l_.sign;
  }
  return 0;
}

double Scalar::to_double() const {
  switch (kind_) {
    case Kind::exact: return q_.convert_to<double>();
    case Kind::real: return d_;
    case Kind::log: return l_.to_double();
  }
  return 0.0;
}

LogValue Scalar::to_log() const {
  switch (kind_) {
    case Kind::exact: {
      if (q_ == 0) return {};
      double d = q_.convert_to<double>();
      if (std::isfinite(d) && d != 0.0) return LogValue::from_double(d);
      // Out of double range: split numerator and denominator.
      using boost::multiprecision::cpp_int;
      auto lg = [](cpp_int v) {
        v = abs(v);
        std::size_t bits = msb(v);
        if (bits > 900) v >>= (bits - 900);
        double m = v.convert_to<double>();
        return std::log(m) + (bits > 900 ? (bits - 900) * std::log(2.0) : 0.0);
      };
      return LogValue::from_log(sign(), lg(numerator(q_)) - lg(denominator(q_)));
    }
    case Kind::real: return LogValue::from_double(d_);
    case Kind::log: return l_;
  }
  return {};
}

Scalar Scalar::operator-() const {
  switch (kind_) {
    case Kind::exact: return exact(-q_);
    case Kind::real: return real(-d_);
    case Kind::log: return from_log(-l_);
  }
  return {};
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return Scalar::exact(a.q_ + b.q_);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.kind_ != Scalar::Kind::log && b.kind_ != Scalar::Kind::log) {
    double s = a.to_double() + b.to_double();
    if (std::isfinite(s)) return Scalar::real(s);
  }
  return Scalar::from_log(a.to_log() + b.to_log());
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return Scalar::exact(a.q_ * b.q_);
  if (a.is_zero() || b.is_zero()) return {};
  return Scalar::from_log(a.to_log() * b.to_log());
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw std::domain_error("Scalar: division by zero");
  if (a.is_exact() && b.is_exact()) return Scalar::exact(a.q_ / b.q_);
  if (a.is_zero()) return {};
  return Scalar::from_log(a.to_log() / b.to_log());
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return a.q_ == b.q_;
  if (a.kind_ == Scalar::Kind::real && b.kind_ == Scalar::Kind::real) return a.d_ == b.d_;
  LogValue la = a.to_log();
  LogValue lb = b.to_log();
  return la.sign == lb.sign && la.logmag == lb.logmag;
}

std::string Scalar::str() const {
  switch (kind_) {
    case Kind::exact: return q_.str();
    case Kind::real: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d_);
      return buf;
    }
    case Kind::log: return l_.str();
  }
  return "0";
}

Scalar Scalar::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("Scalar::parse: empty");
  std::size_t epos = text.find("e^");
  if (epos != std::string::npos) {
    int sign = 1;
    if (epos == 1 && text[0] == '-') sign = -1;
    else if (epos != 0) throw std::invalid_argument("Scalar::parse: bad log form '" + text + "'");
    return from_log(LogValue::from_log(sign, std::stod(text.substr(epos + 2))));
  }
  bool real_form = text.find_first_of(".eEnN") != std::string::npos;
  if (real_form) {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("Scalar::parse: trailing text in '" + text + "'");
    return real(v);
  }
  try {
    return exact(Rational(text));
  } catch (const std::exception&) {
    throw std::invalid_argument("Scalar::parse: bad rational '" + text + "'");
  }
}

}  // namespace mcyc
