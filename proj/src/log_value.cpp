#include "mcyc/log_value.hpp"

#include <cstdio>

namespace mcyc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LogValue LogValue::from_double(double v) {
  if (v == 0.0 || std::isnan(v)) return {};
  return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
}

LogValue LogValue::from_log(int sign, double logmag) {
  if (sign == 0 || logmag == kNegInf) return {};
  return {sign > 0 ? 1 : -1, logmag};
}

double LogValue::to_double() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(logmag);
}

std::string LogValue::str() const {
  if (sign == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%se^%.17g", sign < 0 ? "-" : "", logmag);
  return buf;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (a == b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

LogValue operator*(const LogValue& a, const LogValue& b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.logmag + b.logmag};
}

LogValue operator/(const LogValue& a, const LogValue& b) {
  if (a.sign == 0) return {};
  return {a.sign * b.sign, a.logmag - b.logmag};
}

LogValue operator+(const LogValue& a, const LogValue& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.sign == b.sign) return {a.sign, log_add(a.logmag, b.logmag)};
  if (a.logmag == b.logmag) return {};
  if (a.logmag > b.logmag) return LogValue::from_log(a.sign, log_sub(a.logmag, b.logmag));
  return LogValue::from_log(b.sign, log_sub(b.logmag, a.logmag));
}

LogValue operator-(const LogValue& a, const LogValue& b) { return a + (-b); }

}  // namespace mcyc
