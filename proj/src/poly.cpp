#include "mcyc/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mcyc/errors.hpp"
#include "mcyc/summation.hpp"

namespace mcyc {

namespace {

constexpr double kLogDoubleMax = 709.78;
// Monomials of higher total degree are evaluated through logs.
constexpr int kDirectDegreeMax = 48;

double ipow(double b, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational binomial(int n, int k) {
  Rational r(1);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

SparsePoly2::SparsePoly2(std::vector<Monomial2> terms) {
  std::map<std::pair<int, int>, Scalar> acc;
  for (auto& t : terms) {
    if (t.ex < 0 || t.ey < 0) throw std::invalid_argument("SparsePoly2: negative exponent");
    auto key = std::make_pair(t.ex, t.ey);
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(key, t.coeff);
    else
      it->second = it->second + t.coeff;
  }
  for (auto& [key, c] : acc)
    if (!c.is_zero()) terms_.push_back({c, key.first, key.second});
  rebuild_cache();
}

void SparsePoly2::rebuild_cache() {
  cache_.clear();
  cache_.reserve(terms_.size());
  for (const auto& t : terms_) {
    LogValue l = t.coeff.to_log();
    bool log_path = t.coeff.kind() == Scalar::Kind::log || t.ex + t.ey > kDirectDegreeMax;
    cache_.push_back({t.coeff.to_double(), l.logmag, l.sign, t.ex, t.ey, log_path});
  }
}

bool SparsePoly2::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Monomial2& t) { return t.coeff.is_exact(); });
}

int SparsePoly2::degree() const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, t.ex + t.ey);
  return d;
}

Scalar SparsePoly2::coeff(int ex, int ey) const {
  for (const auto& t : terms_)
    if (t.ex == ex && t.ey == ey) return t.coeff;
  return {};
}

double SparsePoly2::operator()(double x, double y) const {
  CompensatedSum sum;
  for (const auto& t : cache_) {
    double v;
    if (!t.log_path) {
      v = t.c * ipow(x, t.ex) * ipow(y, t.ey);
    } else {
      if ((t.ex > 0 && x == 0.0) || (t.ey > 0 && y == 0.0)) continue;
      double lm = t.logc + (t.ex ? t.ex * std::log(std::fabs(x)) : 0.0) +
                  (t.ey ? t.ey * std::log(std::fabs(y)) : 0.0);
      if (lm > kLogDoubleMax) throw OverflowError("polynomial term overflows double range");
      int s = t.sign;
      if ((t.ex & 1) && x < 0) s = -s;
      if ((t.ey & 1) && y < 0) s = -s;
      v = s * std::exp(lm);
    }
    if (!std::isfinite(v)) throw OverflowError("polynomial term overflows double range");
    sum.add(v);
  }
  double r = sum.value();
  if (!std::isfinite(r)) throw OverflowError("polynomial value overflows double range");
  return r;
}

SparsePoly2 SparsePoly2::operator-() const {
  std::vector<Monomial2> t = terms_;
  for (auto& m : t) m.coeff = -m.coeff;
  return SparsePoly2(std::move(t));
}

SparsePoly2 operator+(const SparsePoly2& a, const SparsePoly2& b) {
  std::vector<Monomial2> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return SparsePoly2(std::move(t));
}

SparsePoly2 operator-(const SparsePoly2& a, const SparsePoly2& b) { return a + (-b); }

SparsePoly2 operator*(const SparsePoly2& a, const SparsePoly2& b) {
  std::vector<Monomial2> t;
  t.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& p : a.terms_)
    for (const auto& q : b.terms_) t.push_back({p.coeff * q.coeff, p.ex + q.ex, p.ey + q.ey});
  return SparsePoly2(std::move(t));
}

SparsePoly2 operator*(const Scalar& c, const SparsePoly2& p) {
  std::vector<Monomial2> t = p.terms_;
  for (auto& m : t) m.coeff = c * m.coeff;
  return SparsePoly2(std::move(t));
}

bool operator==(const SparsePoly2& a, const SparsePoly2& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    const auto& s = a.terms_[i];
    const auto& t = b.terms_[i];
    if (s.ex != t.ex || s.ey != t.ey || !(s.coeff == t.coeff)) return false;
  }
  return true;
}

SparsePoly2 SparsePoly2::pow(int k) const {
  if (k < 0) throw std::invalid_argument("SparsePoly2::pow: negative exponent");
  SparsePoly2 result = constant(1);
  SparsePoly2 base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

SparsePoly2 SparsePoly2::shifted(const Scalar& cx, const Scalar& cy) const {
  std::vector<Monomial2> out;
  for (const auto& t : terms_) {
    for (int i = 0; i <= t.ex; ++i) {
      Scalar fx = Scalar::exact(binomial(t.ex, i));
      for (int k = 0; k < t.ex - i; ++k) fx = fx * cx;
      if (fx.is_zero()) continue;
      for (int j = 0; j <= t.ey; ++j) {
        Scalar fy = Scalar::exact(binomial(t.ey, j));
        for (int k = 0; k < t.ey - j; ++k) fy = fy * cy;
        if (fy.is_zero()) continue;
        out.push_back({t.coeff * fx * fy, i, j});
      }
    }
  }
  return SparsePoly2(std::move(out));
}

SparsePoly2 SparsePoly2::reflected() const {
  std::vector<Monomial2> t = terms_;
  for (auto& m : t)
    if ((m.ex + m.ey) & 1) m.coeff = -m.coeff;
  return SparsePoly2(std::move(t));
}

SparsePoly2 SparsePoly2::without_low_degree(int min_degree) const {
  std::vector<Monomial2> t;
  for (const auto& m : terms_)
    if (m.ex + m.ey >= min_degree) t.push_back(m);
  return SparsePoly2(std::move(t));
}

std::vector<std::string> SparsePoly2::term_strings() const {
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_)
    out.push_back(t.coeff.str() + " x^" + std::to_string(t.ex) + " y^" + std::to_string(t.ey));
  return out;
}

std::string SparsePoly2::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& t : term_strings()) {
    if (!s.empty()) s += " + ";
    s += t;
  }
  return s;
}

SparsePoly2 SparsePoly2::parse_terms(const std::vector<std::string>& terms) {
  std::vector<Monomial2> out;
  for (const auto& text : terms) {
    std::istringstream in(text);
    std::string c, xs, ys, extra;
    if (!(in >> c >> xs >> ys) || (in >> extra) || xs.rfind("x^", 0) != 0 || ys.rfind("y^", 0) != 0)
      throw std::invalid_argument("SparsePoly2::parse: malformed term '" + text + "'");
    out.push_back({Scalar::parse(c), std::stoi(xs.substr(2)), std::stoi(ys.substr(2))});
  }
  return SparsePoly2(std::move(out));
}

SparsePoly2 SparsePoly2::parse(const std::string& text) {
  if (text == "0") return {};
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(" + ", start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 3;
  }
  return parse_terms(parts);
}

SparsePoly2 differentiate(const SparsePoly2& p, Var v) {
  std::vector<Monomial2> out;
  for (const auto& t : p.terms()) {
    int e = v == Var::x ? t.ex : t.ey;
    if (e == 0) continue;
    Monomial2 m{t.coeff * Scalar(e), t.ex, t.ey};
    (v == Var::x ? m.ex : m.ey) -= 1;
    out.push_back(m);
  }
  return SparsePoly2(std::move(out));
}

SparsePoly2 antiderivative(const SparsePoly2& p, Var v) {
  std::vector<Monomial2> out;
  for (const auto& t : p.terms()) {
    int e = (v == Var::x ? t.ex : t.ey) + 1;
    Monomial2 m{t.coeff / Scalar(e), t.ex, t.ey};
    (v == Var::x ? m.ex : m.ey) = e;
    out.push_back(m);
  }
  return SparsePoly2(std::move(out));
}

double evaluate(const SparsePoly2& p, double x, double y) { return p(x, y); }

Scalar evaluate_exact(const SparsePoly2& p, const Scalar& x, const Scalar& y) {
  Scalar sum;
  for (const auto& t : p.terms()) {
    Scalar v = t.coeff;
    for (int i = 0; i < t.ex; ++i) v = v * x;
    for (int j = 0; j < t.ey; ++j) v = v * y;
    sum = sum + v;
  }
  return sum;
}

LogValue evaluate_log(const Monomial2& term, double x, double y) {
  LogValue c = term.coeff.to_log();
  if (c.is_zero() || (term.ex > 0 && x == 0.0) || (term.ey > 0 && y == 0.0)) return {};
  int s = c.sign;
  if ((term.ex & 1) && x < 0) s = -s;
  if ((term.ey & 1) && y < 0) s = -s;
  double lm = c.logmag + (term.ex ? term.ex * std::log(std::fabs(x)) : 0.0) +
              (term.ey ? term.ey * std::log(std::fabs(y)) : 0.0);
  return LogValue::from_log(s, lm);
}

std::size_t monomial_count(const PlanarField& field) { return field.P.term_count() + field.Q.term_count(); }

SparsePoly2 divergence(const PlanarField& field) {
  return differentiate(field.P, Var::x) + differentiate(field.Q, Var::y);
}

}  // namespace mcyc
