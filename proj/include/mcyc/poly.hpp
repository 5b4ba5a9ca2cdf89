#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcyc/log_value.hpp"
#include "mcyc/scalar.hpp"

namespace mcyc {

enum class Var { x, y };

struct Monomial2 {
  Scalar coeff;
  int ex = 0;
  int ey = 0;
};

/// Sparse bivariate polynomial in canonical form: terms sorted by (ex, ey),
/// no repeated exponent pairs, no zero coefficients.
class SparsePoly2 {
 public:
  SparsePoly2() = default;
  explicit SparsePoly2(std::vector<Monomial2> terms);

  static SparsePoly2 constant(const Scalar& c) { return SparsePoly2({{c, 0, 0}}); }
  static SparsePoly2 monomial(const Scalar& c, int ex, int ey) { return SparsePoly2({{c, ex, ey}}); }
  static SparsePoly2 x() { return monomial(1, 1, 0); }
  static SparsePoly2 y() { return monomial(1, 0, 1); }

  const std::vector<Monomial2>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_exact() const;
  int degree() const;
  /// Coefficient of x^ex y^ey (zero when absent).
  Scalar coeff(int ex, int ey) const;

  /// Compensated evaluation; throws OverflowError instead of returning inf.
  double operator()(double x, double y) const;

  SparsePoly2 operator-() const;
  friend SparsePoly2 operator+(const SparsePoly2& a, const SparsePoly2& b);
  friend SparsePoly2 operator-(const SparsePoly2& a, const SparsePoly2& b);
  friend SparsePoly2 operator*(const SparsePoly2& a, const SparsePoly2& b);
  friend SparsePoly2 operator*(const Scalar& c, const SparsePoly2& p);
  friend bool operator==(const SparsePoly2& a, const SparsePoly2& b);

  SparsePoly2 pow(int k) const;
  /// p(x + cx, y + cy); exact when p, cx, cy are exact.
  SparsePoly2 shifted(const Scalar& cx, const Scalar& cy) const;
  /// p(-x, -y).
  SparsePoly2 reflected() const;
  /// Drops every term of total degree below `min_degree`.
  SparsePoly2 without_low_degree(int min_degree) const;

  /// Sorted "coeff x^i y^j" entries, one per term.
  std::vector<std::string> term_strings() const;
  /// Term strings joined with " + "; "0" for the zero polynomial.
  std::string str() const;
  static SparsePoly2 parse_terms(const std::vector<std::string>& terms);
  static SparsePoly2 parse(const std::string& text);

 private:
  struct EvalTerm {
    double c;
    double logc;
    int sign;
    int ex;
    int ey;
    bool log_path;
  };
  void rebuild_cache();

  std::vector<Monomial2> terms_;
  std::vector<EvalTerm> cache_;
};

SparsePoly2 differentiate(const SparsePoly2& p, Var v);
/// Formal antiderivative with zero constant of integration.
SparsePoly2 antiderivative(const SparsePoly2& p, Var v);
double evaluate(const SparsePoly2& p, double x, double y);
/// Evaluation in Scalar arithmetic; exact for exact p and exact arguments.
Scalar evaluate_exact(const SparsePoly2& p, const Scalar& x, const Scalar& y);
/// Sign and log-magnitude of one monomial at (x, y).
LogValue evaluate_log(const Monomial2& term, double x, double y);

/// Planar polynomial vector field x' = P, y' = Q.
struct PlanarField {
  SparsePoly2 P;
  SparsePoly2 Q;
};

std::size_t monomial_count(const PlanarField& field);
SparsePoly2 divergence(const PlanarField& field);

}  // namespace mcyc
