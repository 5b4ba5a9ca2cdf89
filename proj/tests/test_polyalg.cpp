#include <doctest.h>

#include <cmath>
#include <random>

#include "mcyc/errors.hpp"
#include "mcyc/families.hpp"
#include "mcyc/poly.hpp"

using namespace mcyc;

namespace {

SparsePoly2 P(const std::string& s) { return SparsePoly2::parse(s); }

SparsePoly2 random_exact_poly(std::mt19937& rng, int max_terms, int max_deg) {
  std::uniform_int_distribution<int> nterms(0, max_terms), deg(0, max_deg), num(-9, 9), den(1, 7);
  std::vector<Monomial2> t;
  int k = nterms(rng);
  for (int i = 0; i < k; ++i) t.push_back({Scalar::ratio(num(rng), den(rng)), deg(rng), deg(rng)});
  return SparsePoly2(std::move(t));
}

}  // namespace

TEST_CASE("canonical form sorts, merges and strips exact zeros") {
  SparsePoly2 p({{3, 1, 0}, {2, 0, 2}, {-3, 1, 0}, {0, 5, 5}, {1, 0, 1}});
  REQUIRE(p.term_count() == 2);
  CHECK(p.terms()[0].ex == 0);
  CHECK(p.terms()[0].ey == 1);
  CHECK(p.terms()[1].ey == 2);
}

TEST_CASE("differentiate") {
  CHECK(differentiate(P("1 x^3 y^0 + -1 x^1 y^0"), Var::x) == P("-1 x^0 y^0 + 3 x^2 y^0"));
  CHECK(differentiate(P("1 x^0 y^1 + -1 x^0 y^3"), Var::x).is_zero());

  // x^3 - x (y/2)^6 written with the exact coefficient 1/64.
  SparsePoly2 r1 = SparsePoly2::monomial(1, 3, 0) - SparsePoly2::x() * SparsePoly2::monomial(Scalar::ratio(1, 2), 0, 1).pow(6);
  SparsePoly2 expected({{3, 2, 0}, {Scalar::ratio(-1, 64), 0, 6}});
  CHECK(differentiate(r1, Var::x) == expected);
}

TEST_CASE("evaluate") {
  SparsePoly2 p = P("1 x^0 y^1 + -1 x^0 y^3");
  CHECK(p(0.37, 1.0) == 0.0);
  CHECK(p(-12.0, 1.0) == 0.0);
  CHECK(build_qr(1)(2.0, 0.0) == 6.0);
  CHECK(P("1 x^2 y^2 + -1 x^0 y^0")(1.0, -1.0) == 0.0);
}

TEST_CASE("evaluate reports overflow instead of returning infinity") {
  SparsePoly2 big = SparsePoly2::monomial(1, 0, 2000);
  CHECK_THROWS_AS(big(0.0, 2.0), OverflowError);
  CHECK(big(0.0, 0.5) >= 0.0);
  SparsePoly2 two = SparsePoly2::monomial(Scalar::real(1e308), 0, 0) + SparsePoly2::monomial(Scalar::real(1e308), 1, 0);
  CHECK_THROWS_AS(two(1.0, 0.0), OverflowError);
}

TEST_CASE("compensated evaluation keeps small terms next to large ones") {
  SparsePoly2 p({{Scalar::real(1e16), 0, 0}, {1, 1, 0}, {Scalar::real(-1e16), 0, 1}});
  CHECK(p(1.0, 1.0) == 1.0);
}

TEST_CASE("evaluate_log") {
  const double a = 1.3;
  const long long m = 500;
  Monomial2 t{Scalar::from_log(LogValue::from_log(1, -2.0 * m * std::log(a))), 0, static_cast<int>(2 * m)};
  LogValue at_zero = evaluate_log(t, 0.4, 0.0);
  CHECK(at_zero.sign == 0);
  CHECK(std::isinf(at_zero.logmag));
  LogValue at_a = evaluate_log(t, 0.4, a);
  CHECK(at_a.sign == 1);
  CHECK(std::fabs(at_a.logmag) < 1e-10);

  Monomial2 u{Scalar::ratio(1, 16), 1, 4};  // x (y/2)^4
  LogValue v = evaluate_log(u, -3.0, 2.0);
  CHECK(v.sign == -1);
  CHECK(v.logmag == doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("log-form coefficients evaluate far outside the double range") {
  // (y/1.1)^8000 at y = 1.1*(1 + 1e-4): coefficient ~ e^-1525.
  const double a = 1.1;
  Monomial2 t{Scalar::from_log(LogValue::from_log(-1, -8000.0 * std::log(a))), 1, 8000};
  SparsePoly2 p({t});
  REQUIRE(p.terms()[0].coeff.kind() == Scalar::Kind::log);
  double y = a * (1.0 + 1e-4);
  double expected = -0.5 * std::exp(8000.0 * std::log1p(1e-4));
  CHECK(p(0.5, y) == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("antiderivative") {
  CHECK(antiderivative(SparsePoly2::x(), Var::x) == SparsePoly2::monomial(Scalar::ratio(1, 2), 2, 0));
  CHECK(antiderivative(P("1 x^3 y^0 + -1 x^1 y^0"), Var::x) == P("-1/2 x^2 y^0 + 1/4 x^4 y^0"));
  CHECK(antiderivative(SparsePoly2{}, Var::y).is_zero());
}

TEST_CASE("property: differentiate after antiderivative is the identity on exact polynomials") {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 200; ++trial) {
    SparsePoly2 p = random_exact_poly(rng, 6, 7);
    for (Var v : {Var::x, Var::y}) REQUIRE(differentiate(antiderivative(p, v), v) == p);
  }
}

TEST_CASE("property: evaluate_log matches evaluate on representable terms") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-3.0, 3.0), coef(-5.0, 5.0);
  std::uniform_int_distribution<int> deg(0, 40);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Monomial2 t{Scalar::real(coef(rng)), deg(rng), deg(rng)};
    double x = coord(rng), y = coord(rng);
    double direct = SparsePoly2({t})(x, y);
    double mag = std::fabs(direct);
    if (!(mag >= 1e-300 && mag <= 1e300)) continue;
    LogValue l = evaluate_log(t, x, y);
    REQUIRE(l.to_double() == doctest::Approx(direct).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("monomial_count") {
  CHECK(monomial_count(PlanarField{}) == 0);
  CHECK(monomial_count(build_xr(0)) == 3);
  PlanarField f{SparsePoly2({{1, 0, 1}, {0, 4, 4}, {-1, 0, 3}}), SparsePoly2({{-1, 1, 0}, {1, 3, 0}, {0, 2, 0}})};
  PlanarField g{SparsePoly2({{-1, 0, 3}, {1, 0, 1}}), SparsePoly2({{1, 3, 0}, {-1, 1, 0}})};
  CHECK(monomial_count(f) == monomial_count(g));
  CHECK(monomial_count(f) == 4);
}

TEST_CASE("shift and reflection") {
  SparsePoly2 h = hamiltonian_of(build_xr(0));
  SparsePoly2 g = h.shifted(0, 1);
  // H(x, 1 + v) = -1/4 + x^2/2 + v^2 + v^3 + v^4/4
  CHECK(g == P("-1/4 x^0 y^0 + 1 x^0 y^2 + 1 x^0 y^3 + 1/4 x^0 y^4 + 1/2 x^2 y^0"));
  CHECK(P("1 x^1 y^0 + 1 x^2 y^0").reflected() == P("-1 x^1 y^0 + 1 x^2 y^0"));
}

TEST_CASE("property: text serialization round-trips") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    SparsePoly2 p = random_exact_poly(rng, 5, 9);
    REQUIRE(SparsePoly2::parse(p.str()) == p);
  }
  SparsePoly2 mixed({{Scalar::real(0.125), 1, 0}, {Scalar::from_log(LogValue::from_log(-1, -900.5)), 1, 400}});
  SparsePoly2 back = SparsePoly2::parse_terms(mixed.term_strings());
  REQUIRE(back.term_count() == 2);
  CHECK(back.terms()[1].coeff.to_log().logmag == -900.5);
  CHECK(back.terms()[1].coeff.sign() == -1);
  CHECK(back.terms()[0].coeff.to_double() == 0.125);
  CHECK_THROWS(SparsePoly2::parse("3 x^1"));
}

TEST_CASE("scalar arithmetic across kinds") {
  Scalar tiny = Scalar::from_log(LogValue::from_log(1, -1000.0));
  CHECK(tiny.kind() == Scalar::Kind::log);
  Scalar sum = tiny + tiny;
  CHECK(sum.to_log().logmag == doctest::Approx(-1000.0 + std::log(2.0)));
  Scalar prod = tiny * Scalar::from_log(LogValue::from_log(1, 999.0));
  CHECK(prod.kind() == Scalar::Kind::real);
  CHECK(prod.to_double() == doctest::Approx(std::exp(-1.0)));
  CHECK((Scalar::ratio(1, 3) + Scalar::ratio(1, 6)) == Scalar::ratio(1, 2));
  CHECK(rational_from_double(0.1) != Rational(1, 10));
  CHECK(rational_from_double(-0.375) == Rational(-3, 8));
}
