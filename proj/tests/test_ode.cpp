#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcyc/families.hpp"
#include "mcyc/ode.hpp"

using namespace mcyc;

namespace {

// x' = y, y' = -x: (cos t, -sin t) from (1, 0).
Point2 rotation(const Point2& p) { return {p.y, -p.x}; }
Point2L rotation_l(const Point2L& p) { return {p.y, -p.x}; }

}  // namespace

TEST_CASE("harmonic oscillator against the closed form") {
  OdeControls c;
  c.record = true;
  const double T = 2.0 * std::numbers::pi;
  Trajectory tr = integrate(PlanarRhs(rotation), {1.0, 0.0}, T, c);
  REQUIRE(tr.t.back() == doctest::Approx(T).epsilon(1e-15));
  CHECK(std::fabs(tr.states.back().x - 1.0) < 1e-10);
  CHECK(std::fabs(tr.states.back().y) < 1e-10);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    CHECK(std::fabs(tr.states[i].x - std::cos(tr.t[i])) < 1e-10);
    CHECK(std::fabs(tr.states[i].y + std::sin(tr.t[i])) < 1e-10);
  }
  // Every accepted step passed the embedded error test.
  CHECK(tr.max_error_ratio <= 1.0);
  CHECK(tr.accepted > 0);
}

TEST_CASE("dense output between accepted steps") {
  OdeControls c;
  Dopri5 s(PlanarRhs(rotation), {1.0, 0.0}, 0.0, c);
  for (int k = 0; k < 20; ++k) s.step(10.0);
  for (int i = 0; i <= 8; ++i) {
    const double t = s.t_prev() + (s.t() - s.t_prev()) * i / 8.0;
    const Point2 p = s.dense(t);
    CHECK(std::fabs(p.x - std::cos(t)) < 1e-10);
    CHECK(std::fabs(p.y + std::sin(t)) < 1e-10);
  }
  const Point2 q = s.step_from_prev(0.5 * (s.t() - s.t_prev()));
  const double tm = 0.5 * (s.t() + s.t_prev());
  CHECK(std::fabs(q.x - std::cos(tm)) < 1e-10);
}

TEST_CASE("long double stepper resolves below double roundoff") {
  OdeControls c;
  c.rtol = 1e-17;
  c.atol = 1e-19;
  c.h_min = 1e-18;
  BasicDopri5<Point2L> s(rotation_l, {1.0L, 0.0L}, 0.0L, c);
  const long double T = 2.0L * std::numbers::pi_v<long double>;
  while (s.t() < T) s.step(T);
  CHECK(std::fabs(static_cast<double>(s.state().x - 1.0L)) < 1e-15);
  CHECK(std::fabs(static_cast<double>(s.state().y)) < 1e-15);
}

TEST_CASE("event location on the harmonic oscillator") {
  const PlanarRhs f = rotation;
  // From (1, 0) the orbit first returns to y = 0 going upward at (-1, 0), t = pi.
  Crossing cr = integrate_to_event(
      f, {1.0, 0.0}, [](const Point2& p) { return p.y; }, [&](const Point2& p) { return f(p).y; }, 1,
      [](const Point2&) { return true; });
  CHECK(cr.t == doctest::Approx(std::numbers::pi).epsilon(1e-11));
  CHECK(std::fabs(cr.p.y) < 1e-12);
  CHECK(cr.p.x == doctest::Approx(-1.0).epsilon(1e-10));

  // The accept predicate skips crossings: x > 0 forces a full turn.
  Trajectory path;
  OdeControls c;
  c.record = true;
  Crossing full = integrate_to_event(
      f, {1.0, 0.0}, [](const Point2& p) { return p.y; }, [&](const Point2& p) { return f(p).y; }, -1,
      [](const Point2& p) { return p.x > 0.0; }, c, 1e-12, &path);
  CHECK(full.t == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-11));
  CHECK(path.t.back() == full.t);
  CHECK(path.t.size() > 10);
}

TEST_CASE("X_0 orbit closes with H conserved") {
  const PlanarField X = build_xr(0);
  const SparsePoly2 H = hamiltonian_of(X);
  const PlanarRhs f = field_rhs(X);
  const Point2 p0{0.1, 1.0};
  // Center (0, 1); return to the horizontal line y = 1 on the right of the center.
  const double rate0 = f(p0).y;
  Crossing cr = integrate_to_event(
      f, p0, [](const Point2& p) { return p.y - 1.0; }, [&](const Point2& p) { return f(p).y; }, rate0 > 0 ? 1 : -1,
      [](const Point2& p) { return p.x > 0.0; });
  const double h0 = H(p0.x, p0.y);
  CHECK(std::fabs(H(cr.p.x, cr.p.y) - h0) <= 1e-9 * (1.0 + std::fabs(h0)));
  CHECK(std::fabs(cr.p.x - p0.x) < 1e-9);
  CHECK(cr.t > 0.0);
}

TEST_CASE("saddle start never returns") {
  const PlanarField X = build_xr(0);
  const PlanarRhs f = field_rhs(X);
  OdeControls c;
  c.t_max = 50.0;
  bool reported = false;
  try {
    integrate_to_event(
        f, {0.0, 0.0}, [](const Point2& p) { return p.y; }, [&](const Point2& p) { return f(p).y; }, 1,
        [](const Point2&) { return true; }, c);
  } catch (const NoReturn&) {
    reported = true;
  } catch (const StepUnderflow&) {
    reported = true;
  }
  CHECK(reported);
}

TEST_CASE("blow-up raises StepUnderflow") {
  // x' = x^2 from x = 1 reaches infinity at t = 1.
  const PlanarRhs f = [](const Point2& p) { return Point2{p.x * p.x, 0.0}; };
  CHECK_THROWS_AS(integrate(f, {1.0, 0.0}, 2.0), StepUnderflow);
}
