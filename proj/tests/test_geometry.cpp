#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mcyc/geometry.hpp"

using namespace mcyc;

namespace {

std::vector<Point2> saddles_of(const PlanarField& f, const Box& box) {
  std::vector<Point2> out;
  for (const auto& s : classify_singularities(f, box).points)
    if (s.kind == SingularKind::saddle) out.push_back(s.point);
  return out;
}

std::shared_ptr<const PeriodAnnulus> xr_annulus(int r, double x, double y) {
  PlanarField f = build_xr(r);
  SparsePoly2 h = hamiltonian_of(f);
  auto s = saddles_of(f, {-r - 0.5, r + 0.5, -1.5, 1.5});
  return std::make_shared<PeriodAnnulus>(find_annulus(h, {x, y}, s));
}

// F(x) - F(j) = int_j^x prod_k (t - k) dt by composite Simpson on the product form.
double f_rise(int r, int j, double x) {
  auto q = [&](double t) {
    double p = 1.0;
    for (int k = -r; k <= r; ++k) p *= t - k;
    return p;
  };
  const int n = 256;
  const double h = (x - j) / n;
  double s = q(j) + q(x);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * q(j + i * h);
  return s * h / 3.0;
}

// Largest x > j with F(x) - F(j) = e, by bisection on the monotone branch.
double x_extent(int r, int j, double e) {
  double lo = j, hi = j + 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f_rise(r, j, mid) < e ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) - j;
}

// Area of {x^2/2 + (y^2 - 1)^2/4 <= e} around (0, 1) via u = (y^2 - 1)/2 = sqrt(e) sin(phi).
double x0_area(double e) {
  const int n = 20000;
  const double a = -std::numbers::pi / 2, b = std::numbers::pi / 2, h = (b - a) / n;
  auto g = [&](double phi) {
    double c = std::cos(phi);
    return 2.0 * std::sqrt(2.0) * e * c * c / std::sqrt(1.0 + 2.0 * std::sqrt(e) * std::sin(phi));
  };
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

void check_level_fidelity(const Oval& o) {
  double worst = 0.0;
  for (const auto& p : o.points) worst = std::max(worst, std::fabs(o.annulus->H(p.x, p.y) - o.h));
  CHECK(worst <= 1e-9 * std::max(1.0, std::fabs(o.h)));
}

}  // namespace

TEST_CASE("find_annulus on X_0") {
  auto up = xr_annulus(0, 0.0, 1.0);
  CHECK(up->h_center == -0.25);
  CHECK(up->h_sep == 0.0);
  CHECK(up->orientation_sign == 1);
  CHECK(up->cx == 0);
  CHECK(up->cy == 1);
  auto down = xr_annulus(0, 0.0, -1.0);
  CHECK(down->h_center == up->h_center);
  CHECK(down->h_sep == up->h_sep);
}

TEST_CASE("find_annulus on X_2 picks the lowest saddle level above the center") {
  PlanarField f = build_xr(2);
  SparsePoly2 h = hamiltonian_of(f);
  auto saddles = saddles_of(f, {-2.5, 2.5, -1.5, 1.5});
  double hc = h(2.0, 1.0);
  double best = INFINITY;
  for (const auto& s : saddles)
    if (h(s.x, s.y) > hc) best = std::min(best, h(s.x, s.y));
  PeriodAnnulus a = find_annulus(h, {2.0, 1.0}, saddles);
  CHECK(a.h_center == doctest::Approx(-0.25 - 4.0 / 3.0).epsilon(1e-15));
  CHECK(a.h_sep == best);
  CHECK(a.h_sep == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
  CHECK(a.sep_energy() == doctest::Approx(0.25));
}

TEST_CASE("centers on y = 0 are maxima with clockwise flow") {
  auto a = xr_annulus(1, 0.0, 0.0);
  CHECK(a->orientation_sign == -1);
  CHECK(a->h_center == 0.0);
  CHECK(a->h_sep == -0.25);
  Oval o = trace_oval(a, -0.1);
  CHECK(o.area > 0.0);
  check_level_fidelity(o);
  CHECK(o.b_min == 0.0);
}

TEST_CASE("find_annulus errors") {
  SparsePoly2 h = hamiltonian_of(build_xr(0));
  CHECK_THROWS_AS(find_annulus(h, {0.0, 1.0}, {}), NoBoundingSaddle);
  CHECK_THROWS_AS(find_annulus(h, {0.0, 0.0}, {}), Degenerate);
}

TEST_CASE("trace_oval on X_0 against the separable oracle") {
  auto a = xr_annulus(0, 0.0, 1.0);
  const double e = 0.125;
  Oval o = trace_oval(a, -0.125);
  CHECK(o.alpha == doctest::Approx(std::sqrt(1.0 + std::sqrt(0.5))).epsilon(1e-12));
  CHECK(o.alpha == doctest::Approx(std::sqrt(1.0 + 2.0 * std::sqrt(e))).epsilon(1e-12));
  CHECK(o.b_min == doctest::Approx(std::sqrt(1.0 - 2.0 * std::sqrt(e))).epsilon(1e-12));
  CHECK(o.max_abs_x.to_double() == doctest::Approx(std::sqrt(2.0 * e)).epsilon(1e-12));
  CHECK(o.area == doctest::Approx(x0_area(e)).epsilon(1e-10));
  CHECK(signed_area(o.points) == doctest::Approx(o.area).epsilon(1e-4));
  CHECK(o.area > 0.0);
  check_level_fidelity(o);
}

TEST_CASE("property: amplitude statistics of every y = +-1 annulus") {
  for (int r = 0; r <= 5; ++r) {
    for (int j = -r; j <= r; j += 2) {
      for (double y : {1.0, -1.0}) {
        auto a = xr_annulus(r, j, y);
        REQUIRE(a->sep_energy() == doctest::Approx(0.25));
        for (double e : {1e-6, 0.01, 0.2}) {
          Oval o = trace_oval_energy(a, LogValue::from_double(e));
          CHECK(o.alpha == doctest::Approx(std::sqrt(1.0 + 2.0 * std::sqrt(e))).epsilon(1e-11));
          CHECK(o.b_min == doctest::Approx(std::sqrt(1.0 - 2.0 * std::sqrt(e))).epsilon(1e-11));
          CHECK(o.b_min < 1.0);
          CHECK(o.alpha > 1.0);
          CHECK(o.area > 0.0);
          CHECK(o.max_abs_x.to_double() - std::fabs(j) == doctest::Approx(x_extent(r, std::abs(j), e)).epsilon(1e-9));
          check_level_fidelity(o);
        }
      }
    }
  }
}

TEST_CASE("ovals shrink to the center") {
  auto a = xr_annulus(1, 1.0, 1.0);
  double prev = INFINITY;
  for (double e : {1e-2, 1e-4, 1e-8, 1e-16}) {
    Oval o = trace_oval_energy(a, LogValue::from_double(e));
    CHECK(o.area < prev);
    prev = o.area;
    // Quadratic model H - h_c = Q'(1) x^2/2 + (y-1)^2 has area pi e / sqrt(Q'(1)/2 * 1).
    if (e <= 1e-8) CHECK(o.area == doctest::Approx(std::numbers::pi * e / std::sqrt(1.0)).epsilon(1e-3));
  }
  Oval tiny = trace_oval_energy(a, LogValue::from_log(1, -3000.0));
  CHECK(tiny.area == 0.0);
  CHECK(tiny.log_area.sign == 1);
  CHECK(tiny.log_area.logmag == doctest::Approx(-3000.0 + std::log(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("property: nesting") {
  auto a = xr_annulus(2, 0.0, 1.0);
  std::vector<double> levels = {1e-4, 0.02, 0.1, 0.2, 0.2499};
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    Oval inner = trace_oval_energy(a, LogValue::from_double(levels[i]));
    Oval outer = trace_oval_energy(a, LogValue::from_double(levels[i + 1]));
    for (const auto& p : inner.points) REQUIRE(point_in_polygon(outer.points, p));
    CHECK(point_in_polygon(inner.points, a->center));
  }
}

TEST_CASE("property: the lower oval mirrors the upper one") {
  for (int r : {0, 3}) {
    int j = r % 2;
    auto up = xr_annulus(r, j, 1.0);
    auto down = xr_annulus(r, j, -1.0);
    for (double e : {0.01, 0.24}) {
      Oval u = trace_oval_energy(up, LogValue::from_double(e));
      Oval d = trace_oval_energy(down, LogValue::from_double(e));
      REQUIRE(u.size() == d.size());
      const std::size_t n = u.size();
      double worst = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Point2& p = d.points[k];
        const Point2& q = u.points[(n - k) % n];
        worst = std::max({worst, std::fabs(p.x - q.x), std::fabs(p.y + q.y)});
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("level range checks") {
  auto a = xr_annulus(0, 0.0, 1.0);
  CHECK_THROWS_AS(trace_oval(a, -0.3), LevelOutOfRange);
  CHECK_THROWS_AS(trace_oval(a, 0.01), LevelOutOfRange);
  Oval capped = trace_oval(a, 0.0);
  CHECK(capped.h < 0.0);
  CHECK(capped.h == doctest::Approx(-0.25e-6).epsilon(1e-6));
}

TEST_CASE("non-star-shaped level curves are detected") {
  // Banana-shaped levels around the parabola y = x^2.
  SparsePoly2 h = SparsePoly2::parse("1 x^2 y^0 + 100 x^0 y^2 + -200 x^2 y^1 + 100 x^4 y^0");
  PeriodAnnulus small = find_annulus(h, {0.0, 0.0}, {{0.0, 0.01}});
  auto wide = std::make_shared<PeriodAnnulus>(small);
  wide->h_sep = 2.0;
  CHECK_NOTHROW(trace_oval(wide, 0.001));
  CHECK_THROWS_AS(trace_oval(wide, 1.0), NotStarShaped);
}

TEST_CASE("levels that never close are rejected") {
  // H = x^2 + y^2 - y^3 has a saddle at (0, 2/3) with H = 4/27; above it the
  // level through the center's region opens up.
  SparsePoly2 h = SparsePoly2::parse("1 x^0 y^2 + -1 x^0 y^3 + 1 x^2 y^0");
  CHECK_THROWS_AS(find_annulus(h, {0.0, 0.0}, {{0.0, -1.0}}), NoBoundingSaddle);
  PeriodAnnulus a = find_annulus(h, {0.0, 0.0}, {{0.0, -1.0}, {0.0, 2.0 / 3.0}});
  CHECK(a.h_sep == doctest::Approx(4.0 / 27.0).epsilon(1e-15));
}

TEST_CASE("oval_by_amplitude") {
  auto a = xr_annulus(0, 0.0, 1.0);
  Oval o = oval_by_amplitude(a, std::sqrt(2.0) - 1e-3);
  CHECK(std::fabs(o.alpha - (std::sqrt(2.0) - 1e-3)) <= 1e-9);
  check_level_fidelity(o);
  try {
    oval_by_amplitude(a, 1.0);
    FAIL("expected AmplitudeUnreachable");
  } catch (const AmplitudeUnreachable& e) {
    CHECK(e.range_lo() == 1.0);
    CHECK(e.range_hi() == doctest::Approx(std::sqrt(1.0 + 2.0 * std::sqrt(0.25 * (1 - 1e-6)))).epsilon(1e-10));
  }
  CHECK_THROWS_AS(oval_by_amplitude(a, 1.5), AmplitudeUnreachable);

  auto b = xr_annulus(3, -1.0, -1.0);
  Oval q = oval_by_amplitude(b, 1.2);
  CHECK(std::fabs(q.alpha - 1.2) <= 1e-9);
  // alpha = sqrt(1 + 2 sqrt(E)) inverted.
  double e = std::pow((1.2 * 1.2 - 1.0) / 2.0, 2);
  CHECK(q.energy.to_double() == doctest::Approx(e).epsilon(1e-9));
}

TEST_CASE("property: amplitude increases with the level") {
  for (int r : {0, 1, 4}) {
    auto a = xr_annulus(r, r % 2 ? 1.0 : 0.0, 1.0);
    double prev = 1.0;
    for (int k = 1; k <= 40; ++k) {
      double amp = amplitude_at(*a, a->max_energy() * k / 40.0);
      CHECK(amp > prev);
      prev = amp;
    }
  }
}

TEST_CASE("shrink_to_xwidth") {
  auto a = xr_annulus(0, 0.0, 1.0);
  Oval o = shrink_to_xwidth(a, LogValue::from_double(0.5));
  CHECK(o.max_abs_x.to_double() <= 0.5);
  CHECK(o.area > 0.0);
  check_level_fidelity(o);

  // H - h_c = x^2/2 + (y-1)^2 + ..., so max|x| = sqrt(2E) to leading order.
  Oval t = shrink_to_xwidth(a, LogValue::from_log(1, -500.0));
  CHECK(t.max_abs_x.logmag <= -500.0);
  CHECK(t.max_abs_x.logmag == doctest::Approx(0.5 * (std::log(2.0) + t.energy.logmag)).epsilon(1e-12));
  CHECK(t.log_alpha > 0.0);
  CHECK(t.log_b_min < 0.0);

  auto b = xr_annulus(2, 0.0, -1.0);
  Oval u = shrink_to_xwidth(b, LogValue::from_log(1, -80.0));
  CHECK(u.max_abs_x.logmag <= -80.0);
  // Q_2'(0) = 4: H - h_c = 2x^2 + (y+1)^2 + ..., max|x| = sqrt(E/2).
  CHECK(u.max_abs_x.logmag == doctest::Approx(0.5 * (u.energy.logmag - std::log(2.0))).epsilon(1e-12));
  Oval ref = trace_oval_energy(b, LogValue::from_double(0.1));
  for (const auto& p : u.points) CHECK(point_in_polygon(ref.points, p));

  CHECK_THROWS_AS(shrink_to_xwidth(xr_annulus(1, 1.0, 1.0), LogValue::from_double(0.1)), std::invalid_argument);
}

TEST_CASE("polylines, reversal and CSV") {
  std::vector<Point2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == 1.0);
  CHECK(point_in_polygon(sq, {0.5, 0.5}));
  CHECK_FALSE(point_in_polygon(sq, {1.5, 0.5}));
  Oval p = oval_from_polyline(sq);
  CHECK(p.area == 1.0);
  CHECK(reversed(p).area == -1.0);
  CHECK(p.alpha == 1.0);
  CHECK(p.b_min == 0.0);

  auto a = xr_annulus(0, 0.0, 1.0);
  TraceOptions few;
  few.n_vertices = 16;
  few.adaptive = false;
  Oval o = trace_oval(a, -0.2, few);
  std::ostringstream out;
  write_oval_csv(out, o);
  std::string text = out.str();
  CHECK(text.rfind("# h=-0.2", 0) == 0);
  CHECK(text.find("\nx,y\n") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 18);
  Oval r = reversed(o);
  CHECK(signed_area(r.points) == doctest::Approx(-signed_area(o.points)).epsilon(1e-14));
  CHECK(r.points[0].x == o.points[0].x);
}
