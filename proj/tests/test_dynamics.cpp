#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcyc/dynamics.hpp"
#include "oracles.hpp"

using namespace mcyc;

namespace {

struct Built {
  OvalSystem system;
  CycleCertificate cert;
};

Built run(int n, int r) {
  Built b;
  b.cert = certify(n, r, {}, &b.system);
  return b;
}

// Green: the integral of R dy around a counterclockwise oval is the area
// integral of dR/dx over its interior.
double area_integral_of_dx(const SparsePoly2& R, const Oval& o) {
  const SparsePoly2 Rx = differentiate(R, Var::x);
  return oracle::polygon_integral(o.points, [&](double x, double y) { return Rx(x, y); });
}

OdeControls tight() {
  OdeControls c;
  c.rtol = 1e-13;
  c.atol = 1e-15;
  return c;
}

}  // namespace

TEST_CASE("transversal round trip") {
  for (const auto& a : annuli_on_unit_lines(1)) {
    Transversal s(a);
    for (double E : {1e-9, 1e-4, 0.1, 0.24}) {
      const Point2 p = s.point_at(E);
      CHECK(p.x == a->center.x);
      CHECK(p.y > a->center.y);
      CHECK(s.energy_of(p) == doctest::Approx(E).epsilon(1e-9));
      CHECK(s.energy_at_offset({0.0, s.offset_at(E)}) == doctest::Approx(E).epsilon(1e-12));
    }
    CHECK_THROWS_AS(s.point_at(0.3), LevelOutOfRange);
    CHECK_THROWS_AS(s.point_at(0.0), LevelOutOfRange);
  }
}

TEST_CASE("unperturbed displacements vanish") {
  for (int r : {0, 1, 2}) {
    auto annuli = annuli_on_unit_lines(r);
    const PlanarField X = build_xr(r);
    const std::vector<double> energies{1e-8, 1e-4, 0.01, 0.1, 0.2};
    for (const auto& a : annuli) {
      DisplacementProfile p = displacement_profile_energy(X, a, energies, 0.0);
      REQUIRE(p.samples.size() == energies.size());
      for (const auto& s : p.samples) {
        CHECK(s.ok);
        CHECK(std::fabs(s.d) <= 1e-9);
        CHECK(std::fabs(s.d) <= displacement_floor(s.energy, {}));
        CHECK(s.period > 0.0);
      }
      CHECK(count_cycles(X, a, energies, 0.0).count() == 0);
    }
  }
}

TEST_CASE("displacement_profile takes levels h") {
  auto a = annuli_on_unit_lines(0)[1];
  const PlanarField X = build_xr(0);
  DisplacementProfile p = displacement_profile(X, a, {a->h_center + 0.05}, 0.0);
  REQUIRE(p.samples.size() == 1);
  CHECK(p.samples[0].energy == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(p.samples[0].h == doctest::Approx(a->h_center + 0.05).epsilon(1e-12));
}

TEST_CASE("first-order drift on X_{1,0} matches the area-integral oracle") {
  Built b = run(1, 0);
  const SparsePoly2 R = build_rn(b.cert.spec);
  for (double eps : {1e-3, 5e-4}) {
    const PlanarField X = build_perturbed(0, b.cert.spec, eps);
    for (const auto& ao : b.system.annuli) {
      const Transversal sigma(ao.annulus);
      const PlanarRhs f = centered_rhs(X, *ao.annulus);
      for (const auto& o : ao.outer) {
        const double I = area_integral_of_dx(R, o);
        const DisplacementSample s = displacement(f, sigma, o.energy.to_double(), tight());
        REQUIRE(s.ok);
        CAPTURE(o.energy.to_double());
        CHECK((s.d > 0) == (I > 0));
        // d is measured in h, and dH/dt = eps R dy/dt, so the conversion factor is 1.
        CHECK(std::fabs(s.d / eps - I) <= 0.1 * std::fabs(I));
      }
    }
  }
}

TEST_CASE("displacement is odd in eps to first order") {
  Built b = run(1, 0);
  auto a = b.system.annuli[1].annulus;
  const double E = b.system.annuli[1].outer[1].energy.to_double();
  const Transversal sigma(a);
  auto d = [&](double eps) {
    return displacement(centered_rhs(build_perturbed(0, b.cert.spec, eps), *a), sigma, E, tight()).d;
  };
  for (double eps : {1e-2, 5e-3}) {
    const double plus = d(eps), minus = d(-eps);
    CHECK(plus * minus < 0.0);
  }
  // Richardson: the even part scales like eps^2.
  const double s1 = d(1e-2) + d(-1e-2), s2 = d(5e-3) + d(-5e-3);
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("count_cycles brackets zeros between certified ovals") {
  Built b = run(1, 0);
  const PlanarField X = build_perturbed(0, b.cert.spec, 1e-3);
  for (const auto& ao : b.system.annuli) {
    std::vector<double> levels;
    for (const auto& o : ao.inner) levels.push_back(o.energy.to_double());
    for (const auto& o : ao.outer) levels.push_back(o.energy.to_double());
    std::sort(levels.begin(), levels.end());
    CycleCount cc = count_cycles(X, ao.annulus, levels, 1e-3, tight());
    REQUIRE(cc.count() == 2);
    // One zero in each gap between adjacent certified ovals.
    for (std::size_t i = 0; i < cc.count(); ++i) {
      CHECK(cc.zero_energies[i] > levels[i]);
      CHECK(cc.zero_energies[i] < levels[i + 1]);
      CHECK(cc.zero_h[i] == doctest::Approx(ao.annulus->h_center + ao.annulus->orientation_sign * cc.zero_energies[i]));
    }
  }
}

TEST_CASE("reversibility") {
  for (double a : {-1.0, -1.05, 0.3, 2.0}) {
    ReversibilityResult r = check_reversibility(example_m4(a));
    CHECK(r.exact);
    CHECK(r.residual_p.is_zero());
    CHECK(r.residual_q.is_zero());
    CHECK(r.residual() == 0.0);
  }
  const double a5 = 3.0 - 4.0 * std::sqrt(5.0) / 3.0;
  for (auto [a, b] : {std::pair{a5, -1.0}, {0.5, 2.0}}) {
    ReversibilityResult r = check_reversibility(example_m5(a, b));
    CHECK(r.exact);
    CHECK(r.residual() == 0.0);
  }
  // (x^2, y): P is even as required, Q = y is odd and breaks reversibility.
  ReversibilityResult bad = check_reversibility({SparsePoly2::monomial(1, 2, 0), SparsePoly2::y()});
  CHECK(bad.residual_p.is_zero());
  CHECK_FALSE(bad.residual_q.is_zero());
  CHECK(bad.residual() > 0.0);
}

TEST_CASE("Hopf analysis of example_m4 at (1, 1)") {
  HopfResult h = hopf_analysis([](double a) { return example_m4(a); }, {1.0, 1.0}, -2.0, 0.0);
  // Jacobian [[2a, 4a], [2, 2]]: trace 2a + 2, det -4a.
  CHECK(h.param == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::fabs(h.trace) < 1e-12);
  CHECK(h.det == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(h.lyapunov_sign == 1);
  CHECK(h.c3 > 0.0);
  CHECK_FALSE(h.order_two);
  REQUIRE(h.displacements.size() == h.radii.size());
  for (double d : h.displacements) CHECK(d > 0.0);

  CHECK_THROWS_AS(hopf_analysis([](double a) { return example_m4(a); }, {1.0, 1.0}, 0.0, 1.0), FitUnstable);
}

TEST_CASE("example_m5 has a weak focus of order two") {
  const double a5 = 3.0 - 4.0 * std::sqrt(5.0) / 3.0;
  HopfResult h = hopf_analysis([&](double b) { return example_m5(a5 - (b + 1.0), b); }, {1.0, 1.0}, -1.5, -0.5);
  CHECK(h.param == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(h.det > 0.0);
  CHECK(h.order_two);
  for (std::size_t i = 0; i < h.radii.size(); ++i)
    CHECK(std::fabs(h.c3 * std::pow(h.radii[i], 3)) <= 1e-3 * std::fabs(h.displacements[i]));
  CHECK(h.c5 != 0.0);
  CHECK(h.lyapunov_sign == (h.c5 > 0 ? 1 : -1));
}

TEST_CASE("example_m4 limit cycles after the Hopf bifurcation") {
  M4CycleResult m = verify_m4_cycles(0.05);
  REQUIRE(m.count == 2);
  CHECK(m.hausdorff <= 1e-6);
  CHECK(m.radius == doctest::Approx(m.mirror_radius).epsilon(1e-9));
  // The return map changes sign across the reported radius.
  const PlanarField X = example_m4(-1.05);
  const OdeControls c = tight();
  CHECK(focus_displacement(X, {1.0, 1.0}, m.radius - 2e-3, c) * focus_displacement(X, {1.0, 1.0}, m.radius + 2e-3, c) <
        0.0);
  // Every orbit point is reflected onto the cycle around (-1, -1).
  REQUIRE(m.cycle.size() > 100);

  M4CycleResult small = verify_m4_cycles(0.01);
  CHECK(small.count == 2);
  CHECK(small.radius < m.radius);

  CHECK(verify_m4_cycles(0.0).count == 0);
}

TEST_CASE("hausdorff_polyline") {
  std::vector<Point2> a, b;
  for (int i = 0; i < 400; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 400;
    a.push_back({std::cos(t), std::sin(t)});
    b.push_back({1.1 * std::cos(t), 1.1 * std::sin(t)});
  }
  CHECK(hausdorff_polyline(a, b) == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(hausdorff_polyline(a, a) == 0.0);
}

TEST_CASE("verify_certificate on (1, 0) and (2, 0)") {
  for (auto [n, want] : {std::pair{1, 4LL}, {2, 8LL}}) {
    Built b = run(n, 0);
    VerifyReport rep = verify_certificate(b.cert, b.system);
    CAPTURE(n);
    REQUIRE(rep.accepted_eps);
    CHECK(rep.certified_count == want);
    CHECK(rep.simulated_cycles + rep.certificate_only_cycles >= want);
    CHECK(rep.simulated_cycles >= want);
    CHECK(rep.law_holds);
    CHECK(rep.worst_law_error <= 0.1);
    for (const auto& e : rep.scan)
      if (e.eps == *rep.accepted_eps) CHECK(e.signs_match);
    for (const auto& av : rep.annuli)
      for (const auto& ck : av.ovals) {
        if (!ck.law_checked) continue;
        CHECK(ck.kappa == doctest::Approx(1.0).epsilon(0.1));
      }
  }
}
