#include "mcyc/families.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcyc {

const char* const kAdoptedReadingNote =
    "Q_r(x) = prod_{k=-r}^{r} (x - k): the k = 0 factor supplies the leading x, Q_r has r+1 monomials "
    "and simple roots at every integer in [-r, r]. The literal 'x * prod_{k=-r}^{r}(x - k)' expansion has a "
    "double root at x = 0 and is never used for certification.";

SparsePoly2 build_qr(int r, QrReading reading) {
  if (r < 0) throw std::invalid_argument("build_qr: r must be non-negative");
  SparsePoly2 q = SparsePoly2::x();
  const SparsePoly2 x2 = SparsePoly2::monomial(1, 2, 0);
  for (int k = 1; k <= r; ++k) q = q * (x2 - SparsePoly2::constant(static_cast<long long>(k) * k));
  if (reading == QrReading::literal_leading_x) q = SparsePoly2::x() * q;
  return q;
}

PlanarField build_xr(int r, QrReading reading) {
  SparsePoly2 p({{1, 0, 1}, {-1, 0, 3}});
  return {p, build_qr(r, reading)};
}

namespace {

bool nearly_zero(const SparsePoly2& p, const SparsePoly2& scale_ref) {
  if (p.is_exact()) return p.is_zero();
  double scale = 0.0;
  for (const auto& t : scale_ref.terms()) scale = std::max(scale, std::fabs(t.coeff.to_double()));
  for (const auto& t : p.terms())
    if (std::fabs(t.coeff.to_double()) > 1e-12 * std::max(scale, 1.0)) return false;
  return true;
}

}  // namespace

SparsePoly2 hamiltonian_of(const PlanarField& field) {
  SparsePoly2 div = divergence(field);
  if (!nearly_zero(div, field.P + field.Q)) throw NotHamiltonian(div);
  SparsePoly2 h1 = antiderivative(field.Q, Var::x);
  SparsePoly2 rem = -field.P - differentiate(h1, Var::y);
  SparsePoly2 h = h1 + antiderivative(rem, Var::y);
  // rem can only depend on y when the divergence vanishes; the formal
  // gradient check below catches anything else.
  if (!nearly_zero(-differentiate(h, Var::y) - field.P, field.P) ||
      !nearly_zero(differentiate(h, Var::x) - field.Q, field.Q))
    throw NotHamiltonian(div);
  return h;
}

const char* to_string(SingularKind kind) {
  switch (kind) {
    case SingularKind::center: return "center";
    case SingularKind::saddle: return "saddle";
    case SingularKind::degenerate: return "degenerate";
    case SingularKind::focus_candidate: return "focus-candidate";
  }
  return "?";
}

Jacobian jacobian_at(const PlanarField& f, double x, double y) {
  return {differentiate(f.P, Var::x)(x, y), differentiate(f.P, Var::y)(x, y), differentiate(f.Q, Var::x)(x, y),
          differentiate(f.Q, Var::y)(x, y)};
}

namespace {

struct NewtonResult {
  bool converged = false;
  Point2 p;
};

NewtonResult newton_polish(const PlanarField& f, const PlanarField& df_x, const PlanarField& df_y, Point2 p) {
  auto resid = [&](Point2 q) { return std::hypot(f.P(q.x, q.y), f.Q(q.x, q.y)); };
  double r = resid(p);
  for (int it = 0; it < 100; ++it) {
    double fp = f.P(p.x, p.y), fq = f.Q(p.x, p.y);
    double a = df_x.P(p.x, p.y), b = df_y.P(p.x, p.y);
    double c = df_x.Q(p.x, p.y), d = df_y.Q(p.x, p.y);
    double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det)) return {false, p};
    double dx = (d * fp - b * fq) / det;
    double dy = (-c * fp + a * fq) / det;
    double lambda = 1.0;
    Point2 next{p.x - dx, p.y - dy};
    double rn = resid(next);
    for (int k = 0; k < 40 && !(rn < r) && rn != 0.0; ++k) {
      lambda *= 0.5;
      next = {p.x - lambda * dx, p.y - lambda * dy};
      rn = resid(next);
    }
    double step = lambda * std::hypot(dx, dy);
    p = next;
    r = rn;
    if (r == 0.0 || step <= 1e-15 * (1.0 + std::hypot(p.x, p.y))) return {true, p};
    if (lambda < 1e-9) return {r < 1e-12, p};
  }
  return {r < 1e-12, p};
}

}  // namespace

SingularityScan classify_singularities(const PlanarField& field, const Box& box, const ClassifyOptions& opts) {
  if (!(box.x_hi > box.x_lo && box.y_hi > box.y_lo)) throw std::invalid_argument("classify_singularities: empty box");
  const PlanarField dfx{differentiate(field.P, Var::x), differentiate(field.Q, Var::x)};
  const PlanarField dfy{differentiate(field.P, Var::y), differentiate(field.Q, Var::y)};
  const bool hamiltonian = divergence(field).is_zero();

  const int nx = std::max(1, static_cast<int>(std::ceil((box.x_hi - box.x_lo) / opts.cell_size)));
  const int ny = std::max(1, static_cast<int>(std::ceil((box.y_hi - box.y_lo) / opts.cell_size)));
  const double hx = (box.x_hi - box.x_lo) / nx;
  const double hy = (box.y_hi - box.y_lo) / ny;

  SingularityScan scan;
  std::vector<Point2> roots;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t cell = static_cast<std::size_t>(j) * nx + i;
      const double x0 = box.x_lo + i * hx, y0 = box.y_lo + j * hy;
      double pmin = INFINITY, pmax = -INFINITY, qmin = INFINITY, qmax = -INFINITY;
      for (int a = 0; a <= 2; ++a) {
        for (int b = 0; b <= 2; ++b) {
          double x = x0 + 0.5 * a * hx, y = y0 + 0.5 * b * hy;
          double p = field.P(x, y), q = field.Q(x, y);
          pmin = std::min(pmin, p), pmax = std::max(pmax, p);
          qmin = std::min(qmin, q), qmax = std::max(qmax, q);
        }
      }
      if (!(pmin <= 0.0 && pmax >= 0.0 && qmin <= 0.0 && qmax >= 0.0)) continue;
      NewtonResult nr = newton_polish(field, dfx, dfy, {x0 + 0.5 * hx, y0 + 0.5 * hy});
      if (!nr.converged) {
        scan.failures.push_back({cell, "damped Newton did not converge"});
        continue;
      }
      const double mx = 0.25 * hx, my = 0.25 * hy;
      if (nr.p.x < x0 - mx || nr.p.x > x0 + hx + mx || nr.p.y < y0 - my || nr.p.y > y0 + hy + my) continue;
      if (nr.p.x < box.x_lo || nr.p.x > box.x_hi || nr.p.y < box.y_lo || nr.p.y > box.y_hi) continue;
      bool dup = std::any_of(roots.begin(), roots.end(), [&](const Point2& q) {
        return std::hypot(q.x - nr.p.x, q.y - nr.p.y) < 1e-8;
      });
      if (!dup) roots.push_back(nr.p);
    }
  }

  for (const auto& p : roots) {
    Jacobian jac = jacobian_at(field, p.x, p.y);
    double scale = std::max({std::fabs(jac.px), std::fabs(jac.py), std::fabs(jac.qx), std::fabs(jac.qy)});
    SingularityReport rep{p, jac.det(), jac.trace(), SingularKind::degenerate};
    if (std::fabs(rep.det) < opts.degenerate_rel * scale * scale || scale == 0.0)
      rep.kind = SingularKind::degenerate;
    else if (rep.det < 0)
      rep.kind = SingularKind::saddle;
    else
      rep.kind = hamiltonian ? SingularKind::center : SingularKind::focus_candidate;
    scan.points.push_back(rep);
  }
  std::sort(scan.points.begin(), scan.points.end(), [](const SingularityReport& a, const SingularityReport& b) {
    if (std::fabs(a.point.y - b.point.y) > 1e-9) return a.point.y < b.point.y;
    return a.point.x < b.point.x;
  });
  return scan;
}

Rational det_formula(int r, int j) {
  if (r < 0 || std::abs(j) > r) throw std::invalid_argument("det_formula: need |j| <= r");
  Rational prod(2);
  if ((r - j) % 2 != 0) prod = -prod;
  for (int k = -r; k <= r; ++k)
    if (k != j) prod *= std::abs(j - k);
  return prod;
}

void PerturbationSpec::validate() const {
  if (n < 1) throw std::invalid_argument("PerturbationSpec: n must be >= 1");
  if (a.size() != static_cast<std::size_t>(n + 1) || m.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("PerturbationSpec: need n+1 thresholds and exponents");
  if (a[0] != 1.0 || m[0] != 0) throw std::invalid_argument("PerturbationSpec: a_0 = 1 and m_0 = 0 required");
  for (int i = 1; i <= n; ++i) {
    if (!(a[i] > 1.0) || !(a[i] > a[i - 1])) throw std::invalid_argument("PerturbationSpec: thresholds must increase above 1");
    if (m[i] < 1 || (i > 1 && m[i] <= m[i - 1])) throw std::invalid_argument("PerturbationSpec: exponents must increase");
  }
}

SparsePoly2 build_rn_stage(const PerturbationSpec& spec, int k) {
  if (k < 0 || k > spec.n || spec.a.size() <= static_cast<std::size_t>(k) || spec.m.size() <= static_cast<std::size_t>(k))
    throw std::invalid_argument("build_rn_stage: stage out of range");
  std::vector<Monomial2> terms;
  for (int i = 0; i <= k; ++i) {
    const int sign = (i % 2 == 0) ? 1 : -1;
    Scalar c = (spec.m[i] == 0 || spec.a[i] == 1.0)
                   ? Scalar(sign)
                   : Scalar::from_log(LogValue::from_log(sign, -2.0 * static_cast<double>(spec.m[i]) * std::log(spec.a[i])));
    terms.push_back({c, 2 * (spec.n - i) + 1, static_cast<int>(2 * spec.m[i])});
  }
  return SparsePoly2(std::move(terms));
}

SparsePoly2 build_rn(const PerturbationSpec& spec) {
  spec.validate();
  return build_rn_stage(spec, spec.n);
}

PlanarField build_perturbed(int r, const PerturbationSpec& spec, double eps) {
  PlanarField f = build_xr(r);
  if (eps != 0.0) f.P = f.P + Scalar::real(eps) * build_rn(spec);
  return f;
}

PlanarField example_m4(double a) {
  Scalar ca = Scalar::exact(rational_from_double(a));
  return {SparsePoly2({{ca, 2, 4}, {-ca, 0, 0}}), SparsePoly2({{1, 2, 2}, {-1, 0, 0}})};
}

PlanarField example_m5(double a, double b) {
  Scalar ca = Scalar::exact(rational_from_double(a));
  Scalar cb = Scalar::exact(rational_from_double(b));
  return {SparsePoly2({{ca, 0, 6}, {cb, 2, 4}, {-(ca + cb), 0, 0}}), SparsePoly2({{1, 2, 2}, {-1, 0, 0}})};
}

long long cycles_prop2(int n, int r) {
  if (n < 1 || r < 0) throw std::invalid_argument("cycles_prop2: need n >= 1, r >= 0");
  const long long nn = n, rr = r;
  return 2 * nn * (rr + 1) + nn * (r % 2 == 0 ? 2 : 0);
}

QuadraticBound bound_thm1(int m) {
  if (m < 9) throw std::invalid_argument("bound_thm1: need m >= 9");
  const double md = m;
  const double simplified = 0.5 * md * md - 3.0 * md - 8.0;
  return {simplified, simplified + (m % 2 == 0 ? 0.0 : 4.5)};
}

int optimal_r(int m) {
  if (m < 9) throw std::invalid_argument("optimal_r: need m >= 9");
  return m % 2 == 0 ? m / 2 : (m - 1) / 2;
}

}  // namespace mcyc
