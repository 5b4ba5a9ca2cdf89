#include "mcyc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "mcyc/summation.hpp"

namespace mcyc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sigma G(c + e^s T w) / e^(2s) as a dense polynomial in w = (w1, w2).
// T = sqrt(2) L^-T with L L^T = sigma * Hessian, so the quadratic part is |w|^2.
struct LocalModel {
  int deg = 0;
  std::vector<double> coef;  // coef[i * (deg + 1) + j] multiplies w1^i w2^j
  double t11 = 0, t12 = 0, t22 = 0;
  double s = 0;              // log scale
  double sep_ratio = 0;      // E_sep / E

  double c(int i, int j) const { return coef[i * (deg + 1) + j]; }

  Point2 to_local(double w1, double w2) const { return {t11 * w1 + t12 * w2, t22 * w2}; }

  // Coefficients of p(tau) = sum_d cd[d] tau^d along direction theta, and their theta-derivatives.
  void ray(double theta, std::vector<double>& cd, std::vector<double>& dcd) const {
    const double ct = std::cos(theta), st = std::sin(theta);
    cd.assign(deg + 1, 0.0);
    dcd.assign(deg + 1, 0.0);
    std::vector<double> cp(deg + 2, 1.0), sp(deg + 2, 1.0);
    for (int k = 1; k <= deg + 1; ++k) cp[k] = cp[k - 1] * ct, sp[k] = sp[k - 1] * st;
    for (int i = 0; i <= deg; ++i) {
      for (int j = 0; i + j <= deg; ++j) {
        double a = c(i, j);
        if (a == 0.0) continue;
        cd[i + j] += a * cp[i] * sp[j];
        double d = 0.0;
        if (i > 0) d -= i * cp[i - 1] * sp[j + 1];
        if (j > 0) d += j * cp[i + 1] * sp[j - 1];
        dcd[i + j] += a * d;
      }
    }
  }
};

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

double horner_deriv(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

std::vector<double> binomial_row(int n) {
  std::vector<double> row(n + 1, 1.0);
  for (int k = 1; k < n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
  return row;
}

LocalModel build_model(const PeriodAnnulus& a, const LogValue& energy) {
  if (energy.sign <= 0) throw LevelOutOfRange("energy must be positive");
  LocalModel m;
  m.s = 0.5 * energy.logmag;
  const double sep_log = std::log(a.sep_energy());
  m.sep_ratio = std::exp(sep_log - energy.logmag);

  const double sg = a.orientation_sign;
  const double m11 = sg * a.hxx, m12 = sg * a.hxy, m22 = sg * a.hyy;
  const double l11 = std::sqrt(m11), l21 = m12 / l11, l22 = std::sqrt(m22 - l21 * l21);
  const double r2 = std::sqrt(2.0);
  m.t11 = r2 / l11;
  m.t12 = -r2 * l21 / (l11 * l22);
  m.t22 = r2 / l22;

  m.deg = std::max(a.G.degree(), 2);
  const int D = m.deg;
  m.coef.assign((D + 1) * (D + 1), 0.0);
  std::vector<std::vector<double>> binom(D + 1);
  for (int n = 0; n <= D; ++n) binom[n] = binomial_row(n);

  for (const auto& t : a.G.terms()) {
    const int d = t.ex + t.ey;
    LogValue c = t.coeff.to_log();
    double scaled = LogValue::from_log(c.sign, c.logmag + m.s * (d - 2)).to_double();
    if (!std::isfinite(scaled)) throw OverflowError("local expansion coefficient overflows");
    if (scaled == 0.0) continue;
    scaled *= sg;
    // (t11 w1 + t12 w2)^ex (t22 w2)^ey
    const double fy = std::pow(m.t22, t.ey);
    for (int k = 0; k <= t.ex; ++k) {
      double v = scaled * fy * binom[t.ex][k] * std::pow(m.t11, k) * std::pow(m.t12, t.ex - k);
      if (v == 0.0) continue;
      m.coef[k * (D + 1) + (t.ex - k + t.ey)] += v;
    }
  }
  return m;
}

// Golden-section maximum of a univariate polynomial on [a, b]; returns (argmax, max).
std::pair<double, double> poly_max(const std::vector<double>& cd, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = horner(cd, c), fd = horner(cd, d);
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    if (fc > fd)
      b = d, d = c, fd = fc, c = b - g * (b - a), fc = horner(cd, c);
    else
      a = c, c = d, fc = fd, d = a + g * (b - a), fd = horner(cd, d);
  }
  return fc > fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

struct RaySolution {
  double tau;
  double dtau;  // d tau / d theta
};

RaySolution solve_ray(const LocalModel& m, double theta, bool star_check) {
  std::vector<double> cd, dcd;
  m.ray(theta, cd, dcd);
  cd[0] -= 1.0;
  const double c2 = cd.size() > 2 ? cd[2] : 0.0;
  const double tau0 = c2 > 0 ? 1.0 / std::sqrt(c2) : 1.0;

  double lo = 0.0, hi = 0.0;
  double step = tau0 / 16.0;
  double t = 0.0, f = -1.0;
  double t_prev = 0.0, f_prev = -1.0;
  bool bracketed = false;
  for (int k = 0; k < 4000; ++k) {
    double tn = t + step;
    double fn = horner(cd, tn);
    if (fn >= 0.0) {
      lo = t, hi = tn, bracketed = true;
      break;
    }
    // A near-tangential crossing can hide between samples around a local maximum.
    if (k > 0 && f > fn && f >= f_prev) {
      auto [tm, fm] = poly_max(cd, t_prev, tn);
      if (fm >= 0.0) {
        lo = t_prev, hi = tm, bracketed = true;
        break;
      }
    }
    t_prev = t, f_prev = f;
    t = tn, f = fn;
    if (t > 4.0 * tau0) step = t / 16.0;
    if (t > 1e6 * tau0) break;
  }
  if (!bracketed) throw LevelOutOfRange("level curve is unbounded along a ray");

  double x = hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double f = horner(cd, x);
    if (f == 0.0) {
      lo = hi = x;
      break;
    }
    (f < 0 ? lo : hi) = x;
    double df = horner_deriv(cd, x);
    double xn = df > 0 ? x - f / df : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 2e-16 * x) {
      x = xn;
      break;
    }
    x = xn;
  }
  const double root = x;

  if (star_check) {
    // Past the root the energy must stay above the level until it reaches the separatrix.
    const double h = root / 16.0;
    const double sep = m.sep_ratio - 1.0;
    double tp = root, fp = 0.0, tpp = root, fpp = 0.0;
    for (double tt = root + h; tt <= 8.0 * root; tt += h) {
      double ft = horner(cd, tt);
      if (ft >= sep) break;
      if (fp > ft && fp >= fpp && poly_max(cd, tpp, tt).second >= sep * (1.0 - 1e-3) - 1e-12) break;
      if (ft < 0.0) throw NotStarShaped("level curve crosses a ray from the center more than once");
      tpp = tp, fpp = fp, tp = tt, fp = ft;
    }
  }

  double dp_dtau = horner_deriv(cd, root);
  double dp_dtheta = horner(dcd, root);
  return {root, -dp_dtheta / dp_dtau};
}

Point2 local_point(const LocalModel& m, double theta, const RaySolution& r) {
  return m.to_local(r.tau * std::cos(theta), r.tau * std::sin(theta));
}

Point2 local_tangent(const LocalModel& m, double theta, const RaySolution& r) {
  const double ct = std::cos(theta), st = std::sin(theta);
  return m.to_local(r.dtau * ct - r.tau * st, r.dtau * st + r.tau * ct);
}

// Maximum of f(theta) near theta0 by golden-section search on [theta0 - h, theta0 + h].
template <class F>
double golden_max(F&& f, double theta0, double h) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = theta0 - h, b = theta0 + h;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  return std::max({fc, fd, f(0.5 * (a + b))});
}

struct Extremes {
  double xmax, xmin, ymax, ymin;  // of local coordinates
};

// Extremes of the local coordinates, refined between grid angles.
Extremes refine_extremes(const LocalModel& m, const std::vector<Point2>& local) {
  const std::size_t n = local.size();
  const double dth = kTwoPi / static_cast<double>(n);
  auto arg = [&](auto key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (key(local[i]) > key(local[best])) best = i;
    return best;
  };
  auto refine = [&](auto key, std::size_t idx) {
    auto f = [&](double th) { return key(local_point(m, th, solve_ray(m, th, false))); };
    return std::max(key(local[idx]), golden_max(f, dth * static_cast<double>(idx), dth));
  };
  auto kx = [](const Point2& p) { return p.x; };
  auto kmx = [](const Point2& p) { return -p.x; };
  auto ky = [](const Point2& p) { return p.y; };
  auto kmy = [](const Point2& p) { return -p.y; };
  return {refine(kx, arg(kx)), -refine(kmx, arg(kmx)), refine(ky, arg(ky)), -refine(kmy, arg(kmy))};
}

void set_statistics(Oval& o, const Extremes& e) {
  const double s = o.log_scale, es = std::exp(s);
  const double cx = o.center.x, cy = o.center.y;
  const double y_hi = cy + es * e.ymax, y_lo = cy + es * e.ymin;
  const double ly_hi = log_abs_offset(cy, s, e.ymax), ly_lo = log_abs_offset(cy, s, e.ymin);
  if (y_lo < 0.0 && y_hi > 0.0) {
    o.alpha = std::max(-y_lo, y_hi);
    o.log_alpha = std::max(ly_lo, ly_hi);
    o.b_min = 0.0;
    o.log_b_min = -INFINITY;
  } else {
    o.alpha = std::max(std::fabs(y_lo), std::fabs(y_hi));
    o.b_min = std::min(std::fabs(y_lo), std::fabs(y_hi));
    o.log_alpha = std::max(ly_lo, ly_hi);
    o.log_b_min = std::min(ly_lo, ly_hi);
  }
  const double lx_hi = log_abs_offset(cx, s, e.xmax), lx_lo = log_abs_offset(cx, s, e.xmin);
  o.max_abs_x = LogValue::from_log(1, std::max(lx_hi, lx_lo));
  const bool straddles_x = cx + es * e.xmin <= 0.0 && cx + es * e.xmax >= 0.0;
  o.min_abs_x = straddles_x ? LogValue::zero() : LogValue::from_log(1, std::min(lx_hi, lx_lo));
}

void set_points(Oval& o) {
  const double es = std::exp(o.log_scale);
  o.points.resize(o.local.size());
  for (std::size_t i = 0; i < o.local.size(); ++i)
    o.points[i] = {o.center.x + es * o.local[i].x, o.center.y + es * o.local[i].y};
}

double spectral_area(const std::vector<Point2>& p, const std::vector<Point2>& t, std::size_t stride) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < p.size(); i += stride) sum.add(p[i].x * t[i].y - p[i].y * t[i].x);
  return 0.5 * sum.value() * kTwoPi * static_cast<double>(stride) / static_cast<double>(p.size());
}

bool exact_critical_point(const SparsePoly2& H, const Rational& x, const Rational& y) {
  Scalar sx = Scalar::exact(x), sy = Scalar::exact(y);
  return evaluate_exact(differentiate(H, Var::x), sx, sy).is_zero() &&
         evaluate_exact(differentiate(H, Var::y), sx, sy).is_zero();
}

Oval trace_with_model(std::shared_ptr<const PeriodAnnulus> a, const LogValue& energy, const TraceOptions& opts) {
  const LocalModel m = build_model(*a, energy);
  Oval o;
  o.center = a->center;
  o.energy = energy;
  o.log_scale = m.s;
  o.h = a->h_center + a->orientation_sign * energy.to_double();

  std::size_t n = std::max<std::size_t>(opts.n_vertices, 8);
  bool star = opts.star_check;
  while (true) {
    o.local.resize(n);
    o.tangent.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double th = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      RaySolution r = solve_ray(m, th, star);
      o.local[i] = local_point(m, th, r);
      o.tangent[i] = local_tangent(m, th, r);
    }
    star = false;
    if (!opts.adaptive || n >= opts.max_vertices) break;
    const double full = spectral_area(o.local, o.tangent, 1);
    const double half = spectral_area(o.local, o.tangent, 2);
    if (std::fabs(full - half) <= opts.area_rel_tol * std::fabs(full)) break;
    n *= 2;
  }
  const double la = spectral_area(o.local, o.tangent, 1);
  o.log_area = LogValue::from_log(la > 0 ? 1 : -1, std::log(std::fabs(la)) + 2.0 * m.s);
  o.area = o.log_area.to_double();
  o.annulus = std::move(a);
  set_points(o);
  set_statistics(o, refine_extremes(m, o.local));
  return o;
}

}  // namespace

double log_abs_offset(double c, double s, double v) {
  if (c == 0.0) return v == 0.0 ? -INFINITY : s + std::log(std::fabs(v));
  double t = std::exp(s) * v / c;
  if (t > -0.5) return std::log(std::fabs(c)) + std::log1p(t);
  return std::log(std::fabs(c + std::exp(s) * v));
}

double Oval::scale() const { return std::exp(log_scale); }

PeriodAnnulus find_annulus(const SparsePoly2& H, Point2 center, const std::vector<Point2>& saddles) {
  PeriodAnnulus a;
  a.H = H;
  a.cx = rational_from_double(center.x);
  a.cy = rational_from_double(center.y);
  if (H.is_exact()) {
    for (int k = 0; k <= 40; ++k) {
      const double sc = std::ldexp(1.0, k);
      Rational x = rational_from_double(std::nearbyint(center.x * sc) / sc);
      Rational y = rational_from_double(std::nearbyint(center.y * sc) / sc);
      if (std::hypot(static_cast<double>(x) - center.x, static_cast<double>(y) - center.y) > 1e-9) continue;
      if (exact_critical_point(H, x, y)) {
        a.cx = x, a.cy = y;
        break;
      }
    }
  }
  a.center = {static_cast<double>(a.cx), static_cast<double>(a.cy)};
  const Scalar hc = evaluate_exact(H, Scalar::exact(a.cx), Scalar::exact(a.cy));
  a.h_center = hc.to_double();

  std::vector<Monomial2> g;
  const SparsePoly2 shifted = H.shifted(Scalar::exact(a.cx), Scalar::exact(a.cy));
  for (const auto& t : shifted.terms())
    if (t.ex + t.ey > 0) g.push_back(t);
  a.G = SparsePoly2(std::move(g));
  a.hxx = 2.0 * a.G.coeff(2, 0).to_double();
  a.hxy = a.G.coeff(1, 1).to_double();
  a.hyy = 2.0 * a.G.coeff(0, 2).to_double();
  const double det = a.hxx * a.hyy - a.hxy * a.hxy;
  if (!(det > 0.0)) throw Degenerate("find_annulus: point is not a nondegenerate extremum of H");
  a.orientation_sign = a.hxx > 0 ? 1 : -1;

  std::vector<double> levels;
  for (const auto& s : saddles) {
    double hs = H(s.x, s.y);
    if (a.orientation_sign * (hs - a.h_center) > 0) levels.push_back(hs);
  }
  std::sort(levels.begin(), levels.end(),
            [&](double u, double v) { return a.orientation_sign * u < a.orientation_sign * v; });
  for (double hs : levels) {
    a.h_sep = hs;
    auto probe = std::make_shared<PeriodAnnulus>(a);
    TraceOptions coarse;
    coarse.n_vertices = 64;
    coarse.adaptive = false;
    try {
      trace_with_model(probe, LogValue::from_double(a.max_energy()), coarse);
      return a;
    } catch (const LevelOutOfRange&) {
    } catch (const NotStarShaped&) {
    }
  }
  throw NoBoundingSaddle("find_annulus: no saddle level bounds a period annulus around the center");
}

Point2 ray_point_local(const PeriodAnnulus& a, const LogValue& energy, double theta, double* tau) {
  LocalModel m = build_model(a, energy);
  RaySolution r = solve_ray(m, theta, false);
  if (tau) *tau = r.tau;
  return local_point(m, theta, r);
}

Oval trace_oval_energy(std::shared_ptr<const PeriodAnnulus> a, const LogValue& energy, const TraceOptions& opts) {
  if (energy.sign <= 0) throw LevelOutOfRange("trace_oval: level on the wrong side of the center");
  const double emax = a->max_energy();
  if (energy.logmag > std::log(a->sep_energy())) throw LevelOutOfRange("trace_oval: level beyond the separatrix");
  LogValue e = energy.logmag > std::log(emax) ? LogValue::from_double(emax) : energy;
  return trace_with_model(std::move(a), e, opts);
}

Oval trace_oval(std::shared_ptr<const PeriodAnnulus> a, double h, const TraceOptions& opts) {
  const double e = a->orientation_sign * (h - a->h_center);
  if (!(e > 0.0)) throw LevelOutOfRange("trace_oval: level on the wrong side of the center");
  return trace_oval_energy(std::move(a), LogValue::from_double(e), opts);
}

double amplitude_at(const PeriodAnnulus& a, double energy) {
  LocalModel m = build_model(a, LogValue::from_double(energy));
  const std::size_t n = 64;
  std::vector<Point2> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = kTwoPi * static_cast<double>(i) / n;
    local[i] = local_point(m, th, solve_ray(m, th, false));
  }
  Extremes e = refine_extremes(m, local);
  const double es = std::exp(m.s);
  return std::max(std::fabs(a.center.y + es * e.ymax), std::fabs(a.center.y + es * e.ymin));
}

Oval oval_by_amplitude(std::shared_ptr<const PeriodAnnulus> a, double target, const TraceOptions& opts) {
  const double lo_amp = std::fabs(a->center.y);
  const double emax = a->max_energy();
  const double hi_amp = amplitude_at(*a, emax);
  if (!(target > lo_amp && target < hi_amp))
    throw AmplitudeUnreachable(lo_amp, hi_amp, "oval_by_amplitude: target outside the achievable amplitude range");

  // Bisection on u = sqrt(E); amplitude is smooth in u near the center.
  double u_lo = 0.0, u_hi = std::sqrt(emax);
  double a_lo = lo_amp, a_hi = hi_amp;
  double u = 0.5 * (u_lo + u_hi);
  for (int it = 0; it < 200; ++it) {
    u = 0.5 * (u_lo + u_hi);
    double amp = amplitude_at(*a, u * u);
    if (!(amp >= a_lo && amp <= a_hi)) throw ConvergenceFailure("oval_by_amplitude: amplitude is not monotone in h");
    if (std::fabs(amp - target) <= 1e-13 * target) break;
    if (amp < target)
      u_lo = u, a_lo = amp;
    else
      u_hi = u, a_hi = amp;
    if (u_hi - u_lo <= 1e-17 * u_hi) break;
  }
  Oval o = trace_oval_energy(std::move(a), LogValue::from_double(u * u), opts);
  if (std::fabs(o.alpha - target) > 1e-9) throw ConvergenceFailure("oval_by_amplitude: traced amplitude misses the target");
  return o;
}

Oval shrink_to_xwidth(std::shared_ptr<const PeriodAnnulus> a, const LogValue& xbound, const TraceOptions& opts) {
  if (a->cx != 0) throw std::invalid_argument("shrink_to_xwidth: center must lie on x = 0");
  if (xbound.sign <= 0 || !std::isfinite(xbound.logmag)) throw Degenerate("shrink_to_xwidth: nonpositive width bound");
  LocalModel m = build_model(*a, LogValue::from_double(a->max_energy()));
  // On |w| = 1 the local x-extent is sqrt(t11^2 + t12^2).
  const double lw = std::log(std::hypot(m.t11, m.t12));
  double le = 2.0 * (xbound.logmag - std::log(2.0) - lw);
  le = std::min(le, std::log(0.25 * a->max_energy()));
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (!std::isfinite(le)) break;
    Oval o = trace_with_model(a, LogValue::from_log(1, le), opts);
    if (o.max_abs_x.logmag <= xbound.logmag) return o;
    le -= std::log(4.0);
  }
  throw Degenerate("shrink_to_xwidth: could not meet the width bound");
}

double signed_area(const std::vector<Point2>& poly) {
  CompensatedSum sum;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    sum.add(p.x * q.y - q.x * p.y);
  }
  return 0.5 * sum.value();
}

bool point_in_polygon(const std::vector<Point2>& poly, Point2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

Oval oval_from_polyline(std::vector<Point2> points) {
  if (points.size() < 3) throw std::invalid_argument("oval_from_polyline: need at least 3 vertices");
  Oval o;
  CompensatedSum sx, sy;
  for (const auto& p : points) sx.add(p.x), sy.add(p.y);
  o.center = {sx.value() / points.size(), sy.value() / points.size()};
  o.local.reserve(points.size());
  for (const auto& p : points) o.local.push_back({p.x - o.center.x, p.y - o.center.y});
  o.points = std::move(points);
  o.area = signed_area(o.local);
  o.log_area = LogValue::from_double(o.area);
  Extremes e{-INFINITY, INFINITY, -INFINITY, INFINITY};
  for (const auto& p : o.local) {
    e.xmax = std::max(e.xmax, p.x), e.xmin = std::min(e.xmin, p.x);
    e.ymax = std::max(e.ymax, p.y), e.ymin = std::min(e.ymin, p.y);
  }
  set_statistics(o, e);
  return o;
}

Oval reversed(const Oval& oval) {
  Oval r = oval;
  const std::size_t n = oval.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = (n - k) % n;
    r.local[k] = oval.local[src];
    r.points[k] = oval.points[src];
    if (oval.has_tangents()) r.tangent[k] = {-oval.tangent[src].x, -oval.tangent[src].y};
  }
  r.area = -oval.area;
  r.log_area = -oval.log_area;
  return r;
}

void write_oval_csv(std::ostream& out, const Oval& oval) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# h=%.17g center=(%.17g,%.17g) alpha=%.17g log_scale=%.17g\n", oval.h, oval.center.x,
                oval.center.y, oval.alpha, oval.log_scale);
  out << buf << "x,y\n";
  for (const auto& p : oval.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
    out << buf;
  }
}

}  // namespace mcyc
