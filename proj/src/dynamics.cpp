#include "mcyc/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>

namespace mcyc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
double solve_bracket(F&& f, double lo, double hi, double tol_abs) {
  std::uintmax_t iters = 200;
  auto tol = [tol_abs](double a, double b) { return std::fabs(b - a) <= tol_abs; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

int definite_sign(const DisplacementSample& s, const OdeControls& c) {
  if (!s.ok || std::fabs(s.d) <= displacement_floor(s.energy, c)) return 0;
  return s.d > 0 ? 1 : -1;
}

PlanarField perturbed(int r, const SparsePoly2& Rhat, double eps) {
  PlanarField f = build_xr(r);
  if (eps != 0.0) f.P = f.P + Scalar::real(eps) * Rhat;
  return f;
}

// Energies of `levels` plus `between` geometric intermediates in each gap.
std::vector<double> refine_levels(std::vector<double> levels, int between) {
  std::sort(levels.begin(), levels.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.push_back(levels[i]);
    if (i + 1 == levels.size()) break;
    const double l0 = std::log(levels[i]), l1 = std::log(levels[i + 1]);
    for (int k = 1; k <= between; ++k) out.push_back(std::exp(l0 + (l1 - l0) * k / (between + 1)));
  }
  return out;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy);
}

// Segments of b are bucketed on a grid of cell size >= the longest segment, so
// the nearest segment to p lies in p's 3x3 block whenever that block is nonempty
// and its best distance is at most one cell.
double directed_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t n = b.size();
  double cell = 0.0, x0 = INFINITY, y0 = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 &u = b[i], &v = b[(i + 1) % n];
    cell = std::max(cell, std::hypot(v.x - u.x, v.y - u.y));
    x0 = std::min(x0, u.x);
    y0 = std::min(y0, u.y);
  }
  cell = std::max(cell, 1e-12);
  auto key = [&](double x, double y) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor((x - x0) / cell)),
                                           static_cast<long long>(std::floor((y - y0) / cell))};
  };
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 &u = b[i], &v = b[(i + 1) % n];
    const auto ku = key(u.x, u.y), kv = key(v.x, v.y);
    for (long long gx = std::min(ku.first, kv.first); gx <= std::max(ku.first, kv.first); ++gx)
      for (long long gy = std::min(ku.second, kv.second); gy <= std::max(ku.second, kv.second); ++gy)
        grid[{gx, gy}].push_back(i);
  }
  double worst = 0.0;
  for (const auto& p : a) {
    double best = INFINITY;
    const auto k = key(p.x, p.y);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({k.first + dx, k.second + dy});
        if (it == grid.end()) continue;
        for (std::size_t i : it->second) best = std::min(best, point_segment_distance(p, b[i], b[(i + 1) % n]));
      }
    if (best > cell)
      for (std::size_t i = 0; i < n; ++i) best = std::min(best, point_segment_distance(p, b[i], b[(i + 1) % n]));
    worst = std::max(worst, best);
  }
  return worst;
}

double focus_displacement_side(const PlanarField& X, Point2 p, double rho, int side, const OdeControls& c,
                               std::vector<Point2>* orbit) {
  const PlanarRhs f = field_rhs(X);
  const Point2 start{p.x + side * rho, p.y};
  const double rate0 = f(start).y;
  if (rate0 == 0.0) throw FitUnstable("focus_displacement: flow tangent to the ray");
  OdeControls cc = c;
  cc.record = orbit != nullptr;
  Trajectory path;
  Crossing cr = integrate_to_event(
      f, start, [&](const Point2& q) { return q.y - p.y; }, [&](const Point2& q) { return f(q).y; },
      rate0 > 0 ? 1 : -1, [&](const Point2& q) { return side * (q.x - p.x) > 0.0; }, cc, 1e-15,
      orbit ? &path : nullptr);
  if (orbit) *orbit = path.states;
  return side * (cr.p.x - start.x);
}

// Same return map in long double; d is formed from extended coordinates.
double focus_displacement_extended(const PlanarField& X, Point2 p, double rho, const OdeControls& c) {
  const PlanarRhsL f = field_rhs_extended(X);
  const long double px = p.x, py = p.y;
  const Point2L start{px + static_cast<long double>(rho), py};
  const long double rate0 = f(start).y;
  if (rate0 == 0.0L) throw FitUnstable("focus_displacement: flow tangent to the ray");
  const BasicCrossing<Point2L> cr = locate_event<Point2L>(
      f, start, [&](const Point2L& q) { return q.y - py; }, [&](const Point2L& q) { return f(q).y; },
      rate0 > 0 ? 1 : -1, [&](const Point2L& q) { return q.x > px; }, c, 1e-18L);
  return static_cast<double>(cr.p.x - start.x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Transversal and displacement

Transversal::Transversal(std::shared_ptr<const PeriodAnnulus> a) : a_(std::move(a)) {}

double Transversal::energy_of(const Point2& p) const {
  return energy_at_offset({p.x - a_->center.x, p.y - a_->center.y});
}

double Transversal::energy_at_offset(const Point2& local) const {
  return a_->orientation_sign * a_->G(local.x, local.y);
}

double Transversal::offset_at(double energy) const {
  if (!(energy > 0.0) || !(energy < a_->sep_energy()))
    throw LevelOutOfRange("Transversal: energy outside the annulus");
  auto f = [&](double s) { return a_->orientation_sign * a_->G(0.0, s) - energy; };
  double hi = std::sqrt(2.0 * energy / std::fabs(a_->hyy));
  int guard = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw LevelOutOfRange("Transversal: level not reached on the ray");
  }
  return solve_bracket(f, 0.0, hi, 4.0 * std::numeric_limits<double>::epsilon() * hi);
}

Point2 Transversal::point_at(double energy) const { return {a_->center.x, a_->center.y + offset_at(energy)}; }

PlanarRhs centered_rhs(const PlanarField& X, const PeriodAnnulus& a) {
  constexpr int kShiftDegree = 16;
  auto split = [&](const SparsePoly2& p, SparsePoly2& near, SparsePoly2& far) {
    std::vector<Monomial2> shift, keep;
    for (const auto& t : p.terms())
      (t.coeff.is_exact() && t.ex + t.ey <= kShiftDegree ? shift : keep).push_back(t);
    near = SparsePoly2(shift).shifted(Scalar::exact(a.cx), Scalar::exact(a.cy));
    far = SparsePoly2(keep);
  };
  SparsePoly2 Pn, Pf, Qn, Qf;
  split(X.P, Pn, Pf);
  split(X.Q, Qn, Qf);
  const double cx = a.center.x, cy = a.center.y;
  return [=](const Point2& q) {
    const double x = cx + q.x, y = cy + q.y;
    return Point2{Pn(q.x, q.y) + (Pf.is_zero() ? 0.0 : Pf(x, y)), Qn(q.x, q.y) + (Qf.is_zero() ? 0.0 : Qf(x, y))};
  };
}

// Unperturbed returns stay below 3 rtol E on every tested annulus.
double displacement_floor(double energy, const OdeControls& c) { return 20.0 * c.rtol * energy; }

DisplacementSample displacement(const PlanarRhs& f, const Transversal& sigma, double energy, const OdeControls& c) {
  DisplacementSample s;
  s.energy = energy;
  const PeriodAnnulus& a = sigma.annulus();
  s.h = a.h_center + a.orientation_sign * energy;
  try {
    const double s0 = sigma.offset_at(energy);
    const Point2 p0{0.0, s0};
    const double rate0 = f(p0).x;
    if (rate0 == 0.0) throw NoReturn("displacement: flow tangent to the transversal");
    // Absolute tolerance follows the orbit size so small ovals keep full relative accuracy.
    OdeControls lc = c;
    lc.atol = std::min(c.atol, c.atol * s0);
    Crossing cr = integrate_to_event(
        f, p0, [](const Point2& q) { return q.x; }, [&f](const Point2& q) { return f(q).x; }, rate0 > 0 ? 1 : -1,
        [](const Point2& q) { return q.y > 0.0; }, lc, 1e-12 * std::min(1.0, s0));
    s.d = a.orientation_sign * (sigma.energy_at_offset(cr.p) - sigma.energy_at_offset(p0));
    s.period = cr.t;
    s.ok = true;
  } catch (const Error& e) {
    s.error = e.what();
    s.d = kNaN;
  }
  return s;
}

DisplacementProfile displacement_profile_energy(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                                                const std::vector<double>& energies, double eps,
                                                const OdeControls& c) {
  DisplacementProfile prof;
  prof.center = a->center;
  prof.eps = eps;
  const PlanarRhs f = centered_rhs(X_eps, *a);
  const Transversal sigma(a);
  for (double e : energies) prof.samples.push_back(displacement(f, sigma, e, c));
  return prof;
}

DisplacementProfile displacement_profile(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                                         const std::vector<double>& h_samples, double eps, const OdeControls& c) {
  std::vector<double> energies;
  for (double h : h_samples) energies.push_back(a->orientation_sign * (h - a->h_center));
  return displacement_profile_energy(X_eps, std::move(a), energies, eps, c);
}

CycleCount count_cycles(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                        const std::vector<double>& energies, double eps, const OdeControls& c) {
  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  CycleCount out;
  out.profile = displacement_profile_energy(X_eps, a, sorted, eps, c);
  const PlanarRhs f = centered_rhs(X_eps, *a);
  const Transversal sigma(a);
  const DisplacementSample* prev = nullptr;
  int prev_sign = 0;
  for (const auto& s : out.profile.samples) {
    const int sg = definite_sign(s, c);
    if (sg == 0) continue;
    if (prev && sg != prev_sign) {
      auto d = [&](double e) {
        DisplacementSample q = displacement(f, sigma, e, c);
        if (!q.ok) throw NoReturn("count_cycles: " + q.error);
        return q.d;
      };
      const double lo = prev->energy, hi = s.energy;
      const double z = solve_bracket(d, lo, hi, std::min(1e-8, 1e-4 * lo));
      out.zero_energies.push_back(z);
      out.zero_h.push_back(a->h_center + a->orientation_sign * z);
    }
    prev = &s;
    prev_sign = sg;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reversibility

ReversibilityResult check_reversibility(const PlanarField& X) {
  ReversibilityResult res;
  res.exact = true;
  auto odd_part = [&](const SparsePoly2& p) {
    std::vector<Monomial2> terms;
    for (const auto& t : p.terms()) {
      if (!t.coeff.is_exact()) res.exact = false;
      if ((t.ex + t.ey) % 2 != 0) terms.push_back({Scalar(-2) * t.coeff, t.ex, t.ey});
    }
    return SparsePoly2(std::move(terms));
  };
  res.residual_p = odd_part(X.P);
  res.residual_q = odd_part(X.Q);
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const double x = 0.2 * i, y = 0.2 * j;
      const double rp = -X.P(x, y) + X.P(-x, -y);
      const double rq = -X.Q(x, y) + X.Q(-x, -y);
      res.grid_max = std::max(res.grid_max, std::hypot(rp, rq));
    }
  return res;
}

// ---------------------------------------------------------------------------
// Hopf analysis

double focus_displacement(const PlanarField& X, Point2 p, double rho, const OdeControls& c) {
  return focus_displacement_side(X, p, rho, 1, c, nullptr);
}

HopfResult hopf_analysis(const FieldFamily& family, Point2 p, double lo, double hi, const HopfOptions& opts) {
  auto trace = [&](double a) { return jacobian_at(family(a), p.x, p.y).trace(); };
  const double t_lo = trace(lo), t_hi = trace(hi);
  if (t_lo * t_hi > 0.0) throw FitUnstable("hopf_analysis: trace does not change sign on the parameter range");
  HopfResult res;
  res.param = t_lo == 0.0 ? lo : t_hi == 0.0 ? hi : solve_bracket(trace, lo, hi, 0.0);
  const PlanarField X = family(res.param);
  const Jacobian J = jacobian_at(X, p.x, p.y);
  res.trace = J.trace();
  res.det = J.det();
  if (!(res.det > 0.0)) throw FitUnstable("hopf_analysis: det <= 0 at the trace zero, not a focus");

  res.radii = opts.radii;
  if (res.radii.empty())
    for (int i = 0; i < 16; ++i) res.radii.push_back(0.02 * std::pow(4.0, i / 15.0));
  const double rmax = *std::max_element(res.radii.begin(), res.radii.end());
  // Rows are scaled by rho^-5 so every radius carries comparable relative weight.
  constexpr int kLow = 3, kHigh = 9;
  Eigen::MatrixXd A(res.radii.size(), kHigh - kLow + 1);
  Eigen::VectorXd b(res.radii.size());
  for (std::size_t i = 0; i < res.radii.size(); ++i) {
    double d;
    try {
      d = focus_displacement_extended(X, p, res.radii[i], opts.ode);
    } catch (const Error& e) {
      throw FitUnstable(std::string("hopf_analysis: return map failed: ") + e.what());
    }
    res.displacements.push_back(d);
    const double u = res.radii[i] / rmax;
    const double w = std::pow(u, -5);
    for (int k = kLow; k <= kHigh; ++k) A(i, k - kLow) = w * std::pow(u, k);
    b(i) = w * d;
  }
  const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(b);
  res.c3 = beta(0) / std::pow(rmax, 3);
  res.c5 = beta(2) / std::pow(rmax, 5);
  res.order_two = true;
  for (std::size_t i = 0; i < res.radii.size(); ++i)
    if (std::fabs(res.c3 * std::pow(res.radii[i], 3)) > opts.order_two_ratio * std::fabs(res.displacements[i]))
      res.order_two = false;
  const double lead = res.order_two ? res.c5 : res.c3;
  res.lyapunov_sign = lead > 0 ? 1 : lead < 0 ? -1 : 0;
  return res;
}

double hausdorff_polyline(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

M4CycleResult verify_m4_cycles(double delta, const OdeControls& c) {
  M4CycleResult res;
  const PlanarField X = example_m4(-(1.0 + delta));
  const Point2 p{1.0, 1.0}, q{-1.0, -1.0};

  // Scan the ray for the first definite sign change of the return map. The
  // cycle radius grows quickly with delta, so the scan runs until orbits escape.
  auto find = [&](Point2 center, int side, double& radius) {
    double prev_rho = 0.0, prev_d = 0.0;
    for (int k = 1; k <= 300; ++k) {
      const double rho = 0.01 * k;
      double d;
      try {
        d = focus_displacement_side(X, center, rho, side, c, nullptr);
      } catch (const Error& e) {
        res.diagnostics += "return map failed at rho = " + std::to_string(rho) + ": " + e.what() + "; ";
        return false;
      }
      if (prev_rho > 0.0 && prev_d * d < 0.0) {
        radius = solve_bracket([&](double r) { return focus_displacement_side(X, center, r, side, c, nullptr); },
                               prev_rho, rho, 1e-13);
        return true;
      }
      prev_rho = rho;
      prev_d = d;
    }
    res.diagnostics += "no sign change of d on rho in (0, 3]; ";
    return false;
  };

  const bool found_p = find(p, 1, res.radius);
  if (!found_p) {
    if (delta > 0.0) throw CycleNotFound("verify_m4_cycles: " + res.diagnostics);
    return res;
  }
  const bool found_q = find(q, -1, res.mirror_radius);
  if (!found_q) throw CycleNotFound("verify_m4_cycles: mirror cycle around (-1, -1) missing: " + res.diagnostics);

  // Short steps keep polyline chords well below the Hausdorff tolerance.
  OdeControls trace = c;
  trace.h_max = std::min(c.h_max, 1e-4);
  std::vector<Point2> orbit_p, orbit_q;
  focus_displacement_side(X, p, res.radius, 1, trace, &orbit_p);
  focus_displacement_side(X, q, res.mirror_radius, -1, trace, &orbit_q);
  std::vector<Point2> mapped;
  for (const auto& z : orbit_p) mapped.push_back({-z.x, -z.y});
  res.hausdorff = hausdorff_polyline(mapped, orbit_q);
  res.cycle = orbit_p;
  res.count = 2;
  return res;
}

// ---------------------------------------------------------------------------
// Certificate verification

double perturbation_log_scale(const SparsePoly2& R, const OvalSystem& system) {
  double best = -INFINITY;
  for (const auto& ao : system.annuli)
    for (const auto& o : ao.outer)
      for (const auto& p : o.points) {
        double l = -INFINITY;
        for (const auto& t : R.terms()) l = log_add(l, evaluate_log(t, p.x, p.y).logmag);
        best = std::max(best, l);
      }
  return best;
}

SparsePoly2 scaled(const SparsePoly2& R, double log_scale) {
  std::vector<Monomial2> terms;
  for (const auto& t : R.terms()) {
    const LogValue c = t.coeff.to_log();
    terms.push_back({Scalar::from_log(LogValue::from_log(c.sign, c.logmag - log_scale)), t.ex, t.ey});
  }
  return SparsePoly2(std::move(terms));
}

VerifyReport verify_certificate(const CycleCertificate& cert, const OvalSystem& system, const VerifyOptions& opts) {
  if (cert.table.size() != system.annuli.size()) throw std::invalid_argument("verify_certificate: table/system mismatch");
  VerifyReport rep;
  rep.certified_count = cert.count;
  const SparsePoly2 R = build_rn(cert.spec);
  rep.log_scale = perturbation_log_scale(R, system);
  const SparsePoly2 Rhat = scaled(R, rep.log_scale);
  const double log_min_width = std::log(opts.min_width);

  // Oval checks in certificate order.
  std::vector<std::vector<const Oval*>> ovals(system.annuli.size());
  for (std::size_t j = 0; j < system.annuli.size(); ++j) {
    const AnnulusOvals& ao = system.annuli[j];
    for (std::size_t q = ao.inner.size(); q-- > 0;) ovals[j].push_back(&ao.inner[q]);
    for (const auto& o : ao.outer) ovals[j].push_back(&o);
    AnnulusVerification av;
    av.center = ao.annulus->center;
    const auto& entries = cert.table[j].entries;
    if (entries.size() != ovals[j].size()) throw std::invalid_argument("verify_certificate: row/oval mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Oval& o = *ovals[j][i];
      OvalCheck ck;
      ck.index = entries[i].index;
      ck.energy = o.energy.to_double();
      ck.certified_sign = entries[i].sign;
      ck.certificate_only = o.max_abs_x.logmag < log_min_width || !(ck.energy > 0.0);
      if (!ck.certificate_only) {
        const IntegralValue v = green_integral_refined(Rhat, o);
        ck.integral = v.value;
        ck.integral_err = v.err_estimate;
      }
      av.ovals.push_back(ck);
    }
    for (std::size_t i = 1; i < av.ovals.size(); ++i)
      if ((av.ovals[i].certificate_only || av.ovals[i - 1].certificate_only) &&
          av.ovals[i].certified_sign != av.ovals[i - 1].certified_sign)
        ++av.certificate_only_changes;
    rep.certificate_only_cycles += av.certificate_only_changes;
    rep.annuli.push_back(std::move(av));
  }

  auto simulated_levels = [&](const AnnulusVerification& av) {
    std::vector<double> e;
    for (const auto& ck : av.ovals)
      if (!ck.certificate_only) e.push_back(ck.energy);
    return refine_levels(e, opts.samples_between);
  };

  // eps scan: signs at the certified ovals, and definite sign changes of the profile.
  for (double eps : opts.eps_scan) {
    const PlanarField X = perturbed(cert.r, Rhat, eps);
    EpsOutcome out;
    out.eps = eps;
    out.signs_match = true;
    for (std::size_t j = 0; j < rep.annuli.size(); ++j) {
      AnnulusVerification& av = rep.annuli[j];
      const Transversal sigma(system.annuli[j].annulus);
      const PlanarRhs f = centered_rhs(X, *system.annuli[j].annulus);
      for (auto& ck : av.ovals) {
        if (ck.certificate_only) {
          ck.d.push_back(kNaN);
          continue;
        }
        const DisplacementSample s = displacement(f, sigma, ck.energy, opts.ode);
        ck.d.push_back(s.d);
        if (definite_sign(s, opts.ode) != ck.certified_sign) out.signs_match = false;
      }
      DisplacementProfile prof = displacement_profile_energy(X, system.annuli[j].annulus, simulated_levels(av), eps, opts.ode);
      int prev = 0;
      for (const auto& s : prof.samples) {
        const int sg = definite_sign(s, opts.ode);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++out.profile_sign_changes;
        prev = sg;
      }
    }
    rep.scan.push_back(out);
    if (out.signs_match && (!rep.accepted_eps || eps > *rep.accepted_eps)) rep.accepted_eps = eps;
  }

  if (rep.accepted_eps) {
    const PlanarField X = perturbed(cert.r, Rhat, *rep.accepted_eps);
    for (std::size_t j = 0; j < rep.annuli.size(); ++j) {
      AnnulusVerification& av = rep.annuli[j];
      av.cycles = count_cycles(X, system.annuli[j].annulus, simulated_levels(av), *rep.accepted_eps, opts.ode);
      rep.simulated_cycles += static_cast<long long>(av.cycles.count());
    }
  }

  // First-order law: d/eps against I kappa, kappa from the smallest law eps.
  rep.law_holds = opts.law_eps.size() >= 2;
  std::vector<PlanarField> law_fields;
  for (double eps : opts.law_eps) law_fields.push_back(perturbed(cert.r, Rhat, eps));
  for (std::size_t j = 0; j < rep.annuli.size(); ++j) {
    const Transversal sigma(system.annuli[j].annulus);
    std::vector<PlanarRhs> law_rhs;
    for (const auto& X : law_fields) law_rhs.push_back(centered_rhs(X, *system.annuli[j].annulus));
    for (auto& ck : rep.annuli[j].ovals) {
      if (ck.certificate_only || !(std::fabs(ck.integral) > 10.0 * ck.integral_err)) continue;
      for (std::size_t k = 0; k < law_fields.size(); ++k)
        ck.law_d.push_back(displacement(law_rhs[k], sigma, ck.energy, opts.ode).d);
      if (ck.law_d.size() < 2) continue;
      const double eps_ref = opts.law_eps.back();
      ck.kappa = ck.law_d.back() / (eps_ref * ck.integral);
      const double pred = ck.integral * ck.kappa;
      ck.law_error = std::fabs(ck.law_d.front() / opts.law_eps.front() - pred) / std::fabs(pred);
      ck.law_checked = true;
      bool signs = true;
      for (double d : ck.law_d) signs = signs && std::isfinite(d) && (d > 0) == (ck.integral > 0);
      if (!signs || !(ck.law_error <= opts.law_tol)) rep.law_holds = false;
      rep.worst_law_error = std::max(rep.worst_law_error, ck.law_error);
    }
  }
  return rep;
}

}  // namespace mcyc
