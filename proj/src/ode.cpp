#include "mcyc/ode.hpp"

#include <cmath>

namespace mcyc {

PlanarRhs field_rhs(const PlanarField& X) {
  return [P = X.P, Q = X.Q](const Point2& p) { return Point2{P(p.x, p.y), Q(p.x, p.y)}; };
}

namespace {

struct TermL {
  long double c;
  int ex;
  int ey;
};

std::vector<TermL> extended_terms(const SparsePoly2& p) {
  std::vector<TermL> out;
  for (const auto& t : p.terms()) {
    const long double c = t.coeff.is_exact() ? t.coeff.rational().convert_to<long double>()
                                             : static_cast<long double>(t.coeff.to_double());
    if (!std::isfinite(c)) throw OverflowError("field_rhs_extended: coefficient outside long double range");
    out.push_back({c, t.ex, t.ey});
  }
  return out;
}

long double eval_terms(const std::vector<TermL>& ts, long double x, long double y) {
  long double s = 0.0L;
  for (const auto& t : ts) {
    long double v = t.c;
    for (int i = 0; i < t.ex; ++i) v *= x;
    for (int i = 0; i < t.ey; ++i) v *= y;
    s += v;
  }
  return s;
}

}  // namespace

PlanarRhsL field_rhs_extended(const PlanarField& X) {
  return [P = extended_terms(X.P), Q = extended_terms(X.Q)](const Point2L& p) {
    return Point2L{eval_terms(P, p.x, p.y), eval_terms(Q, p.x, p.y)};
  };
}

Trajectory integrate(const PlanarRhs& f, Point2 p0, double t_end, const OdeControls& c) {
  Dopri5 s(f, p0, 0.0, c);
  Trajectory tr;
  tr.rtol = c.rtol;
  tr.atol = c.atol;
  tr.t.push_back(0.0);
  tr.states.push_back(p0);
  while (s.t() < t_end) {
    if (s.accepted() >= c.max_steps) throw StepUnderflow("integrate: step budget exhausted");
    s.step(t_end);
    if (c.record || s.t() >= t_end) {
      tr.t.push_back(s.t());
      tr.states.push_back(s.state());
    }
  }
  tr.accepted = s.accepted();
  tr.rejected = s.rejected();
  tr.max_error_ratio = s.max_error_ratio();
  return tr;
}

Trajectory integrate(const PlanarField& X, Point2 p0, double t_end, const OdeControls& c) {
  return integrate(field_rhs(X), p0, t_end, c);
}

Crossing integrate_to_event(const PlanarRhs& f, Point2 p0, const std::function<double(const Point2&)>& g,
                            const std::function<double(const Point2&)>& g_rate, int direction,
                            const std::function<bool(const Point2&)>& accept, const OdeControls& c, double tol,
                            Trajectory* path) {
  std::function<void(double, const Point2&)> on_step;
  if (path) {
    *path = Trajectory{};
    path->rtol = c.rtol;
    path->atol = c.atol;
    path->t.push_back(0.0);
    path->states.push_back(p0);
    if (c.record)
      on_step = [path](double t, const Point2& p) {
        path->t.push_back(t);
        path->states.push_back(p);
      };
  }
  const Crossing cr = locate_event<Point2>(f, p0, g, g_rate, direction, accept, c, tol, on_step);
  if (path) {
    while (path->t.size() > 1 && path->t.back() > cr.t) {
      path->t.pop_back();
      path->states.pop_back();
    }
    path->t.push_back(cr.t);
    path->states.push_back(cr.p);
  }
  return cr;
}

}  // namespace mcyc
