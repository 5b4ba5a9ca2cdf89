#pragma once

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mcyc/errors.hpp"
#include "mcyc/families.hpp"

namespace mcyc {

class StepUnderflow : public Error {
 public:
  using Error::Error;
};
class NoReturn : public Error {
 public:
  using Error::Error;
};

struct OdeControls {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_init = 1e-3;
  double h_min = 1e-14;  // relative to max(1, |t|)
  double h_max = 0.25;
  double t_max = 1e3;
  std::size_t max_steps = 5'000'000;
  bool record = false;
};

/// Planar state in extended precision, for return maps whose displacement sits
/// below double roundoff of the coordinates.
struct Point2L {
  long double x = 0.0L;
  long double y = 0.0L;
};

using PlanarRhs = std::function<Point2(const Point2&)>;
using PlanarRhsL = std::function<Point2L(const Point2L&)>;
PlanarRhs field_rhs(const PlanarField& X);
/// Evaluates X term by term in long double; coefficients are rounded once.
PlanarRhsL field_rhs_extended(const PlanarField& X);

/// Accepted states of an embedded 5(4) Dormand-Prince run. Every accepted
/// step has normalized local error estimate <= 1.
struct Trajectory {
  std::vector<double> t;
  std::vector<Point2> states;
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error_ratio = 0.0;
};

namespace detail {

// Dormand-Prince 5(4) tableau, kept in long double so both precisions share it.
constexpr long double a21 = 1.0L / 5;
constexpr long double a31 = 3.0L / 40, a32 = 9.0L / 40;
constexpr long double a41 = 44.0L / 45, a42 = -56.0L / 15, a43 = 32.0L / 9;
constexpr long double a51 = 19372.0L / 6561, a52 = -25360.0L / 2187, a53 = 64448.0L / 6561, a54 = -212.0L / 729;
constexpr long double a61 = 9017.0L / 3168, a62 = -355.0L / 33, a63 = 46732.0L / 5247, a64 = 49.0L / 176,
                      a65 = -5103.0L / 18656;
constexpr long double a71 = 35.0L / 384, a73 = 500.0L / 1113, a74 = 125.0L / 192, a75 = -2187.0L / 6784,
                      a76 = 11.0L / 84;
constexpr long double e1 = 71.0L / 57600, e3 = -71.0L / 16695, e4 = 71.0L / 1920, e5 = -17253.0L / 339200,
                      e6 = 22.0L / 525, e7 = -1.0L / 40;
constexpr long double d1 = -12715105075.0L / 11282082432, d3 = 87487479700.0L / 32700410799,
                      d4 = -10690763975.0L / 1880347072, d5 = 701980252875.0L / 199316789632,
                      d6 = -1453857185.0L / 822651844, d7 = 69997945.0L / 29380423;

template <class S>
using scalar_of = decltype(S{}.x);

template <class S>
S axpy(const S& y, scalar_of<S> h, std::initializer_list<std::pair<long double, const S*>> ks) {
  using T = scalar_of<S>;
  S r = y;
  for (const auto& [c, k] : ks) {
    r.x += h * static_cast<T>(c) * k->x;
    r.y += h * static_cast<T>(c) * k->y;
  }
  return r;
}

template <class S>
bool finite(const S& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

}  // namespace detail

/// One adaptive stepper over state S (Point2 or Point2L); exposes the dense
/// interpolant of the last step.
template <class S>
class BasicDopri5 {
 public:
  using T = detail::scalar_of<S>;
  using Rhs = std::function<S(const S&)>;

  BasicDopri5(Rhs f, S p0, T t0, const OdeControls& c)
      : f_(std::move(f)), c_(c), t_(t0), t_prev_(t0), h_(static_cast<T>(c.h_init)), y_(p0), y_prev_(p0) {
    k1_ = f_(y_);
    k1_prev_ = k1_;
    rc1_ = y_;
  }

  /// Advances one accepted step, never past t_limit. Throws StepUnderflow.
  void step(T t_limit) {
    using std::fabs;
    using std::pow;
    while (true) {
      const T h = std::min({h_, static_cast<T>(c_.h_max), t_limit - t_});
      if (h < static_cast<T>(c_.h_min) * std::max(T(1), fabs(t_)))
        throw StepUnderflow("Dopri5: step size underflow at t = " + std::to_string(static_cast<double>(t_)));
      S y_new, k7;
      T err = INFINITY;
      const bool ok = attempt(h, y_new, k7, err);
      if (ok && err <= 1) {
        t_prev_ = t_;
        y_prev_ = y_;
        k1_prev_ = k1_;
        t_ += h;
        y_ = y_new;
        k1_ = k7;
        ++accepted_;
        max_err_ = std::max(max_err_, static_cast<double>(err));
        const T fac = err == 0 ? T(5) : std::clamp(T(0.9) * pow(err, T(-0.2)), T(0.2), T(5));
        h_ = h * fac;
        return;
      }
      ++rejected_;
      h_ = h * (ok ? std::clamp(T(0.9) * pow(err, T(-0.2)), T(0.1), T(0.9)) : T(0.25));
    }
  }

  /// State at t in [t_prev(), t()].
  S dense(T t) const {
    const T h = t_ - t_prev_;
    if (h == 0) return y_;
    const T s = (t - t_prev_) / h, s1 = 1 - s;
    auto comp = [&](T r1, T r2, T r3, T r4, T r5) { return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5))); };
    return {comp(rc1_.x, rc2_.x, rc3_.x, rc4_.x, rc5_.x), comp(rc1_.y, rc2_.y, rc3_.y, rc4_.y, rc5_.y)};
  }

  /// Exact single step of size dt from the previous accepted state.
  S step_from_prev(T dt) const {
    BasicDopri5 tmp = *this;
    tmp.t_ = t_prev_;
    tmp.y_ = y_prev_;
    tmp.k1_ = k1_prev_;
    S y_new, k7;
    T err = 0;
    if (!tmp.attempt(dt, y_new, k7, err)) return dense(t_prev_ + dt);
    return y_new;
  }

  T t() const { return t_; }
  T t_prev() const { return t_prev_; }
  const S& state() const { return y_; }
  const S& prev_state() const { return y_prev_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }
  double max_error_ratio() const { return max_err_; }

 private:
  bool attempt(T h, S& y_new, S& k7, T& err) {
    using namespace detail;
    using std::fabs;
    using std::sqrt;
    const S& k1 = k1_;
    const S k2 = f_(axpy(y_, h, {{a21, &k1}}));
    const S k3 = f_(axpy(y_, h, {{a31, &k1}, {a32, &k2}}));
    const S k4 = f_(axpy(y_, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const S k5 = f_(axpy(y_, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const S k6 = f_(axpy(y_, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    y_new = axpy(y_, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    if (!finite(y_new)) return false;
    k7 = f_(y_new);
    if (!finite(k7)) return false;
    const S e = axpy(S{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
    const T rtol = static_cast<T>(c_.rtol), atol = static_cast<T>(c_.atol);
    const T sx = atol + rtol * std::max(fabs(y_.x), fabs(y_new.x));
    const T sy = atol + rtol * std::max(fabs(y_.y), fabs(y_new.y));
    err = sqrt(T(0.5) * ((e.x / sx) * (e.x / sx) + (e.y / sy) * (e.y / sy)));
    if (!std::isfinite(err)) return false;
    const S diff{y_new.x - y_.x, y_new.y - y_.y};
    const S bspl{h * k1.x - diff.x, h * k1.y - diff.y};
    rc1_ = y_;
    rc2_ = diff;
    rc3_ = bspl;
    rc4_ = {diff.x - h * k7.x - bspl.x, diff.y - h * k7.y - bspl.y};
    rc5_ = axpy(S{}, h, {{d1, &k1}, {d3, &k3}, {d4, &k4}, {d5, &k5}, {d6, &k6}, {d7, &k7}});
    return true;
  }

  Rhs f_;
  OdeControls c_;
  T t_ = 0, t_prev_ = 0, h_ = 0;
  S y_, y_prev_, k1_, k1_prev_;
  // Dense coefficients of the last step.
  S rc1_, rc2_, rc3_, rc4_, rc5_;
  std::size_t accepted_ = 0, rejected_ = 0;
  double max_err_ = 0.0;
};

using Dopri5 = BasicDopri5<Point2>;

Trajectory integrate(const PlanarRhs& f, Point2 p0, double t_end, const OdeControls& c = {});
Trajectory integrate(const PlanarField& X, Point2 p0, double t_end, const OdeControls& c = {});

template <class S>
struct BasicCrossing {
  detail::scalar_of<S> t = 0;
  S p;
};
using Crossing = BasicCrossing<Point2>;

/// First time after t = 0 that g crosses zero in `direction` (+1: increasing)
/// with accept(p) true. g must be affine along the flow to Newton-polish the
/// crossing; the located point satisfies |g| < tol. Throws NoReturn past t_max.
/// `on_step` sees every accepted state.
template <class S>
BasicCrossing<S> locate_event(const std::function<S(const S&)>& f, S p0,
                              const std::function<detail::scalar_of<S>(const S&)>& g,
                              const std::function<detail::scalar_of<S>(const S&)>& g_rate, int direction,
                              const std::function<bool(const S&)>& accept, const OdeControls& c,
                              detail::scalar_of<S> tol,
                              const std::function<void(detail::scalar_of<S>, const S&)>& on_step = {}) {
  using T = detail::scalar_of<S>;
  using std::fabs;
  BasicDopri5<S> s(f, p0, 0, c);
  T g_prev = g(p0);
  while (true) {
    if (s.t() >= static_cast<T>(c.t_max) || s.accepted() >= c.max_steps)
      throw NoReturn("integrate_to_event: no return before t = " + std::to_string(static_cast<double>(s.t())));
    s.step(static_cast<T>(c.t_max));
    const T g_new = g(s.state());
    if (on_step) on_step(s.t(), s.state());
    const bool crossed = direction > 0 ? (g_prev < 0 && g_new >= 0) : (g_prev > 0 && g_new <= 0);
    g_prev = g_new;
    if (!crossed) continue;

    // Bracket in the dense interpolant, then polish with exact partial steps.
    auto gd = [&](T t) { return g(s.dense(t)); };
    T lo = s.t_prev(), hi = s.t();
    T t_star = hi;
    if (gd(lo) * gd(hi) < 0) {
      std::uintmax_t iters = 100;
      auto r = boost::math::tools::toms748_solve(gd, lo, hi,
                                                 boost::math::tools::eps_tolerance<T>(std::numeric_limits<T>::digits - 3),
                                                 iters);
      t_star = (r.first + r.second) / 2;
    }
    S p = s.step_from_prev(t_star - s.t_prev());
    for (int it = 0; it < 4 && fabs(g(p)) >= tol; ++it) {
      const T rate = g_rate(p);
      if (rate == 0) break;
      t_star -= g(p) / rate;
      p = s.step_from_prev(t_star - s.t_prev());
    }
    if (!accept(p)) continue;
    return {t_star, p};
  }
}

Crossing integrate_to_event(const PlanarRhs& f, Point2 p0, const std::function<double(const Point2&)>& g,
                            const std::function<double(const Point2&)>& g_rate, int direction,
                            const std::function<bool(const Point2&)>& accept, const OdeControls& c = {},
                            double tol = 1e-12, Trajectory* path = nullptr);

}  // namespace mcyc
