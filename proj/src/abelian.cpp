#include "mcyc/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcyc/summation.hpp"

namespace mcyc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Fewer than three significant digits left after cancellation.
constexpr double kCancelLogRatio = -13.0 * 2.302585092994046;

// Sum of signed terms given as (sign, log|term|), split into sign groups.
class LogGroups {
 public:
  void add(int sign, double logmag) {
    if (sign == 0 || logmag == -INFINITY) return;
    (sign > 0 ? pos_ : neg_).push_back(logmag);
  }
  double log_pos() const { return log_sum(pos_); }
  double log_neg() const { return log_sum(neg_); }
  LogValue total() const {
    const double p = log_pos(), n = log_neg();
    if (p == n) return LogValue::zero();
    return p > n ? LogValue::from_log(1, log_sub(p, n)) : LogValue::from_log(-1, log_sub(n, p));
  }

 private:
  static double log_sum(const std::vector<double>& v) {
    if (v.empty()) return -INFINITY;
    const double m = *std::max_element(v.begin(), v.end());
    CompensatedSum s;
    for (double l : v) s.add(std::exp(l - m));
    return m + std::log(s.value());
  }
  std::vector<double> pos_, neg_;
};

double mul_exp(int e, double logv) { return e == 0 ? 0.0 : e * logv; }

// Weight of vertex i in the closed-curve rule for the local coordinate picked
// by `comp` (0: x, 1: y): spectral (theta step times tangent) when tangents
// exist, central chord difference otherwise. `stride` selects a subsample.
double local_weight(const Oval& o, std::size_t i, std::size_t stride, int comp) {
  const std::size_t n = o.size();
  if (o.has_tangents()) {
    const double t = comp ? o.tangent[i].y : o.tangent[i].x;
    return t * kTwoPi * static_cast<double>(stride) / static_cast<double>(n);
  }
  const Point2& next = o.local[(i + stride) % n];
  const Point2& prev = o.local[(i + n - stride) % n];
  return 0.5 * (comp ? next.y - prev.y : next.x - prev.x);
}

struct GroupSums {
  LogGroups full, half;
};

void accumulate_term(const Monomial2& t, const Oval& o, GroupSums& g) {
  if (t.ex == 0) return;  // y^b dy is exact
  const LogValue c = t.coeff.to_log();
  const std::size_t n = o.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = o.log_abs_x(i), ly = o.log_abs_y(i);
    if (lx == -INFINITY || (t.ey > 0 && ly == -INFINITY)) continue;
    const double px = o.center.x + o.scale() * o.local[i].x;
    int sign = c.sign;
    if ((t.ex & 1) && (o.center.x == 0.0 ? o.local[i].x < 0 : px < 0)) sign = -sign;
    if ((t.ey & 1) && (o.center.y == 0.0 ? o.local[i].y < 0 : o.center.y + o.scale() * o.local[i].y < 0)) sign = -sign;
    const double base = c.logmag + mul_exp(t.ex, lx) + mul_exp(t.ey, ly) + o.log_scale;
    const double w1 = local_weight(o, i, 1, 1);
    if (w1 != 0.0) g.full.add(w1 > 0 ? sign : -sign, base + std::log(std::fabs(w1)));
    if (i % 2 == 0) {
      const double w2 = local_weight(o, i, 2, 1);
      if (w2 != 0.0) g.half.add(w2 > 0 ? sign : -sign, base + std::log(std::fabs(w2)));
    }
  }
}

IntegralValue finish(const GroupSums& g) {
  IntegralValue v;
  v.log_form = g.full.total();
  const LogValue diff = v.log_form - g.half.total();
  const double roundoff = std::log(4.0 * kEps) + log_add(g.full.log_pos(), g.full.log_neg());
  v.log_err = LogValue::from_log(1, log_add(diff.logmag, roundoff));
  v.value = v.log_form.to_double();
  v.err_estimate = v.log_err.to_double();
  return v;
}

}  // namespace

bool IntegralValue::sign_trusted(double factor) const {
  return log_form.sign != 0 && log_form.logmag > std::log(factor) + log_err.logmag;
}

IntegralValue line_integral(const SparsePoly2& f, const SparsePoly2& g, const Oval& oval) {
  const std::size_t n = oval.size();
  const double es = oval.scale();
  CompensatedSum full, half;
  double mag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = oval.points[i];
    const double fv = f.is_zero() ? 0.0 : f(p.x, p.y);
    const double gv = g.is_zero() ? 0.0 : g(p.x, p.y);
    const double term = es * (fv * local_weight(oval, i, 1, 1) - gv * local_weight(oval, i, 1, 0));
    full.add(term);
    mag += std::fabs(term);
    if (i % 2 == 0) half.add(es * (fv * local_weight(oval, i, 2, 1) - gv * local_weight(oval, i, 2, 0)));
  }
  IntegralValue v;
  v.value = full.value();
  v.err_estimate = std::fabs(v.value - half.value()) + 4.0 * kEps * mag;
  v.log_form = LogValue::from_double(v.value);
  v.log_err = LogValue::from_double(v.err_estimate);
  return v;
}

IntegralValue green_integral(const SparsePoly2& R, const Oval& oval) {
  GroupSums g;
  for (const auto& t : R.terms()) accumulate_term(t, oval, g);
  IntegralValue v = finish(g);
  const double top = std::max(g.full.log_pos(), g.full.log_neg());
  if (top > -INFINITY && v.log_form.logmag - top < kCancelLogRatio && v.log_err.logmag > v.log_form.logmag)
    throw CatastrophicCancellation(v, "green_integral: sign groups cancel to roundoff");
  return v;
}

std::vector<IntegralValue> term_integrals(const SparsePoly2& R, const Oval& oval) {
  std::vector<IntegralValue> out;
  out.reserve(R.term_count());
  for (const auto& t : R.terms()) {
    GroupSums g;
    accumulate_term(t, oval, g);
    out.push_back(finish(g));
  }
  return out;
}

IntegralValue sum_integrals(const std::vector<IntegralValue>& parts) {
  LogGroups vals;
  double lerr = -INFINITY;
  for (const auto& p : parts) {
    vals.add(p.log_form.sign, p.log_form.logmag);
    lerr = log_add(lerr, p.log_err.logmag);
  }
  IntegralValue v;
  v.log_form = vals.total();
  // Roundoff of the final cancellation between parts.
  lerr = log_add(lerr, std::log(4.0 * kEps) + log_add(vals.log_pos(), vals.log_neg()));
  v.log_err = LogValue::from_log(1, lerr);
  v.value = v.log_form.to_double();
  v.err_estimate = v.log_err.to_double();
  return v;
}

IntegralValue green_integral_refined(const SparsePoly2& R, const Oval& oval, std::size_t max_vertices) {
  Oval current = oval;
  while (true) {
    try {
      IntegralValue v = green_integral(R, current);
      if (v.sign_trusted() || !current.annulus || current.size() * 2 > max_vertices) return v;
    } catch (const CatastrophicCancellation&) {
      if (!current.annulus || current.size() * 2 > max_vertices) throw;
    }
    TraceOptions opts;
    opts.n_vertices = current.size() * 2;
    opts.adaptive = false;
    opts.star_check = false;
    current = trace_oval_energy(current.annulus, current.energy, opts);
  }
}

const char* to_string(SignCertificate c) {
  switch (c) {
    case SignCertificate::positive: return "positive";
    case SignCertificate::negative: return "negative";
    case SignCertificate::inconclusive: return "inconclusive";
  }
  return "?";
}

SignCertificate sign_certificate(const SparsePoly2& R, const Oval& oval) {
  const SparsePoly2 d = differentiate(R, Var::x);
  if (d.is_zero()) return SignCertificate::inconclusive;

  const bool x_straddles = oval.min_abs_x.is_zero();
  const bool y_straddles = oval.b_min == 0.0 && oval.log_b_min == -INFINITY;
  const int sx = x_straddles ? 0 : (oval.center.x > 0 ? 1 : -1);
  const int sy = y_straddles ? 0 : (oval.center.y > 0 ? 1 : -1);

  int a0 = std::numeric_limits<int>::max(), b0 = std::numeric_limits<int>::max();
  for (const auto& t : d.terms()) a0 = std::min(a0, t.ex), b0 = std::min(b0, t.ey);
  // Sign of the common factor x^a0 y^b0 on the region.
  if (((a0 & 1) && x_straddles) || ((b0 & 1) && y_straddles)) return SignCertificate::inconclusive;
  int factor_sign = 1;
  if ((a0 & 1) && sx < 0) factor_sign = -factor_sign;
  if ((b0 & 1) && sy < 0) factor_sign = -factor_sign;

  struct Reduced {
    LogValue c;
    int a, b;
    int sign;  // 0 when it changes sign on the region
  };
  std::vector<Reduced> terms;
  for (const auto& t : d.terms()) {
    Reduced r{t.coeff.to_log(), t.ex - a0, t.ey - b0, 0};
    r.sign = r.c.sign;
    if (r.a & 1) r.sign = sx == 0 ? 0 : r.sign * sx;
    if (r.b & 1) r.sign = sy == 0 ? 0 : r.sign * sy;
    terms.push_back(r);
  }

  const double lx_lo = oval.min_abs_x.logmag, lx_hi = oval.max_abs_x.logmag;
  const double ly_lo = oval.log_b_min, ly_hi = oval.log_alpha;
  const double margin = 1e-9;

  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Reduced& dom = terms[k];
    if (dom.sign == 0) continue;
    auto opposing = [&](std::size_t j) { return j != k && terms[j].sign != dom.sign; };

    double lo = dom.c.logmag + mul_exp(dom.a, lx_lo) + mul_exp(dom.b, ly_lo);
    double opp = -INFINITY;
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (opposing(j)) opp = log_add(opp, terms[j].c.logmag + mul_exp(terms[j].a, lx_hi) + mul_exp(terms[j].b, ly_hi));
    if (!(lo > opp + margin)) continue;

    bool vertices_ok = true;
    for (std::size_t i = 0; i < oval.size() && vertices_ok; ++i) {
      const double lx = oval.log_abs_x(i), ly = oval.log_abs_y(i);
      const double v = dom.c.logmag + mul_exp(dom.a, lx) + mul_exp(dom.b, ly);
      double o = -INFINITY;
      for (std::size_t j = 0; j < terms.size(); ++j)
        if (opposing(j)) o = log_add(o, terms[j].c.logmag + mul_exp(terms[j].a, lx) + mul_exp(terms[j].b, ly));
      vertices_ok = v > o + margin;
    }
    if (!vertices_ok) continue;
    return dom.sign * factor_sign > 0 ? SignCertificate::positive : SignCertificate::negative;
  }
  return SignCertificate::inconclusive;
}

}  // namespace mcyc
