#include "mcyc/construct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcyc {

namespace {

constexpr double kUnitLineTol = 1e-6;

int expected_sign(int index) { return (std::abs(index) % 2 == 0) ? 1 : -1; }

std::string describe(const Point2& c, int index) {
  std::ostringstream s;
  s << "gamma_" << index << " of the annulus at (" << c.x << ", " << c.y << ")";
  return s.str();
}

}  // namespace

std::vector<std::shared_ptr<const PeriodAnnulus>> annuli_on_unit_lines(int r) {
  if (r < 0) throw std::invalid_argument("annuli_on_unit_lines: r must be >= 0");
  PlanarField f = build_xr(r);
  SparsePoly2 h = hamiltonian_of(f);
  SingularityScan scan = classify_singularities(f, {-r - 0.5, r + 0.5, -1.5, 1.5});
  std::vector<Point2> saddles;
  for (const auto& s : scan.points)
    if (s.kind == SingularKind::saddle) saddles.push_back(s.point);
  std::vector<std::shared_ptr<const PeriodAnnulus>> out;
  for (const auto& s : scan.points)
    if (s.kind == SingularKind::center && std::fabs(std::fabs(s.point.y) - 1.0) < kUnitLineTol)
      out.push_back(std::make_shared<PeriodAnnulus>(find_annulus(h, s.point, saddles)));
  return out;
}

Thresholds choose_thresholds(const std::vector<std::shared_ptr<const PeriodAnnulus>>& annuli, int n,
                             const ThresholdOptions& opts) {
  if (n < 1) throw std::invalid_argument("choose_thresholds: n must be >= 1");
  if (annuli.empty()) throw std::invalid_argument("choose_thresholds: no annuli");
  double sup = INFINITY;
  for (const auto& a : annuli) {
    if (std::fabs(std::fabs(a->center.y) - 1.0) >= kUnitLineTol)
      throw std::invalid_argument("choose_thresholds: annulus center not on y = +-1");
    sup = std::min(sup, amplitude_at(*a, a->max_energy()));
  }
  Thresholds t;
  t.sup_amplitude = sup - opts.margin;
  const double gap = (t.sup_amplitude - 1.0) / (n + 2);
  if (!(gap >= opts.min_gap)) {
    std::ostringstream s;
    s << "choose_thresholds: amplitude gap " << gap << " below " << opts.min_gap << " for n = " << n;
    throw InfeasibleThresholds(s.str());
  }
  for (int i = 0; i <= n; ++i) t.targets.push_back(1.0 + (i + 1) * gap);
  t.a.push_back(1.0);
  for (int i = 1; i <= n; ++i) t.a.push_back(0.5 * (t.targets[i - 1] + t.targets[i]));
  return t;
}

bool nested_in(const Oval& inside, const Oval& outside) {
  if (inside.center.x == outside.center.x && inside.center.y == outside.center.y && outside.size() > 0) {
    // Same center: compare in the outer oval's scaled frame.
    const double f = std::exp(inside.log_scale - outside.log_scale);
    for (const auto& p : inside.local)
      if (!point_in_polygon(outside.local, {f * p.x, f * p.y})) return false;
    return true;
  }
  for (const auto& p : inside.points)
    if (!point_in_polygon(outside.points, p)) return false;
  return true;
}

OvalSystem build_oval_system(int r, int n, const std::vector<std::shared_ptr<const PeriodAnnulus>>& annuli,
                             const Thresholds& thresholds, const TraceOptions& trace) {
  OvalSystem sys;
  sys.r = r;
  sys.n = n;
  sys.thresholds = thresholds;
  for (const auto& a : annuli) {
    AnnulusOvals ao;
    ao.annulus = a;
    for (int i = 0; i <= n; ++i) ao.outer.push_back(oval_by_amplitude(a, thresholds.targets[i], trace));
    for (int i = 1; i <= n; ++i) {
      const double ai = thresholds.a[i];
      if (!(ao.outer[i - 1].alpha < ai && ai < ao.outer[i].alpha))
        throw InfeasibleThresholds("build_oval_system: amplitudes do not interleave at " + describe(a->center, i));
      if (!nested_in(ao.outer[i - 1], ao.outer[i]))
        throw InfeasibleThresholds("build_oval_system: ovals not nested at " + describe(a->center, i));
    }
    sys.annuli.push_back(std::move(ao));
  }
  return sys;
}

const char* to_string(SignMethod m) { return m == SignMethod::quadrature ? "quadrature" : "certificate"; }

SignResolution resolve_sign(const SparsePoly2& R, const Oval& oval) {
  SignResolution res;
  try {
    IntegralValue v = oval.annulus ? green_integral_refined(R, oval, 1u << 16) : green_integral(R, oval);
    if (v.sign_trusted()) {
      res.sign = v.log_form.sign;
      res.value = v;
      return res;
    }
  } catch (const CatastrophicCancellation&) {
  }
  SignCertificate c = sign_certificate(R, oval);
  res.method = SignMethod::certificate;
  if (c == SignCertificate::positive) res.sign = 1;
  if (c == SignCertificate::negative) res.sign = -1;
  return res;
}

LogValue inner_xwidth_bound(const PerturbationSpec& spec, int k, double log_b) {
  const int p = 2 * (spec.n - k);
  const double mk = static_cast<double>(spec.m[k]), mp = static_cast<double>(spec.m[k - 1]);
  const double log_x2 = std::log((p + 1.0) / (p + 3.0)) + 2.0 * (mk - mp) * log_b + 2.0 * mp * std::log(spec.a[k - 1]) -
                        2.0 * mk * std::log(spec.a[k]);
  return LogValue::from_log(1, 0.5 * log_x2 - std::log(2.0));
}

Oval inner_oval_for_stage(const std::shared_ptr<const PeriodAnnulus>& annulus, const PerturbationSpec& spec, int k,
                          const Oval& enclosing) {
  const SparsePoly2 Rk = build_rn_stage(spec, k);
  const SignCertificate want = expected_sign(k) > 0 ? SignCertificate::positive : SignCertificate::negative;
  double bound = std::min(inner_xwidth_bound(spec, k, enclosing.log_b_min).logmag,
                          enclosing.max_abs_x.logmag - std::log(2.0));
  for (int attempt = 0; attempt < 8; ++attempt, bound -= std::log(4.0)) {
    Oval o = shrink_to_xwidth(annulus, LogValue::from_log(1, bound));
    if (sign_certificate(Rk, o) == want && nested_in(o, enclosing)) return o;
  }
  throw CertificateFailed(k, "inner_oval_for_stage: no certified " + describe(annulus->center, -k));
}

PerturbationSpec select_exponents(const OvalSystem& system, const ExponentOptions& opts) {
  const int n = system.n;
  PerturbationSpec spec;
  spec.n = n;
  spec.a = system.thresholds.a;
  spec.m = {0};
  const bool inner_stage = system.r % 2 == 0;
  std::vector<std::vector<Oval>> inner(system.annuli.size());

  for (int k = 1; k <= n; ++k) {
    spec.m.push_back(0);
    std::string failure;
    bool unresolved = false;
    // True when every stage-k sign requirement holds with m_k = m.
    auto passes = [&](long long m) {
      spec.m[k] = m;
      const SparsePoly2 Rk = build_rn_stage(spec, k);
      auto require = [&](const Oval& o, const Point2& c, int index) {
        SignResolution s = resolve_sign(Rk, o);
        if (s.sign == expected_sign(index)) return true;
        unresolved = s.sign == 0;
        failure = (unresolved ? "unresolved sign on " : "wrong sign on ") + describe(c, index);
        return false;
      };
      unresolved = false;
      for (std::size_t j = 0; j < system.annuli.size(); ++j) {
        const AnnulusOvals& ao = system.annuli[j];
        for (int i = 0; i <= k; ++i)
          if (!require(ao.outer[i], ao.annulus->center, i)) return false;
        for (std::size_t q = 0; q < inner[j].size(); ++q)
          if (!require(inner[j][q], ao.annulus->center, -static_cast<int>(q + 1))) return false;
      }
      return true;
    };
    // Bracket by doubling from m_{k-1} + 1, the last step clamped to m_cap,
    // then bisect to the least passing exponent.
    long long lo = spec.m[k - 1], hi = spec.m[k - 1] + 1;
    while (!passes(hi)) {
      if (hi >= opts.m_cap) {
        if (unresolved) throw CancellationUnresolved("select_exponents: stage " + std::to_string(k) + ": " + failure);
        throw ExponentCapExceeded(k, failure,
                                  "select_exponents: m_" + std::to_string(k) + " would exceed " +
                                      std::to_string(opts.m_cap) + " (" + failure + ")");
      }
      lo = hi;
      hi = std::min(2 * hi, opts.m_cap);
    }
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      (passes(mid) ? hi : lo) = mid;
    }
    spec.m[k] = hi;
    if (inner_stage) {
      for (std::size_t j = 0; j < system.annuli.size(); ++j) {
        const AnnulusOvals& ao = system.annuli[j];
        if (!ao.on_axis()) continue;
        const Oval& enclosing = k == 1 ? ao.outer[0] : inner[j].back();
        inner[j].push_back(inner_oval_for_stage(ao.annulus, spec, k, enclosing));
      }
    }
  }
  spec.validate();
  return spec;
}

OvalSystem attach_inner_ovals(OvalSystem system, const PerturbationSpec& spec) {
  if (system.r % 2 != 0) return system;
  for (auto& ao : system.annuli) {
    if (!ao.on_axis()) continue;
    ao.inner.clear();
    for (int k = 1; k <= spec.n; ++k) {
      const Oval& enclosing = k == 1 ? ao.outer[0] : ao.inner.back();
      ao.inner.push_back(inner_oval_for_stage(ao.annulus, spec, k, enclosing));
    }
  }
  return system;
}

int sign_changes(const std::vector<SignEntry>& entries) {
  int c = 0;
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].sign != entries[i - 1].sign) ++c;
  return c;
}

CycleCertificate tabulate(const OvalSystem& system, const PerturbationSpec& spec) {
  CycleCertificate cert;
  cert.n = system.n;
  cert.r = system.r;
  cert.spec = spec;
  cert.thresholds = system.thresholds;
  const SparsePoly2 R = build_rn(spec);
  for (const auto& ao : system.annuli) {
    AnnulusSigns row;
    row.center = ao.annulus->center;
    auto add = [&](const Oval& o, int index) {
      SignResolution s = resolve_sign(R, o);
      if (s.sign == 0) throw CancellationUnresolved("tabulate: no sign on " + describe(row.center, index));
      SignEntry e;
      e.index = index;
      e.sign = s.sign;
      e.method = s.method;
      e.value = s.value;
      if (index < 0) e.stage_certificate = sign_certificate(build_rn_stage(spec, -index), o);
      e.h = o.h;
      e.energy = o.energy;
      e.alpha = o.alpha;
      e.max_abs_x = o.max_abs_x;
      row.entries.push_back(e);
    };
    for (std::size_t q = ao.inner.size(); q-- > 0;) add(ao.inner[q], -static_cast<int>(q + 1));
    for (std::size_t i = 0; i < ao.outer.size(); ++i) add(ao.outer[i], static_cast<int>(i));
    row.sign_changes = sign_changes(row.entries);
    cert.count += row.sign_changes;
    cert.table.push_back(std::move(row));
  }
  return cert;
}

CycleCertificate certify(int n, int r, const CertifyOptions& opts) { return certify(n, r, opts, nullptr); }

CycleCertificate certify(int n, int r, const CertifyOptions& opts, OvalSystem* system_out) {
  if (n < 1) throw std::invalid_argument("certify: n must be >= 1");
  if (r < 0) throw std::invalid_argument("certify: r must be >= 0");
  auto annuli = annuli_on_unit_lines(r);
  Thresholds t = choose_thresholds(annuli, n, opts.thresholds);
  OvalSystem sys = build_oval_system(r, n, annuli, t, opts.trace);
  PerturbationSpec spec = select_exponents(sys, opts.exponents);
  sys = attach_inner_ovals(std::move(sys), spec);
  CycleCertificate cert = tabulate(sys, spec);
  for (const auto& row : cert.table)
    for (const auto& e : row.entries)
      if (e.sign != expected_sign(e.index))
        throw CertificateFailed(std::abs(e.index), "certify: sign of I(R_n) breaks alternation on " +
                                                       describe(row.center, e.index));
  if (system_out) *system_out = std::move(sys);
  return cert;
}

}  // namespace mcyc
