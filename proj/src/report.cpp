#include "mcyc/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace mcyc {

const char* const kToolVersion = "0.1.0";

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point(const Point2& p) { return Json::array({p.x, p.y}); }

Json integral(const IntegralValue& v) {
  return {{"value", number(v.value)}, {"err_estimate", number(v.err_estimate)}, {"log_form", to_json(v.log_form)}};
}

}  // namespace

Json to_json(const LogValue& v) { return {{"sign", v.sign}, {"log_magnitude", number(v.logmag)}}; }

Json to_json(const CycleCertificate& c) {
  Json spec = {{"n", c.spec.n}, {"a", c.spec.a}, {"m", c.spec.m}};
  Json table = Json::array();
  for (const auto& row : c.table) {
    Json entries = Json::array();
    for (const auto& e : row.entries) {
      Json j = {{"index", e.index},
                {"sign", e.sign},
                {"method", to_string(e.method)},
                {"h", number(e.h)},
                {"energy", to_json(e.energy)},
                {"alpha", number(e.alpha)},
                {"max_abs_x", to_json(e.max_abs_x)}};
      if (e.value) j["integral"] = integral(*e.value);
      if (e.stage_certificate) j["stage_certificate"] = to_string(*e.stage_certificate);
      entries.push_back(std::move(j));
    }
    table.push_back({{"center", point(row.center)}, {"sign_changes", row.sign_changes}, {"entries", std::move(entries)}});
  }
  bool any_certificate = false;
  for (const auto& row : c.table)
    for (const auto& e : row.entries) any_certificate = any_certificate || e.method == SignMethod::certificate;
  return {{"n", c.n},
          {"r", c.r},
          {"count", c.count},
          {"count_method", any_certificate ? method::certificate : method::quadrature},
          {"thresholds", {{"a", c.thresholds.a}, {"targets", c.thresholds.targets}, {"sup_amplitude", c.thresholds.sup_amplitude}}},
          {"spec", std::move(spec)},
          {"table", std::move(table)}};
}

Json to_json(const VerifyReport& v) {
  Json scan = Json::array();
  for (const auto& e : v.scan)
    scan.push_back({{"eps", e.eps}, {"signs_match", e.signs_match}, {"profile_sign_changes", e.profile_sign_changes}});
  Json annuli = Json::array();
  for (const auto& a : v.annuli) {
    Json ovals = Json::array();
    for (const auto& o : a.ovals) {
      Json d = Json::array(), law = Json::array();
      for (double x : o.d) d.push_back(number(x));
      for (double x : o.law_d) law.push_back(number(x));
      ovals.push_back({{"index", o.index},
                       {"energy", number(o.energy)},
                       {"certified_sign", o.certified_sign},
                       {"certificate_only", o.certificate_only},
                       {"integral", number(o.integral)},
                       {"integral_err", number(o.integral_err)},
                       {"integral_method", method::quadrature},
                       {"d", std::move(d)},
                       {"law_d", std::move(law)},
                       {"kappa", number(o.kappa)},
                       {"law_error", number(o.law_error)},
                       {"law_checked", o.law_checked},
                       {"method", method::simulation}});
    }
    annuli.push_back({{"center", point(a.center)},
                      {"cycles", a.cycles.count()},
                      {"cycle_energies", a.cycles.zero_energies},
                      {"cycle_h", a.cycles.zero_h},
                      {"certificate_only_changes", a.certificate_only_changes},
                      {"ovals", std::move(ovals)}});
  }
  return {{"log_scale", v.log_scale},
          {"scan", std::move(scan)},
          {"accepted_eps", v.accepted_eps ? Json(*v.accepted_eps) : Json(nullptr)},
          {"simulated_cycles", {{"value", v.simulated_cycles}, {"method", method::simulation}}},
          {"certificate_only_cycles", {{"value", v.certificate_only_cycles}, {"method", method::certificate}}},
          {"certified_count", {{"value", v.certified_count}, {"method", method::quadrature}}},
          {"law_holds", v.law_holds},
          {"worst_law_error", number(v.worst_law_error)},
          {"annuli", std::move(annuli)}};
}

Json to_json(const HopfResult& h) {
  return {{"param", {{"value", h.param}, {"method", method::exact}}},
          {"trace", h.trace},
          {"det", h.det},
          {"lyapunov_sign", {{"value", h.lyapunov_sign}, {"method", method::simulation}}},
          {"c3", h.c3},
          {"c5", h.c5},
          {"order_two", h.order_two},
          {"radii", h.radii},
          {"displacements", h.displacements}};
}

Json to_json(const M4CycleResult& m) {
  return {{"count", {{"value", m.count}, {"method", method::simulation}}},
          {"radius", number(m.radius)},
          {"mirror_radius", number(m.mirror_radius)},
          {"hausdorff", number(m.hausdorff)},
          {"diagnostics", m.diagnostics}};
}

Json bounds_json(int m) {
  const QuadraticBound b = bound_thm1(m);
  const int r = optimal_r(m);
  const int n = m - r - 4;
  Json j = {{"m", m},
            {"simplified", b.simplified},
            {"refined", b.refined},
            {"optimal_r", r},
            {"method", method::exact}};
  if (n >= 1) j["cycles_at_optimal_split"] = cycles_prop2(n, r);
  return j;
}

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

Json RunReport::to_json() const {
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"tool", "mcyc"},
          {"version", kToolVersion},
          {"command", command},
          {"adopted_reading", kAdoptedReadingNote},
          {"results", results},
          {"checks", std::move(cs)},
          {"passed", all_passed()},
          {"timing", timing}};
}

void write_report(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "report.json");
  out << r.to_json().dump(2) << '\n';
  if (!out) throw Error("write_report: cannot write " + (dir / "report.json").string());
}

void write_oval_csv(const Oval& o, const std::filesystem::path& file) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  out << std::setprecision(17) << "x,y\n";
  for (const auto& p : o.points) out << p.x << ',' << p.y << '\n';
  if (!out) throw Error("write_oval_csv: cannot write " + file.string());
}

void write_profile_csv(const DisplacementProfile& p, const std::filesystem::path& file) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  out << std::setprecision(17) << "energy,h,d,period,ok\n";
  for (const auto& s : p.samples)
    out << s.energy << ',' << s.h << ',' << s.d << ',' << s.period << ',' << (s.ok ? 1 : 0) << '\n';
  if (!out) throw Error("write_profile_csv: cannot write " + file.string());
}

}  // namespace mcyc
