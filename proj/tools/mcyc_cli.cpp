#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <thread>

#include "mcyc/report.hpp"

using namespace mcyc;
namespace fs = std::filesystem;

namespace {

// Best known lower bounds on the cycle count, by number of monomials m.
const std::map<int, long long> kTable1 = {{4, 2}, {5, 4}, {6, 8}, {7, 12}, {8, 16}, {9, 24}, {10, 32}};

unsigned thread_count() {
  if (const char* s = std::getenv("MCYC_THREADS")) {
    const int v = std::atoi(s);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string index_name(int index) { return index < 0 ? "inner" + std::to_string(-index) : "outer" + std::to_string(index); }

std::string annulus_name(const Point2& c) {
  auto f = [](double v) { return (v < 0 ? "m" : "p") + std::to_string(static_cast<long long>(std::llround(std::fabs(v)))); };
  return "x" + f(c.x) + "_y" + f(c.y);
}

struct RowOutcome {
  Json result;
  Check check;
};

RowOutcome table1_row(int m) {
  RowOutcome o;
  const long long want = kTable1.at(m);
  o.result = {{"m", m}, {"paper_bound", want}};
  o.check.name = "table1 m=" + std::to_string(m);
  try {
    long long got = 0;
    if (m == 4) {
      const M4CycleResult c = verify_m4_cycles(0.05);
      o.result["method"] = method::simulation;
      o.result["m4"] = to_json(c);
      got = c.count;
    } else {
      const int n = m <= 8 ? m - 4 : m - 6;
      const int r = m <= 8 ? 0 : 2;
      const CycleCertificate c = certify(n, r);
      o.result["n"] = n;
      o.result["r"] = r;
      o.result["exponents"] = c.spec.m;
      o.result["method"] = to_json(c)["count_method"];
      got = c.count;
    }
    o.result["achieved"] = got;
    o.check.passed = got >= want;
    o.check.detail = std::to_string(got) + " vs " + std::to_string(want);
  } catch (const std::exception& e) {
    o.result["error"] = e.what();
    o.check.detail = e.what();
  }
  return o;
}

void cmd_table1(RunReport& rep, std::vector<int> rows) {
  if (rows.empty())
    for (const auto& [m, _] : kTable1) rows.push_back(m);
  for (int m : rows)
    if (!kTable1.count(m)) throw CLI::ValidationError("--rows", "rows are m in [4, 10]");
  std::vector<RowOutcome> out(rows.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(rows.size()));
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) out[i] = table1_row(rows[i]);
    });
  for (auto& t : pool) t.join();
  Json table = Json::array();
  for (auto& o : out) {
    table.push_back(std::move(o.result));
    rep.checks.push_back(std::move(o.check));
  }
  rep.results["rows"] = std::move(table);
  Json bounds = Json::array();
  for (int m = 11; m <= 20; ++m) bounds.push_back(bounds_json(m));
  rep.results["bound_thm1"] = std::move(bounds);
}

void cmd_certify(RunReport& rep, int n, int r, long long m_cap, const fs::path& out) {
  CertifyOptions o;
  o.exponents.m_cap = m_cap;
  Check ck{"certify count", false, ""};
  try {
    OvalSystem sys;
    const CycleCertificate c = certify(n, r, o, &sys);
    rep.results["certificate"] = to_json(c);
    ck.passed = c.count == cycles_prop2(n, r);
    ck.detail = std::to_string(c.count) + " vs " + std::to_string(cycles_prop2(n, r));
    for (const auto& ao : sys.annuli)
      for (std::size_t i = 0; i < ao.outer.size(); ++i)
        write_oval_csv(ao.outer[i], out / "ovals" / (annulus_name(ao.annulus->center) + "_" + index_name(static_cast<int>(i)) + ".csv"));
  } catch (const ExponentCapExceeded& e) {
    rep.results["error"] = {{"type", "ExponentCapExceeded"}, {"stage", e.stage()}, {"condition", e.condition()}, {"what", e.what()}};
    ck.detail = e.what();
  } catch (const Error& e) {
    rep.results["error"] = {{"type", "Error"}, {"what", e.what()}};
    ck.detail = e.what();
  }
  rep.checks.push_back(std::move(ck));
}

void cmd_verify(RunReport& rep, int n, int r, const std::vector<double>& eps_scan, const fs::path& out) {
  OvalSystem sys;
  const CycleCertificate c = certify(n, r, {}, &sys);
  VerifyOptions vo;
  if (!eps_scan.empty()) vo.eps_scan = eps_scan;
  const VerifyReport v = verify_certificate(c, sys, vo);
  rep.results["certificate"] = to_json(c);
  rep.results["verification"] = to_json(v);
  for (const auto& av : v.annuli)
    if (!av.cycles.profile.samples.empty())
      write_profile_csv(av.cycles.profile, out / "profiles" / (annulus_name(av.center) + ".csv"));
  rep.checks.push_back({"signs match at some scanned eps", v.accepted_eps.has_value(),
                        v.accepted_eps ? "eps = " + Json(*v.accepted_eps).dump() : "no eps matched"});
  const long long total = v.simulated_cycles + v.certificate_only_cycles;
  rep.checks.push_back({"cycle count", v.accepted_eps && total >= c.count,
                        std::to_string(v.simulated_cycles) + " simulated + " + std::to_string(v.certificate_only_cycles) +
                            " certificate-only vs " + std::to_string(c.count)});
  rep.checks.push_back({"first-order law", v.law_holds, "worst relative error " + Json(v.worst_law_error).dump()});
}

void cmd_hopf(RunReport& rep, const std::string& family) {
  if (family == "m4") {
    const HopfResult h = hopf_analysis([](double a) { return example_m4(a); }, {1.0, 1.0}, -2.0, 0.0);
    rep.results["hopf"] = to_json(h);
    rep.checks.push_back({"trace zero at a = -1", std::fabs(h.param + 1.0) < 1e-12, Json(h.param).dump()});
    rep.checks.push_back({"det > 0", h.det > 0.0, Json(h.det).dump()});
    rep.checks.push_back({"first Lyapunov sign positive", h.lyapunov_sign == 1, Json(h.c3).dump()});
    const M4CycleResult m = verify_m4_cycles(0.05);
    rep.results["cycles"] = to_json(m);
    rep.checks.push_back({"two cycles at delta = 0.05", m.count == 2, m.diagnostics});
    rep.checks.push_back({"mirror Hausdorff <= 1e-6", m.hausdorff <= 1e-6, Json(m.hausdorff).dump()});
  } else {
    const double a5 = 3.0 - 4.0 * std::sqrt(5.0) / 3.0;
    const HopfResult h =
        hopf_analysis([&](double b) { return example_m5(a5 - (b + 1.0), b); }, {1.0, 1.0}, -1.5, -0.5);
    rep.results["hopf"] = to_json(h);
    rep.results["reversibility_residual"] = check_reversibility(example_m5(a5, -1.0)).residual();
    rep.checks.push_back({"trace zero at b = -1", std::fabs(h.param + 1.0) < 1e-12, Json(h.param).dump()});
    rep.checks.push_back({"det > 0", h.det > 0.0, Json(h.det).dump()});
    rep.checks.push_back({"order-two weak focus", h.order_two, "c3 = " + Json(h.c3).dump()});
  }
}

void cmd_bounds(RunReport& rep, int m) {
  const Json b = bounds_json(m);
  rep.results["bounds"] = b;
  if (b.contains("cycles_at_optimal_split"))
    rep.checks.push_back({"optimal split meets the bound", b["cycles_at_optimal_split"].get<double>() >= b["refined"].get<double>(),
                          b["cycles_at_optimal_split"].dump() + " vs " + b["refined"].dump()});
}

void cmd_dump_ovals(RunReport& rep, int n, int r, const fs::path& out) {
  OvalSystem sys;
  const CycleCertificate c = certify(n, r, {}, &sys);
  Json files = Json::array();
  for (const auto& ao : sys.annuli) {
    const std::string base = annulus_name(ao.annulus->center);
    auto dump = [&](const Oval& o, int index) {
      const fs::path rel = fs::path("ovals") / (base + "_" + index_name(index) + ".csv");
      write_oval_csv(o, out / rel);
      files.push_back({{"file", rel.string()}, {"index", index}, {"h", o.h}, {"vertices", o.points.size()}});
    };
    for (std::size_t q = 0; q < ao.inner.size(); ++q) dump(ao.inner[q], -static_cast<int>(q + 1));
    for (std::size_t i = 0; i < ao.outer.size(); ++i) dump(ao.outer[i], static_cast<int>(i));
  }
  rep.results["count"] = c.count;
  rep.results["files"] = std::move(files);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit cycles of few-monomial planar polynomial vector fields"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "mcyc_out";
  app.add_option("--out", out_dir, "Output directory for report.json and CSV files");
  app.set_version_flag("--version", kToolVersion);

  int n = 1, r = 0, m = 10;
  long long m_cap = ExponentOptions{}.m_cap;
  std::vector<int> rows;
  std::vector<double> eps_scan;
  std::string family = "m4";

  auto* certify_cmd = app.add_subcommand("certify", "Certify 2n(r+1) + n(1+(-1)^r) limit cycles of X_{n,r}");
  certify_cmd->add_option("--n", n, "Number of perturbation stages, n >= 1")->required()->check(CLI::Range(1, 64));
  certify_cmd->add_option("--r", r)->required()->check(CLI::NonNegativeNumber);
  certify_cmd->add_option("--m-cap", m_cap, "Largest exponent tried per stage")->check(CLI::PositiveNumber);

  auto* table_cmd = app.add_subcommand("table1", "Reproduce the lower-bound column for m = 4..10");
  table_cmd->add_option("--rows", rows, "Subset of m values")->delimiter(',');

  auto* verify_cmd = app.add_subcommand("verify", "Certify, then check the certificate by simulation");
  verify_cmd->add_option("--n", n, "Number of perturbation stages, n >= 1")->required()->check(CLI::Range(1, 64));
  verify_cmd->add_option("--r", r)->required()->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--eps-scan", eps_scan, "Perturbation sizes, largest accepted")->delimiter(',');

  auto* hopf_cmd = app.add_subcommand("hopf", "Hopf analysis of the 4- and 5-monomial examples");
  hopf_cmd->add_option("--family", family)->check(CLI::IsMember({"m4", "m5"}));

  auto* bounds_cmd = app.add_subcommand("bounds", "Quadratic lower bound and optimal split for m monomials");
  bounds_cmd->add_option("--m", m)->required()->check(CLI::Range(5, 100000));

  auto* dump_cmd = app.add_subcommand("dump-ovals", "Write every oval of a certified system as CSV");
  dump_cmd->add_option("--n", n, "Number of perturbation stages, n >= 1")->required()->check(CLI::Range(1, 64));
  dump_cmd->add_option("--r", r)->required()->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  RunReport rep;
  for (int i = 1; i < argc; ++i) rep.command.emplace_back(argv[i]);
  const fs::path out(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*certify_cmd) cmd_certify(rep, n, r, m_cap, out);
    if (*table_cmd) cmd_table1(rep, rows);
    if (*verify_cmd) cmd_verify(rep, n, r, eps_scan, out);
    if (*hopf_cmd) cmd_hopf(rep, family);
    if (*bounds_cmd) cmd_bounds(rep, m);
    if (*dump_cmd) cmd_dump_ovals(rep, n, r, out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    rep.results["error"] = e.what();
    rep.checks.push_back({"run", false, e.what()});
  }
  rep.timing["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.timing["threads"] = thread_count();
  write_report(rep, out);

  for (const auto& c : rep.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  std::cout << "report: " << (out / "report.json").string() << '\n';
  return rep.all_passed() ? 0 : 1;
}
