#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int status = -1;
  Json report;
};

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("mcyc_cli_test_" + name); }

Run run(const std::string& args, const std::string& name, const std::string& env = "") {
  const fs::path dir = scratch(name);
  fs::remove_all(dir);
  const std::string cmd = env + " \"" MCYC_CLI_PATH "\" " + args + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
  Run r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(dir / "report.json");
  if (in) in >> r.report;
  return r;
}

Json without_timing(Json j) {
  j.erase("timing");
  j.erase("command");
  return j;
}

}  // namespace

TEST_CASE("certify reports are byte-identical apart from timing") {
  Run a = run("certify --n 1 --r 0", "det_a");
  Run b = run("certify --n 1 --r 0", "det_b");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(without_timing(a.report).dump() == without_timing(b.report).dump());
  CHECK(a.report["results"]["certificate"]["count"] == 4);
  CHECK(a.report["passed"] == true);
  CHECK(a.report["adopted_reading"].get<std::string>().find("Q_r") != std::string::npos);
  CHECK(fs::exists(scratch("det_a") / "ovals"));
  for (const auto& row : a.report["results"]["certificate"]["table"])
    for (const auto& e : row["entries"]) {
      const std::string m = e["method"];
      CHECK((m == "quadrature" || m == "certificate"));
    }
}

TEST_CASE("table1 rows are independent of the thread count") {
  Run one = run("table1 --rows 5,6", "t1", "MCYC_THREADS=1");
  Run four = run("table1 --rows 5,6", "t4", "MCYC_THREADS=4");
  REQUIRE(one.status == 0);
  REQUIRE(four.status == 0);
  CHECK(without_timing(one.report).dump() == without_timing(four.report).dump());
  REQUIRE(one.report["results"]["rows"].size() == 2);
  CHECK(one.report["results"]["rows"][0]["achieved"] == 4);
  CHECK(one.report["results"]["rows"][1]["achieved"] == 8);
  CHECK(one.report["timing"]["threads"] == 1);
}

TEST_CASE("usage errors and failed checks exit nonzero") {
  CHECK(run("certify --n 0 --r 1", "bad_n").status != 0);
  Run capped = run("certify --n 4 --r 2 --m-cap 4096", "capped");
  CHECK(capped.status == 1);
  CHECK(capped.report["results"]["error"]["type"] == "ExponentCapExceeded");
  CHECK(capped.report["results"]["error"]["stage"] == 4);
  CHECK(capped.report["passed"] == false);
}

TEST_CASE("bounds") {
  Run r = run("bounds --m 10", "bounds");
  REQUIRE(r.status == 0);
  const Json& b = r.report["results"]["bounds"];
  CHECK(b["simplified"] == 12.0);
  CHECK(b["refined"] == 12.0);
  CHECK(b["optimal_r"] == 5);
  CHECK(b["method"] == "exact");
}

TEST_CASE("verify writes profiles") {
  Run r = run("verify --n 1 --r 0", "verify");
  REQUIRE(r.status == 0);
  CHECK(r.report["results"]["verification"]["simulated_cycles"]["value"].get<long long>() >= 4);
  CHECK(r.report["results"]["verification"]["simulated_cycles"]["method"] == "simulation");
  CHECK(fs::exists(scratch("verify") / "profiles" / "xp0_yp1.csv"));
}
