#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "mcyc/dynamics.hpp"

namespace mcyc {

using Json = nlohmann::ordered_json;

extern const char* const kToolVersion;

/// Method tags carried by every numeric result.
namespace method {
inline constexpr const char* quadrature = "quadrature";
inline constexpr const char* certificate = "certificate";
inline constexpr const char* simulation = "simulation";
inline constexpr const char* exact = "exact";  // closed-form arithmetic
}  // namespace method

Json to_json(const LogValue& v);
Json to_json(const CycleCertificate& c);
Json to_json(const VerifyReport& v);
Json to_json(const HopfResult& h);
Json to_json(const M4CycleResult& m);
Json bounds_json(int m);

/// Named pass/fail outcome of one claim.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// One CLI run. Everything except `timing` is a function of the command line.
struct RunReport {
  std::vector<std::string> command;
  Json results = Json::object();
  std::vector<Check> checks;
  Json timing = Json::object();

  bool all_passed() const;
  Json to_json() const;
};

/// Writes report.json into `dir`, creating it if needed.
void write_report(const RunReport& r, const std::filesystem::path& dir);
/// x,y per vertex.
void write_oval_csv(const Oval& o, const std::filesystem::path& file);
/// energy,h,d,period,ok per sample.
void write_profile_csv(const DisplacementProfile& p, const std::filesystem::path& file);

}  // namespace mcyc
