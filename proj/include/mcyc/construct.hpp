#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcyc/abelian.hpp"
#include "mcyc/errors.hpp"
#include "mcyc/families.hpp"
#include "mcyc/geometry.hpp"

namespace mcyc {

class InfeasibleThresholds : public Error {
 public:
  using Error::Error;
};
class ExponentCapExceeded : public Error {
 public:
  ExponentCapExceeded(int stage, std::string condition, const std::string& what)
      : Error(what), stage_(stage), condition_(std::move(condition)) {}
  int stage() const { return stage_; }
  const std::string& condition() const { return condition_; }

 private:
  int stage_;
  std::string condition_;
};
class CancellationUnresolved : public Error {
 public:
  using Error::Error;
};
class CertificateFailed : public Error {
 public:
  CertificateFailed(int stage, const std::string& what) : Error(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

/// Period annuli of X_r around its centers on y = +-1, sorted by (y, x).
std::vector<std::shared_ptr<const PeriodAnnulus>> annuli_on_unit_lines(int r);

struct ThresholdOptions {
  double margin = 1e-3;   // A = least amplitude supremum - margin
  double min_gap = 1e-2;  // smallest admissible (A - 1) / (n + 2)
};

struct Thresholds {
  std::vector<double> a;        // a_0 = 1, a_1 .. a_n
  std::vector<double> targets;  // t_0 .. t_n
  double sup_amplitude = 0.0;   // A
};

/// t_i = 1 + (i + 1)(A - 1)/(n + 2) and a_i = (t_{i-1} + t_i)/2.
Thresholds choose_thresholds(const std::vector<std::shared_ptr<const PeriodAnnulus>>& annuli, int n,
                             const ThresholdOptions& opts = {});

struct AnnulusOvals {
  std::shared_ptr<const PeriodAnnulus> annulus;
  std::vector<Oval> outer;  // gamma_0 .. gamma_n, growing
  std::vector<Oval> inner;  // gamma_{-1} .. gamma_{-n}, shrinking; centers on x = 0 only
  bool on_axis() const { return annulus->center.x == 0.0; }
};

struct OvalSystem {
  int r = 0;
  int n = 0;
  Thresholds thresholds;
  std::vector<AnnulusOvals> annuli;
};

/// Outer ovals at the target amplitudes; checks interleaving and nesting.
OvalSystem build_oval_system(int r, int n, const std::vector<std::shared_ptr<const PeriodAnnulus>>& annuli,
                             const Thresholds& thresholds, const TraceOptions& trace = {});

/// Nesting by region containment: every vertex of `inside` lies in `outside`.
bool nested_in(const Oval& inside, const Oval& outside);

enum class SignMethod { quadrature, certificate };
const char* to_string(SignMethod m);

struct SignResolution {
  int sign = 0;  // 0: unresolved
  SignMethod method = SignMethod::quadrature;
  std::optional<IntegralValue> value;  // set when quadrature produced a trusted value
};

/// Quadrature first; on cancellation or an untrusted value, the sign certificate.
SignResolution resolve_sign(const SparsePoly2& R, const Oval& oval);

struct ExponentOptions {
  long long m_cap = 16384;
};

/// Least exponents m_1 < ... < m_n, each bracketed by doubling from
/// m_{k-1} + 1 and then bisected. Stage k requires sign (-1)^i of I(R_k, gamma_i)
/// for i in [0, k] on every annulus; for even r it also builds the stage-k inner
/// oval and requires sign (-1)^j of I(R_k, gamma_{-j}) for j < k.
PerturbationSpec select_exponents(const OvalSystem& system, const ExponentOptions& opts = {});

/// x-width bound for gamma_{-k}: x^2 < (2(n-k)+1)/(2(n-k)+3) b^(2(m_k - m_{k-1}))
/// a_{k-1}^(2 m_{k-1}) / a_k^(2 m_k), halved, where b is min |y| on the enclosing oval.
LogValue inner_xwidth_bound(const PerturbationSpec& spec, int k, double log_b);

/// Stage-k inner oval inside `enclosing`, certified single-signed for R_k.
Oval inner_oval_for_stage(const std::shared_ptr<const PeriodAnnulus>& annulus, const PerturbationSpec& spec, int k,
                          const Oval& enclosing);

/// Fills the inner ovals of the x = 0 annuli for even r; odd r is returned unchanged.
OvalSystem attach_inner_ovals(OvalSystem system, const PerturbationSpec& spec);

struct SignEntry {
  int index = 0;  // i for gamma_i, negative for inner ovals
  int sign = 0;
  SignMethod method = SignMethod::quadrature;
  std::optional<IntegralValue> value;
  // Inner ovals: sign certificate of the truncated R_k, k = -index.
  std::optional<SignCertificate> stage_certificate;
  double h = 0.0;
  LogValue energy;
  double alpha = 0.0;
  LogValue max_abs_x;
};

struct AnnulusSigns {
  Point2 center;
  std::vector<SignEntry> entries;  // innermost to outermost
  int sign_changes = 0;
};

struct CycleCertificate {
  int n = 0;
  int r = 0;
  PerturbationSpec spec;
  Thresholds thresholds;
  std::vector<AnnulusSigns> table;
  long long count = 0;
};

int sign_changes(const std::vector<SignEntry>& entries);

/// Sign table of I(R_n, .) over every oval of a complete system.
CycleCertificate tabulate(const OvalSystem& system, const PerturbationSpec& spec);

struct CertifyOptions {
  ThresholdOptions thresholds;
  ExponentOptions exponents;
  TraceOptions trace;
};

/// annuli -> thresholds -> ovals -> exponents -> inner ovals -> sign table.
CycleCertificate certify(int n, int r, const CertifyOptions& opts = {});
/// certify() that also returns the oval system it was built on.
CycleCertificate certify(int n, int r, const CertifyOptions& opts, OvalSystem* system_out);

}  // namespace mcyc
