#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcyc/construct.hpp"
#include "mcyc/ode.hpp"

namespace mcyc {

class CycleNotFound : public Error {
 public:
  using Error::Error;
};
class FitUnstable : public Error {
 public:
  using Error::Error;
};

/// Vertical ray x = x_c, y > y_c through an annulus center, parameterized by
/// the energy E = sigma (H - h_center).
class Transversal {
 public:
  explicit Transversal(std::shared_ptr<const PeriodAnnulus> a);
  Point2 point_at(double energy) const;
  /// Distance s above the center at which the ray meets the level.
  double offset_at(double energy) const;
  double energy_of(const Point2& p) const;
  double energy_at_offset(const Point2& local) const;
  const PeriodAnnulus& annulus() const { return *a_; }

 private:
  std::shared_ptr<const PeriodAnnulus> a_;
};

struct DisplacementSample {
  double energy = 0.0;
  double h = 0.0;
  double d = 0.0;  // return minus start, in h units
  double period = 0.0;
  bool ok = false;
  std::string error;  // NoReturn / StepUnderflow message when !ok
};

struct DisplacementProfile {
  Point2 center;
  double eps = 0.0;
  std::vector<DisplacementSample> samples;
};

/// X in coordinates centered on the annulus. Exact terms of low degree are
/// re-expanded about the center; all others are evaluated at absolute coordinates.
PlanarRhs centered_rhs(const PlanarField& X, const PeriodAnnulus& a);

/// d at one energy: start on the transversal, integrate to the next crossing in
/// the same direction, located to |dx| < 1e-12 min(1, s). `f` is centered_rhs.
DisplacementSample displacement(const PlanarRhs& f, const Transversal& sigma, double energy, const OdeControls& c = {});

DisplacementProfile displacement_profile_energy(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                                                const std::vector<double>& energies, double eps,
                                                const OdeControls& c = {});
/// Same, with samples given as levels h in (h_center, h_sep).
DisplacementProfile displacement_profile(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                                         const std::vector<double>& h_samples, double eps, const OdeControls& c = {});

/// |d| at or below this is indistinguishable from integration error.
double displacement_floor(double energy, const OdeControls& c);

struct CycleCount {
  DisplacementProfile profile;
  std::vector<double> zero_energies;
  std::vector<double> zero_h;
  std::size_t count() const { return zero_energies.size(); }
};

/// Zeros of d between adjacent samples of opposite definite sign, bisected to
/// an energy bracket below min(1e-8, 1e-4 E).
CycleCount count_cycles(const PlanarField& X_eps, std::shared_ptr<const PeriodAnnulus> a,
                        const std::vector<double>& energies, double eps, const OdeControls& c = {});

struct ReversibilityResult {
  SparsePoly2 residual_p;  // P(-x,-y) - P(x,y)
  SparsePoly2 residual_q;
  bool exact = false;     // every coefficient rational
  double grid_max = 0.0;  // max of |D phi X(x,y) + X(-x,-y)| on the sample grid
  double residual() const { return residual_p.is_zero() && residual_q.is_zero() ? 0.0 : grid_max; }
};

/// Reversibility with respect to the origin: D phi X(x,y) = -X(phi(x,y)), phi = -id.
ReversibilityResult check_reversibility(const PlanarField& X);

struct HopfOptions {
  std::vector<double> radii;  // empty: 16 radii geometric in [0.02, 0.08]
  double order_two_ratio = 1e-3;
  OdeControls ode{.rtol = 1e-16, .atol = 1e-18, .h_min = 1e-17};  // long double integration
};

struct HopfResult {
  double param = 0.0;  // where trace(DX(p)) = 0
  double trace = 0.0;
  double det = 0.0;
  int lyapunov_sign = 0;  // sign of c3, or of c5 when c3 is negligible
  double c3 = 0.0;
  double c5 = 0.0;
  std::vector<double> radii;
  std::vector<double> displacements;
  bool order_two = false;  // |c3 rho^3| <= ratio |d(rho)| at every fit radius
};

using FieldFamily = std::function<PlanarField(double)>;

/// Return map d(rho) = x_return - x_start on the ray p + (rho, 0).
double focus_displacement(const PlanarField& X, Point2 p, double rho, const OdeControls& c = {});

/// Locates the zero of trace(DX(p)) over [lo, hi] and fits
/// d(rho) ~ c3 rho^3 + ... + c9 rho^9 at that parameter, with d from a long
/// double integration.
HopfResult hopf_analysis(const FieldFamily& family, Point2 p, double lo, double hi, const HopfOptions& opts = {});

struct M4CycleResult {
  int count = 0;
  double radius = 0.0;  // fixed point rho of the return map around (1, 1)
  double mirror_radius = 0.0;
  double hausdorff = 0.0;  // between the mirrored cycle around (1, 1) and the cycle around (-1, -1)
  std::vector<Point2> cycle;
  std::string diagnostics;
};

/// Limit cycles of example_m4(-(1 + delta)) around (1, 1) and (-1, -1).
M4CycleResult verify_m4_cycles(double delta, const OdeControls& c = {.rtol = 1e-13, .atol = 1e-15});

/// max over a of min over b of the distance to polyline b, symmetrized.
double hausdorff_polyline(const std::vector<Point2>& a, const std::vector<Point2>& b);

// Verification of a certificate by simulation.

struct VerifyOptions {
  std::vector<double> eps_scan{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  std::vector<double> law_eps{1e-3, 5e-4};
  double law_tol = 0.1;
  double min_width = 1e-6;    // ovals narrower than this are certificate-only
  int samples_between = 3;    // extra profile energies between adjacent ovals
  OdeControls ode{.rtol = 1e-13, .atol = 1e-15};
};

struct OvalCheck {
  int index = 0;
  double energy = 0.0;
  int certified_sign = 0;
  bool certificate_only = false;
  double integral = 0.0;      // I(h) of the normalized perturbation
  double integral_err = 0.0;
  std::vector<double> d;      // per scanned eps, NaN when skipped
  std::vector<double> law_d;  // per law eps
  double kappa = 0.0;
  double law_error = 0.0;     // |d/eps - I kappa| / |I kappa| at the first law eps
  bool law_checked = false;
};

struct AnnulusVerification {
  Point2 center;
  std::vector<OvalCheck> ovals;  // innermost to outermost, as in the certificate
  CycleCount cycles;             // at the accepted eps
  int certificate_only_changes = 0;
};

struct EpsOutcome {
  double eps = 0.0;
  bool signs_match = false;
  long long profile_sign_changes = 0;
};

struct VerifyReport {
  double log_scale = 0.0;  // R is divided by e^log_scale
  std::vector<EpsOutcome> scan;
  std::optional<double> accepted_eps;
  long long simulated_cycles = 0;
  long long certificate_only_cycles = 0;
  long long certified_count = 0;
  bool law_holds = false;
  double worst_law_error = 0.0;
  std::vector<AnnulusVerification> annuli;
};

/// log of the largest |R| over all outer-oval vertices (sum of term magnitudes).
double perturbation_log_scale(const SparsePoly2& R, const OvalSystem& system);
SparsePoly2 scaled(const SparsePoly2& R, double log_scale);

VerifyReport verify_certificate(const CycleCertificate& cert, const OvalSystem& system, const VerifyOptions& opts = {});

}  // namespace mcyc
