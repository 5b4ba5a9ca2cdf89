#pragma once

#include <string>
#include <vector>

#include "mcyc/errors.hpp"
#include "mcyc/poly.hpp"

namespace mcyc {

/// How the Q_r factor of X_r is expanded.
///
/// `product`: Q_r = prod_{k=-r}^{r} (x - k), so the k = 0 factor is the
/// leading x and Q_r has r + 1 monomials. Simple roots at every integer in
/// [-r, r]; this is the reading used by every certificate.
///
/// `literal_leading_x`: x * prod_{k=-r}^{r} (x - k). Double root at 0, so
/// Q_r'(0) = 0 and the singularities on x = 0 degenerate. Kept only for
/// documentation.
enum class QrReading { product, literal_leading_x };

/// Stated in every report that depends on X_r.
extern const char* const kAdoptedReadingNote;

class NotHamiltonian : public Error {
 public:
  NotHamiltonian(SparsePoly2 residual)
      : Error("field is not Hamiltonian: divergence = " + residual.str()), residual_(std::move(residual)) {}
  const SparsePoly2& residual() const { return residual_; }

 private:
  SparsePoly2 residual_;
};

SparsePoly2 build_qr(int r, QrReading reading = QrReading::product);
/// X_r = (y - y^3, Q_r(x)).
PlanarField build_xr(int r, QrReading reading = QrReading::product);

/// H with H(0,0) = 0, -dH/dy = P and dH/dx = Q, verified formally.
SparsePoly2 hamiltonian_of(const PlanarField& field);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

enum class SingularKind { center, saddle, degenerate, focus_candidate };
const char* to_string(SingularKind kind);

struct SingularityReport {
  Point2 point;
  double det = 0.0;
  double trace = 0.0;
  SingularKind kind = SingularKind::degenerate;
};

struct CellFailure {
  std::size_t cell_index;
  std::string reason;
};

struct SingularityScan {
  std::vector<SingularityReport> points;  // sorted by (y, x)
  std::vector<CellFailure> failures;
};

struct ClassifyOptions {
  double cell_size = 0.125;
  double degenerate_rel = 1e-8;
};

/// Common real zeros of P and Q inside `box`, each classified by its Jacobian.
SingularityScan classify_singularities(const PlanarField& field, const Box& box, const ClassifyOptions& opts = {});

struct Jacobian {
  double px, py, qx, qy;
  double det() const { return px * qy - py * qx; }
  double trace() const { return px + qy; }
};
Jacobian jacobian_at(const PlanarField& field, double x, double y);

/// 2 (-1)^(r-j) prod_{k=-r, k!=j}^{r} |j - k|, exact.
Rational det_formula(int r, int j);

/// Thresholds a_0..a_n and exponents m_0..m_n of
/// R_n = sum_k (-1)^k x^(2(n-k)+1) (y/a_k)^(2 m_k).
struct PerturbationSpec {
  int n = 0;
  std::vector<double> a;
  std::vector<long long> m;

  /// Throws std::invalid_argument if the ordering invariants fail.
  void validate() const;
};

SparsePoly2 build_rn(const PerturbationSpec& spec);
/// R_n truncated after term `k` (the stage-k polynomial R_k of the
/// construction, still with x-exponents 2(n-j)+1).
SparsePoly2 build_rn_stage(const PerturbationSpec& spec, int k);
/// X_{n,r} = (y - y^3 + eps R_n, Q_r).
PlanarField build_perturbed(int r, const PerturbationSpec& spec, double eps);

/// (a x^2 y^4 - a, x^2 y^2 - 1)
PlanarField example_m4(double a);
/// (a y^6 + b x^2 y^4 - (a + b), x^2 y^2 - 1)
PlanarField example_m5(double a, double b);

/// 2n(r+1) + n(1 + (-1)^r)
long long cycles_prop2(int n, int r);

struct QuadraticBound {
  double simplified;  // m^2/2 - 3m - 8
  double refined;     // simplified + (9/4)(1 - (-1)^m)
};
QuadraticBound bound_thm1(int m);
/// m/2 + ((-1)^m - 1)/4
int optimal_r(int m);

}  // namespace mcyc
