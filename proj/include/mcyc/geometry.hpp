#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "mcyc/errors.hpp"
#include "mcyc/families.hpp"
#include "mcyc/log_value.hpp"
#include "mcyc/poly.hpp"

namespace mcyc {

class NoBoundingSaddle : public Error {
 public:
  using Error::Error;
};
class NotStarShaped : public Error {
 public:
  using Error::Error;
};
class LevelOutOfRange : public Error {
 public:
  using Error::Error;
};
class AmplitudeUnreachable : public Error {
 public:
  AmplitudeUnreachable(double lo, double hi, const std::string& what) : Error(what), lo_(lo), hi_(hi) {}
  double range_lo() const { return lo_; }
  double range_hi() const { return hi_; }

 private:
  double lo_, hi_;
};
class Degenerate : public Error {
 public:
  using Error::Error;
};

/// log |c + e^s v| without forming e^s v when it underflows.
double log_abs_offset(double c, double s, double v);

/// Nested closed level curves of H around a nondegenerate center.
///
/// Energies are measured as E = sigma (h - h_center) > 0, so an annulus around a
/// maximum of H (sigma = -1) is handled like one around a minimum.
struct PeriodAnnulus {
  Point2 center;
  Rational cx, cy;  // center used for the exact local expansion
  double h_center = 0.0;
  double h_sep = 0.0;
  int orientation_sign = 1;  // +1: minimum of H, counterclockwise flow
  SparsePoly2 H;
  SparsePoly2 G;  // H(c + d) - H(c), exact when H and c are
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;  // Hessian of H at the center

  /// sigma (h_sep - h_center) > 0.
  double sep_energy() const { return orientation_sign * (h_sep - h_center); }
  /// Largest energy a traced oval may use.
  double max_energy() const { return sep_energy() * (1.0 - 1e-6); }
};

/// A closed curve sampled on a uniform angle grid about `center`.
///
/// Vertices are center + e^log_scale * local[i]; the scaled form keeps ovals of
/// astronomically small size resolvable. `tangent` holds d(local)/dtheta and is
/// empty for raw polylines.
struct Oval {
  std::shared_ptr<const PeriodAnnulus> annulus;
  double h = 0.0;
  LogValue energy;  // sigma (h - h_center)
  Point2 center;
  double log_scale = 0.0;
  std::vector<Point2> local;
  std::vector<Point2> tangent;
  std::vector<Point2> points;
  double alpha = 0.0;  // max |y| on the curve
  double b_min = 0.0;  // min |y| on the curve
  double log_alpha = 0.0;
  double log_b_min = 0.0;
  LogValue max_abs_x;
  LogValue min_abs_x;  // zero when the curve meets x = 0
  double area = 0.0;  // signed, double range
  LogValue log_area;  // signed

  std::size_t size() const { return local.size(); }
  bool has_tangents() const { return !tangent.empty(); }
  double scale() const;
  /// log |x| and log |y| of vertex i, accurate for tiny log_scale.
  double log_abs_x(std::size_t i) const { return log_abs_offset(center.x, log_scale, local[i].x); }
  double log_abs_y(std::size_t i) const { return log_abs_offset(center.y, log_scale, local[i].y); }
};

struct TraceOptions {
  std::size_t n_vertices = 1024;
  bool adaptive = true;
  double area_rel_tol = 1e-10;
  std::size_t max_vertices = 1u << 16;
  bool star_check = true;
};

/// Snaps `guess` to a nearby dyadic point where the gradient of H vanishes
/// exactly, builds the local expansion, and finds the bounding saddle level.
PeriodAnnulus find_annulus(const SparsePoly2& H, Point2 center, const std::vector<Point2>& saddles);

/// One point of the level curve at energy `energy` in direction theta, in local
/// (scaled) coordinates.
Point2 ray_point_local(const PeriodAnnulus& a, const LogValue& energy, double theta, double* tau = nullptr);

Oval trace_oval(std::shared_ptr<const PeriodAnnulus> a, double h, const TraceOptions& opts = {});
Oval trace_oval_energy(std::shared_ptr<const PeriodAnnulus> a, const LogValue& energy, const TraceOptions& opts = {});

/// max |y| on the oval at `energy`, without tracing the full curve.
double amplitude_at(const PeriodAnnulus& a, double energy);
Oval oval_by_amplitude(std::shared_ptr<const PeriodAnnulus> a, double target_alpha, const TraceOptions& opts = {});

/// Oval around a center on x = 0 with max |x| <= xbound.
Oval shrink_to_xwidth(std::shared_ptr<const PeriodAnnulus> a, const LogValue& xbound, const TraceOptions& opts = {});

/// Polygon oval with no tangents and no annulus; orientation is kept as given.
Oval oval_from_polyline(std::vector<Point2> points);
/// Same curve traversed backwards.
Oval reversed(const Oval& oval);

double signed_area(const std::vector<Point2>& poly);
/// Crossing-number test; points on the boundary count as outside.
bool point_in_polygon(const std::vector<Point2>& poly, Point2 p);

/// "# h=..., center=(..), alpha=..." followed by "x,y" rows.
void write_oval_csv(std::ostream& out, const Oval& oval);

}  // namespace mcyc
