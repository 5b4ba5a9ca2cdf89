#pragma once

#include <vector>

#include "mcyc/errors.hpp"
#include "mcyc/geometry.hpp"
#include "mcyc/log_value.hpp"
#include "mcyc/poly.hpp"

namespace mcyc {

/// An integral over a closed curve. `value` and `err_estimate` are the double
/// images of `log_form` and `log_err`; they under/overflow where the log forms
/// do not.
struct IntegralValue {
  double value = 0.0;
  double err_estimate = 0.0;
  LogValue log_form;
  LogValue log_err;

  /// |value| > factor * err, compared in log form.
  bool sign_trusted(double factor = 10.0) const;
};

class CatastrophicCancellation : public Error {
 public:
  CatastrophicCancellation(IntegralValue partial, const std::string& what) : Error(what), partial_(partial) {}
  const IntegralValue& partial() const { return partial_; }

 private:
  IntegralValue partial_;
};

/// Closed-curve integral of f dy - g dx. Uses the spectral rule on traced
/// ovals and the chord trapezoid rule on raw polylines; the error estimate is
/// the change against every other vertex.
IntegralValue line_integral(const SparsePoly2& f, const SparsePoly2& g, const Oval& oval);

/// Closed-curve integral of R dy, which equals the area integral of dR/dx.
/// Every vertex/term product is formed in log form and accumulated in separate
/// positive and negative groups.
///
/// Throws CatastrophicCancellation when the groups agree to within the last
/// three significant digits of a double and the error estimate exceeds |value|.
IntegralValue green_integral(const SparsePoly2& R, const Oval& oval);

/// green_integral of each term of R separately, in term order.
std::vector<IntegralValue> term_integrals(const SparsePoly2& R, const Oval& oval);

/// Sum of per-term integrals; errors add.
IntegralValue sum_integrals(const std::vector<IntegralValue>& parts);

/// green_integral with the oval retraced at doubled vertex counts until the
/// sign is trusted or `max_vertices` is reached. Needs an oval with an annulus.
IntegralValue green_integral_refined(const SparsePoly2& R, const Oval& oval, std::size_t max_vertices = 1u << 18);

enum class SignCertificate { positive, negative, inconclusive };
const char* to_string(SignCertificate c);

/// Positive/negative when one term of dR/dx dominates the sum of all terms of
/// possibly opposite sign on the whole enclosed region. After dividing out the
/// common monomial factor, every term is monotone in |x| and |y|, so the
/// region-wide claim reduces to log comparisons at the corners of the region's
/// |x|, |y| bounding box. Every vertex is checked as well.
SignCertificate sign_certificate(const SparsePoly2& R, const Oval& oval);

}  // namespace mcyc
