#pragma once

#include <cmath>
#include <sstream>

#include "fieldconc/errors.hpp"

namespace fieldconc::detail {

template <class F>
double simpson(const F& f, double a, double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  // Subdivision exhausted in floating point: accept the refined estimate.
  if (!(a < lm && lm < m && m < rm && rm < b)) return left + right + err / 15.0;
  if (depth <= 0) {
    // A near-point interval contributes O(width * f); chasing an endpoint
    // jump any further cannot move the total.
    if (std::abs(b - a) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)))
      return left + right + err / 15.0;
    std::ostringstream os;
    os << "adaptive quadrature did not converge on [" << a << ", " << b
       << "], residual " << std::abs(err);
    throw NumericFailureError(os.str());
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson on [a, b] to absolute tolerance tol. The integrand must be
/// smooth on the interior; split at kinks before calling.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-11, int max_depth = 48) {
  if (!(a <= b)) throw InvalidInputError("integrate: requires a <= b");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace fieldconc::detail
