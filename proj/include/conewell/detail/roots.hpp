#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "conewell/errors.hpp"

namespace conewell::detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Brent's method on a bracket [a, b] with f(a), f(b) of opposite sign.
/// Stops when the bracket is narrower than xtol (plus a few ulps of the root).
template <class F>
double brent(F&& f, double a, double b, double fa, double fb, double xtol,
             int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (sign_of(fa) == sign_of(fb))
    throw convergence_error("brent: bracket [" + std::to_string(a) + ", " +
                            std::to_string(b) + "] has no sign change");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (sign_of(fb) == sign_of(fc)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      const double min1 = 3.0 * xm * q - std::fabs(tol * q);
      const double min2 = std::fabs(e * q);
      if (2.0 * p < (min1 < min2 ? min1 : min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (xm > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw convergence_error("brent: iteration budget exhausted");
}

template <class F>
double brent(F&& f, double a, double b, double xtol) {
  const double fa = f(a);
  const double fb = f(b);
  return brent(f, a, b, fa, fb, xtol);
}

/// Plain bisection where only the endpoint signs are known (the endpoints may
/// sit on poles). Returns the midpoint of the final bracket.
template <class F>
double bisect_signs(F&& f, double lo, double hi, int sign_lo, double rel_tol,
                    double abs_tol = 0.0) {
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::fabs(mid) + abs_tol || mid == lo || mid == hi)
      return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace conewell::detail
