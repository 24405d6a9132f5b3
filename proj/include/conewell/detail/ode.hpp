#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "conewell/errors.hpp"

namespace conewell::detail {

template <std::size_t N>
using State = std::array<double, N>;

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1.
/// Error per step is controlled against atol + rtol * max(|y_i|, |y|_inf), so a
/// component passing through zero does not force tiny steps.
template <std::size_t N, class F>
State<N> integrate_dopri5(F&& f, double t0, double t1, State<N> y, double rtol,
                          double atol, long max_steps = 2'000'000) {
  if (t1 == t0) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double h = dir * std::min(std::fabs(t1 - t0), 1e-2);
  double t = t0;

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  State<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
  for (long step = 0; step < max_steps; ++step) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                           a54 * k4[i]);
    k5 = f(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                            b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + h, ynew);

    double ymax = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      ymax = std::max({ymax, std::fabs(y[i]), std::fabs(ynew[i])});
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = atol + rtol * ymax;
      err = std::max(err, std::fabs(e) / sc);
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      if (dir * (t - t1) >= 0.0) return y;
    }
    const double fac =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (std::fabs(h) < 1e-14 * std::max(1.0, std::fabs(t)))
      throw convergence_error("dopri5: step size underflow");
  }
  throw convergence_error("dopri5: step budget exhausted");
}

}  // namespace conewell::detail
