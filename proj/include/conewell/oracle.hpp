#pragma once

// Brute-force verifiers that share no numerics with the main solvers: a
// finite-volume discretization of the polar equation and a radial shooting
// solver on a fixed-step RK4 integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "conewell/errors.hpp"

namespace conewell {

struct OracleResult {
  std::vector<double> eigenvalues;  ///< ascending
  long resolution = 0;              ///< finest grid size or step count
  double error_estimate = 0.0;
  bool resolution_warning = false;  ///< error estimate above 1e-3
};

namespace oracle_detail {

/// Number of eigenvalues below x of the symmetric tridiagonal matrix with
/// diagonal d and off-diagonal e (e[0] unused).
inline long sturm_count(const std::vector<double>& d,
                        const std::vector<double>& e, double x) {
  long count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i] * e[i] / q;
    q = d[i] - x - off;
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

/// The `count` smallest eigenvalues by bisection on the Sturm count.
inline std::vector<double> tridiag_lowest(const std::vector<double>& d,
                                          const std::vector<double>& e,
                                          int count) {
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = (i > 0 ? std::fabs(e[i]) : 0.0) +
                     (i + 1 < d.size() ? std::fabs(e[i + 1]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(b));
         ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(d, e, mid) > k)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

/// mu = lambda(lambda+1) eigenvalues of the polar operator on (0, theta0) with
/// N cells: vertex grid theta_i = i h, Dirichlet at theta0, a half control
/// volume at the pole for m = 0 and Dirichlet there for m >= 1.
inline std::vector<double> polar_eigenvalues(double theta0, int m, int count,
                                             long N) {
  const double h = theta0 / static_cast<double>(N);
  const long first = m == 0 ? 0 : 1;
  const long last = N - 1;
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  std::vector<double> diag(n), off(n, 0.0), weight(n);
  const double m2 = static_cast<double>(m) * m;
  for (long i = first; i <= last; ++i) {
    const std::size_t row = static_cast<std::size_t>(i - first);
    const double th = i * h;
    const double s_plus = std::sin(th + 0.5 * h);
    if (i == 0) {
      diag[row] = s_plus / h;
      weight[row] = 1.0 - std::cos(0.5 * h);
    } else {
      const double s_minus = std::sin(th - 0.5 * h);
      diag[row] = (s_plus + s_minus) / h + m2 * h / std::sin(th);
      weight[row] = std::cos(th - 0.5 * h) - std::cos(th + 0.5 * h);
    }
    if (row > 0) off[row] = -std::sin(th - 0.5 * h) / h;
  }
  // Symmetric form W^{-1/2} A W^{-1/2}.
  for (std::size_t r = 0; r < n; ++r) {
    diag[r] /= weight[r];
    if (r > 0) off[r] /= std::sqrt(weight[r] * weight[r - 1]);
  }
  return tridiag_lowest(diag, off, count);
}

inline double lambda_from_mu(double mu) {
  return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::max(mu, 0.0)));
}

}  // namespace oracle_detail

/// Angular eigenvalues lambda from the finite-volume polar operator at N, 2N
/// and 4N cells, Richardson-extrapolated assuming second-order convergence.
inline OracleResult angular_oracle(double theta0, int m, int count,
                                   long N = 2000) {
  if (!(theta0 > 0.0) || !(theta0 < std::numbers::pi))
    throw domain_error("angular_oracle: theta0 must lie in (0, pi)");
  if (m < 0 || count < 1) throw domain_error("angular_oracle: bad m or count");
  if (N < 2000) throw domain_error("angular_oracle: N must be >= 2000");
  std::array<std::vector<double>, 3> lam;
  for (int level = 0; level < 3; ++level) {
    const auto mu =
        oracle_detail::polar_eigenvalues(theta0, m, count, N << level);
    for (double v : mu) lam[level].push_back(oracle_detail::lambda_from_mu(v));
  }
  OracleResult res;
  res.resolution = N << 2;
  for (int k = 0; k < count; ++k) {
    const double l1 = lam[0][k], l2 = lam[1][k], l4 = lam[2][k];
    const double r_fine = l4 + (l4 - l2) / 3.0;
    const double r_coarse = l2 + (l2 - l1) / 3.0;
    res.eigenvalues.push_back(r_fine);
    res.error_estimate =
        std::max(res.error_estimate,
                 std::max(std::fabs(r_fine - r_coarse), std::fabs(l4 - l2) / 3.0));
  }
  res.resolution_warning = res.error_estimate > 1e-3;
  return res;
}

/// Unextrapolated lambda values at a single resolution, for convergence tests.
inline std::vector<double> angular_oracle_raw(double theta0, int m, int count,
                                              long N) {
  std::vector<double> out;
  for (double v : oracle_detail::polar_eigenvalues(theta0, m, count, N))
    out.push_back(oracle_detail::lambda_from_mu(v));
  return out;
}

struct RadialOracleOptions {
  double r_start = 1e-4;      ///< series start for the interior solution
  double cut_factor = 40.0;   ///< exterior starts at r = cut_factor / q
  double step = 2e-2;         ///< RK4 step in ln r times the local rate
  int scan_points = 400;      ///< uniform scan in q over the window
};

namespace oracle_detail {

using Vec2 = std::array<double, 2>;

/// Classic RK4 with a fixed number of steps.
template <class F>
Vec2 rk4(F&& f, double t0, double t1, Vec2 y, long steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  double t = t0;
  for (long s = 0; s < steps; ++s) {
    const Vec2 k1 = f(t, y);
    const Vec2 k2 = f(t + 0.5 * h, Vec2{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const Vec2 k3 = f(t + 0.5 * h, Vec2{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const Vec2 k4 = f(t + h, Vec2{y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    t = t0 + (s + 1) * h;
  }
  return y;
}

/// Normalized Wronskian of the regular interior and decaying exterior radial
/// solutions at r = 1. In t = ln r the radial equation reads
///   R'' + R' = (lambda(lambda+1) - r^2 (E - V)) R,  ' = d/dt.
inline double radial_mismatch(double lambda, double U0, double E,
                              const RadialOracleOptions& opt) {
  const double ll = lambda * (lambda + 1.0);
  const double k2 = U0 + E;
  const double q = std::sqrt(-E);

  auto inner = [ll, k2](double t, const Vec2& y) {
    const double r = std::exp(t);
    return Vec2{y[1], -y[1] + (ll - r * r * k2) * y[0]};
  };
  const double r0 = opt.r_start;
  const double c = k2 / (2.0 * (2.0 * lambda + 3.0));
  const double rl = std::pow(r0, lambda);
  Vec2 yin{rl * (1.0 - c * r0 * r0),
           rl * (lambda - (lambda + 2.0) * c * r0 * r0)};
  const double t0 = std::log(r0);
  const double rate_in = std::max({1.0, lambda, std::sqrt(std::max(k2, 0.0))});
  const long n_in = static_cast<long>(std::ceil(-t0 * rate_in / opt.step));
  yin = rk4(inner, t0, 0.0, yin, n_in);

  auto outer = [ll, E](double t, const Vec2& y) {
    const double r = std::exp(t);
    return Vec2{y[1], -y[1] + (ll - r * r * E) * y[0]};
  };
  const double r_cut = std::max(opt.cut_factor / q, 2.0);
  const double t_cut = std::log(r_cut);
  // e^{-qr}/r: R' = r dR/dr = -(q r + 1) R.
  Vec2 yout{1.0, -(q * r_cut + 1.0)};
  const double rate_out = std::max({1.0, lambda, q * r_cut});
  const long n_out = static_cast<long>(std::ceil(t_cut * rate_out / opt.step));
  yout = rk4(outer, t_cut, 0.0, yout, n_out);

  const double w = yin[0] * yout[1] - yin[1] * yout[0];
  const double norm = std::hypot(yin[0], yin[1]) * std::hypot(yout[0], yout[1]);
  return w / norm;
}

}  // namespace oracle_detail

/// Bound-state energies in [e_lo, e_hi] (a subset of (-U0, 0)) by shooting:
/// uniform scan in q = sqrt(-E), then bisection on each sign change.
inline OracleResult radial_oracle(double lambda, double U0, double e_lo,
                                  double e_hi,
                                  const RadialOracleOptions& opt = {}) {
  if (!(lambda >= 0.0)) throw domain_error("radial_oracle: lambda must be >= 0");
  if (!(U0 > 0.0)) throw domain_error("radial_oracle: U0 must be > 0");
  e_lo = std::max(e_lo, -U0 * (1.0 - 1e-12));
  if (!(e_lo < e_hi) || !(e_hi < 0.0))
    throw domain_error("radial_oracle: window must lie inside (-U0, 0)");
  auto f = [&](double q) {
    return oracle_detail::radial_mismatch(lambda, U0, -q * q, opt);
  };
  const double q_lo = std::sqrt(-e_hi), q_hi = std::sqrt(-e_lo);
  OracleResult res;
  res.resolution = opt.scan_points;
  double a = q_lo, fa = f(a);
  for (int j = 1; j <= opt.scan_points; ++j) {
    const double b = q_lo + (q_hi - q_lo) * j / opt.scan_points;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = f(mid);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      const double q = 0.5 * (x0 + x1);
      res.eigenvalues.push_back(-q * q);
    }
    a = b;
    fa = fb;
  }
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end());
  // Step-halving estimate of the integration error.
  if (!res.eigenvalues.empty()) {
    RadialOracleOptions coarse = opt;
    coarse.step *= 2.0;
    for (double e : res.eigenvalues) {
      const double q = std::sqrt(-e);
      const double dq = 1e-7 * std::max(q, 1e-3);
      const double s0 = oracle_detail::radial_mismatch(lambda, U0, e, coarse);
      const double slope =
          (f(q + dq) - f(q - dq)) / (2.0 * dq);
      if (slope != 0.0)
        res.error_estimate =
            std::max(res.error_estimate, std::fabs(s0 / slope) * 2.0 * q);
    }
  }
  res.resolution_warning = res.error_estimate > 1e-3;
  return res;
}

/// Full window (-U0, -0.01): the exterior cut is sized for q >= 0.1.
inline OracleResult radial_oracle(double lambda, double U0,
                                  const RadialOracleOptions& opt = {}) {
  return radial_oracle(lambda, U0, -U0, -0.01, opt);
}

}  // namespace conewell
