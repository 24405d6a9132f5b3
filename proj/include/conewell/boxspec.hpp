#pragma once

// Infinite spherical box inside the cone: zeros of j_lambda, energies and the
// cumulative state count N(E).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "conewell/angular.hpp"
#include "conewell/detail/parallel.hpp"
#include "conewell/detail/roots.hpp"
#include "conewell/errors.hpp"
#include "conewell/specfun.hpp"

namespace conewell {

struct BoxState {
  AngularMode mode;
  int n = 1;            ///< radial index
  double alpha = 0.0;   ///< n-th zero of j_lambda
  double energy = 0.0;  ///< alpha^2
};

namespace detail {

inline constexpr double kZeroScanStep = 0.5;

/// Zeros of j_lambda (lambda >= -1) in increasing order: sign scan of
/// J_{lambda+1/2} followed by Brent. Stops after `count` zeros or past xmax.
inline std::vector<double> scan_bessel_zeros(double lambda, int count,
                                             double xmax) {
  if (!(lambda >= -1.0)) throw domain_error("bessel zeros: degree < -1");
  const double nu = lambda + 0.5;
  auto f = [nu](double x) { return cyl_bessel_j(nu, x).value; };
  std::vector<double> zeros;
  // J_nu > 0 on (0, max(nu, 0)], so scanning starts there.
  double a = std::max(nu, 1e-3);
  double fa = f(a);
  if (!(fa > 0.0))
    throw convergence_error("bessel zeros: unexpected sign at scan start");
  for (long k = 1; static_cast<int>(zeros.size()) < count; ++k) {
    const double b = std::max(nu, 1e-3) + k * kZeroScanStep;
    if (b > xmax + kZeroScanStep) break;
    const double fb = f(b);
    if (fb == 0.0) {
      zeros.push_back(b);
      a = b + 1e-9;
      fa = f(a);
      continue;
    }
    if (sign_of(fa) != sign_of(fb)) zeros.push_back(brent(f, a, b, fa, fb, 1e-14));
    a = b;
    fa = fb;
  }
  return zeros;
}

}  // namespace detail

/// First `count` positive zeros of j_lambda, lambda >= -1.
inline std::vector<double> bessel_zeros(double lambda, int count) {
  if (count < 1) throw domain_error("bessel_zeros: count must be >= 1");
  const double nu = std::max(0.0, lambda + 0.5);
  const double xmax = nu + 4.0 + (4.0 * std::cbrt(nu + 1.0) + 4.0) * count;
  auto z = detail::scan_bessel_zeros(lambda, count, xmax);
  if (static_cast<int>(z.size()) < count)
    throw convergence_error("bessel_zeros: scan ceiling reached for degree " +
                            std::to_string(lambda));
  return z;
}

/// n-th positive zero alpha_n(lambda) of j_lambda, lambda >= 0, n >= 1.
inline double bessel_zero(double lambda, int n) {
  if (!(lambda >= 0.0)) throw domain_error("bessel_zero: degree must be >= 0");
  if (n < 1) throw domain_error("bessel_zero: n must be >= 1");
  return bessel_zeros(lambda, n).back();
}

/// Every zero of j_lambda not exceeding xmax.
inline std::vector<double> bessel_zeros_below(double lambda, double xmax) {
  auto z = detail::scan_bessel_zeros(lambda, std::numeric_limits<int>::max(),
                                     xmax);
  while (!z.empty() && z.back() > xmax) z.pop_back();
  return z;
}

/// All box states with energy <= e_max, sorted by (E, m, i, n).
inline std::vector<BoxState> enumerate_spectrum(const ConeGeometry& geom,
                                                double e_max,
                                                const AngularOptions& opt = {}) {
  if (!(e_max > 0.0)) throw domain_error("enumerate_spectrum: e_max must be > 0");
  const double kmax = std::sqrt(e_max);
  // alpha_1(lambda) > lambda, so modes above this cannot contribute.
  const double lambda_cut = kmax + 2.0;
  const int m_count = static_cast<int>(std::floor(lambda_cut)) + 1;

  std::vector<std::vector<BoxState>> per_m(m_count);
  detail::parallel_for(m_count, [&](std::size_t mi) {
    const int m = static_cast<int>(mi);
    for (const auto& mode : find_lambdas_below(geom, m, lambda_cut, opt)) {
      const auto zeros = bessel_zeros_below(mode.lambda, kmax);
      for (std::size_t n = 0; n < zeros.size(); ++n) {
        const double e = zeros[n] * zeros[n];
        if (e <= e_max)
          per_m[mi].push_back({mode, static_cast<int>(n) + 1, zeros[n], e});
      }
    }
  });

  std::vector<BoxState> states;
  for (auto& v : per_m) states.insert(states.end(), v.begin(), v.end());
  std::stable_sort(states.begin(), states.end(),
                   [](const BoxState& a, const BoxState& b) {
                     return std::tie(a.energy, a.mode.m, a.mode.i, a.n) <
                            std::tie(b.energy, b.mode.m, b.mode.i, b.n);
                   });
  return states;
}

/// Stepwise N(E): breakpoints with the cumulative degeneracy-weighted count.
struct CountFunction {
  std::vector<double> energies;
  std::vector<long> cumulative;
  double ceiling = 0.0;  ///< enumeration is complete up to here
};

inline constexpr double kLevelMergeTol = 1e-9;

/// Builds N(E) from a spectrum that is complete up to `ceiling`. Energies
/// within 1e-9 (relative above 1) are merged into one breakpoint.
inline CountFunction count_function(const std::vector<BoxState>& spectrum,
                                    double ceiling) {
  CountFunction cf;
  cf.ceiling = ceiling;
  long total = 0;
  for (const auto& s : spectrum) {
    if (s.energy > ceiling) break;
    total += s.mode.degeneracy;
    if (!cf.energies.empty() &&
        s.energy - cf.energies.back() <=
            kLevelMergeTol * std::max(1.0, s.energy)) {
      cf.cumulative.back() = total;
    } else {
      cf.energies.push_back(s.energy);
      cf.cumulative.push_back(total);
    }
  }
  return cf;
}

/// Number of states with energy <= E.
inline long eval_N(const CountFunction& cf, double energy) {
  if (energy > cf.ceiling)
    throw domain_error("eval_N: energy above the enumeration ceiling");
  const auto it =
      std::upper_bound(cf.energies.begin(), cf.energies.end(), energy);
  if (it == cf.energies.begin()) return 0;
  return cf.cumulative[static_cast<std::size_t>(it - cf.energies.begin()) - 1];
}

}  // namespace conewell
