#pragma once

// Finite spherical well of depth U0 inside the cone: bound states, critical
// depth, zero-energy ladder and localization-length exponents.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "conewell/angular.hpp"
#include "conewell/boxspec.hpp"
#include "conewell/detail/parallel.hpp"
#include "conewell/detail/roots.hpp"
#include "conewell/errors.hpp"
#include "conewell/specfun.hpp"

namespace conewell {

struct WellConfig {
  ConeGeometry geom;
  double U0;
};

struct BoundState {
  AngularMode mode;
  int n = 1;  ///< ordinal within the mode, by increasing energy
  double energy = 0.0;
  double k = 0.0;   ///< sqrt(E + U0)
  double q = 0.0;   ///< sqrt(-E)
  double xi = 0.0;  ///< 1 / q
  bool normalizable = false;  ///< lambda > 1/2: the E -> 0 limit is square integrable
};

struct LadderPoint {
  int m;
  int i;
  int n;
  double lambda;
  double depth;
};

struct CriticalData {
  double theta0 = 0.0;
  double U_c = 0.0;
  double lambda00 = 0.0;
  std::vector<LadderPoint> ladder;
  std::optional<double> nu;
};

/// Zero-energy states with lambda <= 1/2 are not square integrable.
inline bool normalizable(double lambda) {
  if (!(lambda >= 0.0)) throw domain_error("normalizable: lambda must be >= 0");
  return lambda > 0.5;
}

namespace detail {

inline double g_left_raw(double lambda, double k) {
  const auto j = cyl_bessel_j(lambda + 0.5, k);
  return k * j.deriv / j.value - 0.5;
}

inline double g_right_raw(double lambda, double q) {
  return bessel_k_log_derivative(lambda + 0.5, q) - 0.5;
}

}  // namespace detail

/// k j'_lambda(k) / j_lambda(k).
inline double g_left(double lambda, double k) {
  if (!(k > 0.0)) throw domain_error("g_left: k must be > 0");
  const auto j = cyl_bessel_j(lambda + 0.5, k);
  if (std::fabs(j.value) <= 1e-13 * k * std::fabs(j.deriv))
    throw pole_error("g_left: j_lambda(k) vanishes");
  return k * j.deriv / j.value - 0.5;
}

/// q kappa'_lambda(q) / kappa_lambda(q); tends to -(lambda+1) as q -> 0.
inline double g_right(double lambda, double q) {
  if (!(q > 0.0)) throw domain_error("g_right: q must be > 0");
  return detail::g_right_raw(lambda, q);
}

/// k J'_nu(k) / J_nu(k) with nu = lambda + 1/2, i.e. g_left + 1/2.
inline double g_left_regular(double lambda, double k) {
  return g_left(lambda, k) + 0.5;
}

/// q K'_nu(q) / K_nu(q) with nu = lambda + 1/2; tends to -(lambda+1/2).
inline double g_right_regular(double lambda, double q) {
  return g_right(lambda, q) + 0.5;
}

/// Bound states of one angular mode, ordered by energy. Between consecutive
/// poles of g_left (zeros of j_lambda(k)) the mismatch g_left - g_right is
/// strictly decreasing in E, so each such interval holds exactly one root;
/// the interval ending at E = 0 holds one iff the mismatch is negative there.
inline std::vector<BoundState> solve_mode_bound_states(const AngularMode& mode,
                                                       double U0) {
  if (!(U0 > 0.0)) throw domain_error("bound states: U0 must be > 0");
  const double lam = mode.lambda;
  const double kmax = std::sqrt(U0);
  const auto poles = bessel_zeros_below(lam, kmax);

  auto mismatch_q = [lam, U0](double q) {
    const double k = std::sqrt(std::max(U0 - q * q, 0.0));
    return detail::g_left_raw(lam, k) - detail::g_right_raw(lam, q);
  };

  // Intervals in E: (-U0, p1), (p1, p2), ..., (p_last, 0).
  std::vector<std::pair<double, double>> intervals;  // (q_high, q_low)
  double q_hi = kmax;
  for (double a : poles) {
    if (a >= kmax) break;
    const double q_lo = std::sqrt(U0 - a * a);
    intervals.emplace_back(q_hi, q_lo);
    q_hi = q_lo;
  }
  const bool last_has_root =
      detail::g_left_raw(lam, kmax) + lam + 1.0 < 0.0 && q_hi > 0.0;
  if (last_has_root) intervals.emplace_back(q_hi, 0.0);

  std::vector<BoundState> out;
  for (const auto& [qh, ql] : intervals) {
    // The mismatch is negative on the low-q (high-E) side of each interval.
    const double q = detail::bisect_signs(mismatch_q, ql, qh, -1, 1e-15);
    BoundState s;
    s.mode = mode;
    s.q = q;
    s.energy = -q * q;
    s.k = std::sqrt(U0 - q * q);
    s.xi = 1.0 / q;
    s.normalizable = lam > 0.5;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const BoundState& a, const BoundState& b) {
    return a.energy < b.energy;
  });
  for (std::size_t j = 0; j < out.size(); ++j) out[j].n = static_cast<int>(j) + 1;
  return out;
}

/// Bound states for the given modes, ordered by (lambda, n).
inline std::vector<BoundState> solve_bound_states(
    const WellConfig& cfg, const std::vector<AngularMode>& modes) {
  std::vector<std::vector<BoundState>> per(modes.size());
  detail::parallel_for(modes.size(), [&](std::size_t j) {
    per[j] = solve_mode_bound_states(modes[j], cfg.U0);
  });
  std::vector<BoundState> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const BoundState& a, const BoundState& b) {
                     return std::tie(a.mode.lambda, a.n) <
                            std::tie(b.mode.lambda, b.n);
                   });
  return out;
}

/// Every angular mode that can bind at depth U0: alpha_1(lambda-1) > lambda-1,
/// so lambda <= sqrt(U0) + 1 suffices.
inline std::vector<AngularMode> binding_modes(const WellConfig& cfg) {
  const double lambda_cut = std::sqrt(cfg.U0) + 2.0;
  std::vector<AngularMode> modes;
  for (int m = 0; m <= static_cast<int>(lambda_cut); ++m) {
    const auto v = find_lambdas_below(cfg.geom, m, lambda_cut);
    if (v.empty()) break;
    modes.insert(modes.end(), v.begin(), v.end());
  }
  return modes;
}

/// All bound states of the well, ordered by energy then (m, i, n).
inline std::vector<BoundState> all_bound_states(const WellConfig& cfg) {
  auto states = solve_bound_states(cfg, binding_modes(cfg));
  std::stable_sort(states.begin(), states.end(),
                   [](const BoundState& a, const BoundState& b) {
                     return std::tie(a.energy, a.mode.m, a.mode.i, a.n) <
                            std::tie(b.energy, b.mode.m, b.mode.i, b.n);
                   });
  return states;
}

/// Depths alpha_n(lambda - 1)^2, n = 1..n_max, at which the mode has an E = 0
/// state.
inline std::vector<double> zero_energy_depths(const AngularMode& mode,
                                              int n_max) {
  if (n_max < 1) throw domain_error("zero_energy_depths: n_max must be >= 1");
  auto z = bessel_zeros(mode.lambda - 1.0, n_max);
  for (double& a : z) a *= a;
  return z;
}

/// U_c = alpha_1(lambda_0^0 - 1)^2.
inline CriticalData critical_depth(const ConeGeometry& geom) {
  CriticalData cd;
  cd.theta0 = geom.theta0;
  const auto mode = find_lambdas(geom, 0, 1)[0];
  cd.lambda00 = mode.lambda;
  cd.U_c = zero_energy_depths(mode, 1)[0];
  return cd;
}

/// sqrt(U) J'_nu(sqrt(U)) / J_nu(sqrt(U)) + (lambda + 1/2), nu = lambda + 1/2;
/// vanishes at every zero-energy depth.
inline double zero_energy_residual(double lambda, double U) {
  const auto j = cyl_bessel_j(lambda + 0.5, std::sqrt(U));
  return std::sqrt(U) * j.deriv / j.value + lambda + 0.5;
}

/// Critical data with the full zero-energy ladder up to depth_max.
inline CriticalData critical_data(const ConeGeometry& geom, double depth_max) {
  CriticalData cd = critical_depth(geom);
  const double kmax = std::sqrt(depth_max);
  for (const auto& mode : binding_modes({geom, depth_max})) {
    const auto z = bessel_zeros_below(mode.lambda - 1.0, kmax);
    for (std::size_t n = 0; n < z.size(); ++n)
      cd.ladder.push_back({mode.m, mode.i, static_cast<int>(n) + 1, mode.lambda,
                           z[n] * z[n]});
  }
  std::sort(cd.ladder.begin(), cd.ladder.end(),
            [](const LadderPoint& a, const LadderPoint& b) {
              return std::tie(a.depth, a.m, a.i, a.n) <
                     std::tie(b.depth, b.m, b.i, b.n);
            });
  return cd;
}

/// Critical exponent of xi ~ dU^{-nu}.
inline double nu_theory(double lambda) {
  return lambda > 0.5 ? 0.5 : 1.0 / (2.0 * lambda + 1.0);
}

struct ExponentOptions {
  double rel_min = 1e-8;  ///< smallest dU / U_ref
  double rel_max = 1e-4;  ///< largest dU / U_ref
  int points = 12;
  double match_tol = 1e-8;       ///< drop points whose matching residual exceeds this
  double residual_limit = 1e-2;  ///< RMS log residual above which the power fit is rejected
};

struct ExponentSample {
  double dU;
  double energy;
  double xi;
  double match_residual;
};

struct ExponentFit {
  double lambda = 0.0;
  double U_ref = 0.0;
  double nu = 0.0;             ///< pure power law: log xi = a - nu log dU
  double residual = 0.0;       ///< RMS residual of that fit
  double nu_log = 0.0;         ///< with the |ln dU|^{1/2} factor divided out
  double residual_log = 0.0;
  double nu_theory = 0.0;
  bool accepted = false;       ///< residual below the rejection threshold
  bool log_preferred = false;  ///< log-corrected model fits better
  std::vector<ExponentSample> samples;
};

namespace detail {

struct LineFit {
  double slope, intercept, rms;
};

inline LineFit least_squares(const std::vector<double>& x,
                             const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ss = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = y[j] - (icpt + slope * x[j]);
    ss += r * r;
  }
  return {slope, icpt, std::sqrt(ss / n)};
}

}  // namespace detail

/// Fits xi = 1/sqrt(-E) of the state that appears at U0 = U_ref + dU, where
/// U_ref is the n-th zero-energy depth of the mode, over log-spaced dU.
inline ExponentFit localization_exponent(const AngularMode& mode, int n,
                                         const ExponentOptions& opt = {}) {
  if (n < 1) throw domain_error("localization_exponent: n must be >= 1");
  if (opt.points < 3 || !(opt.rel_min > 0.0) || !(opt.rel_max > opt.rel_min))
    throw domain_error("localization_exponent: invalid dU grid");
  ExponentFit fit;
  fit.lambda = mode.lambda;
  fit.U_ref = zero_energy_depths(mode, n).back();
  fit.nu_theory = nu_theory(mode.lambda);

  std::vector<double> lx, ly, ly_log;
  for (int p = 0; p < opt.points; ++p) {
    const double t = static_cast<double>(p) / (opt.points - 1);
    const double rel =
        std::exp(std::log(opt.rel_min) * (1.0 - t) + std::log(opt.rel_max) * t);
    const double dU = rel * fit.U_ref;
    const double U0 = fit.U_ref + dU;
    const auto states = solve_mode_bound_states(mode, U0);
    if (static_cast<int>(states.size()) != n)
      throw convergence_error(
          "localization_exponent: unexpected bound-state count near the "
          "zero-energy depth");
    const auto& s = states.back();
    const double g_l = detail::g_left_raw(mode.lambda, s.k);
    const double g_r = detail::g_right_raw(mode.lambda, s.q);
    const double mres = std::fabs(g_l - g_r) / std::max(1.0, std::fabs(g_r));
    fit.samples.push_back({dU, s.energy, s.xi, mres});
    if (mres > opt.match_tol) continue;
    lx.push_back(std::log(dU));
    ly.push_back(std::log(s.xi));
    ly_log.push_back(std::log(s.xi) - 0.5 * std::log(std::fabs(std::log(dU))));
  }
  if (lx.size() < 3)
    throw convergence_error("localization_exponent: too few usable points");
  const auto pure = detail::least_squares(lx, ly);
  const auto corr = detail::least_squares(lx, ly_log);
  fit.nu = -pure.slope;
  fit.residual = pure.rms;
  fit.nu_log = -corr.slope;
  fit.residual_log = corr.rms;
  fit.accepted = fit.residual <= opt.residual_limit;
  fit.log_preferred = corr.rms < pure.rms;
  return fit;
}

/// Exponent for the ground mode (0, 0) at its first zero-energy depth.
inline ExponentFit localization_exponent(const ConeGeometry& geom,
                                         const ExponentOptions& opt = {}) {
  return localization_exponent(find_lambdas(geom, 0, 1)[0], 1, opt);
}

}  // namespace conewell
