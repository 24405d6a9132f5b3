#pragma once

// Polar eigenvalue problem P_lambda^m(cos theta0) = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "conewell/detail/roots.hpp"
#include "conewell/errors.hpp"
#include "conewell/specfun.hpp"

namespace conewell {

/// Cone of apex half-angle theta0 in (0, pi]. theta0 = pi is the full sphere.
struct ConeGeometry {
  double theta0;
  double w;

  static ConeGeometry from_theta0(double theta0) {
    if (!(theta0 > 0.0) || theta0 > std::numbers::pi)
      throw domain_error("cone: theta0 must lie in (0, pi]");
    return {theta0, theta0 == std::numbers::pi ? -1.0 : std::cos(theta0)};
  }
  static ConeGeometry from_w(double w) {
    if (!(w >= -1.0) || !(w < 1.0))
      throw domain_error("cone: w must lie in [-1, 1)");
    return {w == -1.0 ? std::numbers::pi : std::acos(w), w};
  }

  bool full_sphere() const { return theta0 == std::numbers::pi; }
  bool hemisphere() const { return theta0 == std::numbers::pi / 2; }

  /// Volume of the cone sector inside the unit sphere.
  double volume() const { return 2.0 * std::numbers::pi / 3.0 * (1.0 - w); }
  /// Spherical cap plus lateral cone surface inside the unit sphere.
  double surface() const {
    return 2.0 * std::numbers::pi * (1.0 - w) +
           std::numbers::pi * std::sin(theta0);
  }
};

struct AngularMode {
  int m = 0;
  int i = 0;  ///< branch index, i >= m
  double lambda = 0.0;
  double theta0 = 0.0;
  int degeneracy = 1;
};

struct AngularOptions {
  double scan_step = 0.05;
  double lambda_tol = 1e-12;
};

struct BranchPoint {
  double w;
  double lambda;
};

namespace detail {

inline AngularMode make_mode(const ConeGeometry& g, int m, int k, double lam) {
  return {m, m + k, lam, g.theta0, m == 0 ? 1 : 2};
}

/// Crude upper bound for the k-th root (k from 0), used as a scan ceiling.
inline double lambda_ceiling(const ConeGeometry& g, int m, int k) {
  const double mm = m;
  return mm + 10.0 +
         (mm + 4.0 * std::cbrt(mm + 1.0) + std::numbers::pi * (k + 2.0)) /
             g.theta0;
}

/// Scans lambda upward from m and collects roots of P_lambda^m(w) until
/// `want` roots are found or lambda exceeds `lambda_max`.
inline std::vector<double> scan_roots(int m, double w, int want,
                                      double lambda_max,
                                      const AngularOptions& opt) {
  auto f = [m, w](double lam) { return legendre_p(lam, m, w); };
  std::vector<double> roots;
  double a = m;
  double fa = f(a);
  for (long k = 1; static_cast<int>(roots.size()) < want; ++k) {
    const double b = m + k * opt.scan_step;
    if (b > lambda_max + opt.scan_step) break;
    const double fb = f(b);
    if (fb == 0.0) {
      roots.push_back(b);
      // Restart just past the exact root so the next bracket is clean.
      a = b + 1e-7;
      fa = f(a);
      continue;
    }
    if (sign_of(fa) != sign_of(fb)) {
      roots.push_back(brent(f, a, b, fa, fb, opt.lambda_tol));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

/// Follows root k of order m from (w_prev, lam_prev) to w_new. Roots only
/// grow with w, so the sign of P just below lam_prev must still be the one
/// below the k-th root, otherwise the step is too large. The margin keeps
/// the test clear of the previous root's own tolerance on tiny steps.
inline std::optional<double> continue_root(int m, int k, double lam_prev,
                                           double w_new, double max_jump,
                                           const AngularOptions& opt) {
  auto f = [m, w_new](double lam) { return legendre_p(lam, m, w_new); };
  const int expected = ((m + k) % 2 == 0) ? 1 : -1;
  const double margin = std::max(1e3 * opt.lambda_tol, 1e-9 * lam_prev);
  double a = std::max(lam_prev - margin, static_cast<double>(m));
  double fa = f(a);
  if (fa == 0.0) return a;
  if (sign_of(fa) != expected) return std::nullopt;
  const double step = std::min(opt.scan_step, max_jump / 4.0);
  for (int j = 1; a < lam_prev + max_jump; ++j) {
    const double b = lam_prev + j * step;
    const double fb = f(b);
    if (sign_of(fb) != sign_of(fa)) {
      const double r = brent(f, a, b, fa, fb, opt.lambda_tol);
      if (r - lam_prev > max_jump) return std::nullopt;
      return r;
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

}  // namespace detail

/// The `count` smallest roots lambda of P_lambda^m(cos theta0) = 0.
inline std::vector<AngularMode> find_lambdas(const ConeGeometry& geom, int m,
                                             int count,
                                             const AngularOptions& opt = {}) {
  if (count < 1) throw domain_error("find_lambdas: count must be >= 1");
  if (m < 0) throw domain_error("find_lambdas: m must be >= 0");
  std::vector<AngularMode> out;
  if (geom.full_sphere()) {
    for (int k = 0; k < count; ++k)
      out.push_back(detail::make_mode(geom, m, k, m + k));
    return out;
  }
  const double ceiling = detail::lambda_ceiling(geom, m, count);
  const auto roots = detail::scan_roots(m, geom.w, count, ceiling, opt);
  if (static_cast<int>(roots.size()) < count)
    throw convergence_error("find_lambdas: scan reached its ceiling");
  for (int k = 0; k < count; ++k)
    out.push_back(detail::make_mode(geom, m, k, roots[k]));
  return out;
}

/// Every root lambda <= lambda_max for order m.
inline std::vector<AngularMode> find_lambdas_below(
    const ConeGeometry& geom, int m, double lambda_max,
    const AngularOptions& opt = {}) {
  if (m < 0) throw domain_error("find_lambdas_below: m must be >= 0");
  std::vector<AngularMode> out;
  if (lambda_max < m) return out;
  if (geom.full_sphere()) {
    for (int k = 0; m + k <= lambda_max; ++k)
      out.push_back(detail::make_mode(geom, m, k, m + k));
    return out;
  }
  const auto roots = detail::scan_roots(
      m, geom.w, std::numeric_limits<int>::max(), lambda_max, opt);
  for (std::size_t k = 0; k < roots.size() && roots[k] <= lambda_max; ++k)
    out.push_back(detail::make_mode(geom, m, static_cast<int>(k), roots[k]));
  return out;
}

/// lambda_0^0(theta0).
inline double ground_lambda(double theta0) {
  return find_lambdas(ConeGeometry::from_theta0(theta0), 0, 1)[0].lambda;
}

inline constexpr double kBranchWFloor = -1.0 + 1e-8;

/// Samples of branch (m, i) along an ascending grid of w values, obtained by
/// continuation from the first grid point.
inline std::vector<BranchPoint> trace_branch(int m, int i,
                                             const std::vector<double>& w_grid,
                                             const AngularOptions& opt = {}) {
  if (m < 0 || i < m) throw domain_error("trace_branch: need 0 <= m <= i");
  if (w_grid.empty()) throw domain_error("trace_branch: empty w grid");
  for (std::size_t j = 0; j < w_grid.size(); ++j) {
    if (!(w_grid[j] >= kBranchWFloor) || !(w_grid[j] < 1.0))
      throw domain_error("trace_branch: w outside [-1+1e-8, 1)");
    if (j > 0 && !(w_grid[j] > w_grid[j - 1]))
      throw domain_error("trace_branch: w grid must be strictly ascending");
  }
  const int k = i - m;
  constexpr double kMaxJump = 0.5;
  std::vector<BranchPoint> out;
  out.reserve(w_grid.size());
  double w_cur = w_grid[0];
  double lam = find_lambdas(ConeGeometry::from_w(w_cur), m, k + 1, opt)
                   .back()
                   .lambda;
  out.push_back({w_cur, lam});
  for (std::size_t j = 1; j < w_grid.size(); ++j) {
    const double target = w_grid[j];
    double h = target - w_cur;
    while (w_cur < target) {
      const double w_try = (w_cur + h >= target) ? target : w_cur + h;
      const auto next = detail::continue_root(m, k, lam, w_try, kMaxJump, opt);
      if (!next) {
        h *= 0.5;
        if (h < 1e-14)
          throw branch_jump_error("trace_branch: lost branch near w = " +
                                  std::to_string(w_cur));
        continue;
      }
      w_cur = w_try;
      lam = *next;
      h *= 2.0;
    }
    out.push_back({target, lam});
  }
  return out;
}

/// Apex half-angle at which lambda_0^0 = 1/2, i.e. the first zero in theta of
/// P_{1/2}(cos theta).
inline double theta_critical() {
  auto f = [](double th) { return legendre_p(0.5, 0, std::cos(th)); };
  return detail::brent(f, 0.6 * std::numbers::pi, 0.85 * std::numbers::pi,
                       1e-13);
}

}  // namespace conewell
