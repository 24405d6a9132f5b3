#pragma once

// Weyl estimates of the box state count and the remainder N(E) - N_W(E).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "conewell/angular.hpp"
#include "conewell/boxspec.hpp"
#include "conewell/errors.hpp"

namespace conewell {

enum class WeylGeometry { sphere, hemisphere, cone };

struct WeylTerms {
  double volume_coeff = 0.0;   ///< V / 6 pi^2
  double surface_coeff = 0.0;  ///< S / 16 pi
  std::optional<double> curvature_coeff;  ///< C / 6 pi^2
  WeylGeometry geometry = WeylGeometry::cone;
  int order = 2;
};

/// Coefficients of V/(6pi^2) E^{3/2} - S/(16pi) E + C/(6pi^2) E^{1/2}. The
/// curvature term is known only for the sphere and the hemisphere.
inline WeylTerms weyl_terms(const ConeGeometry& geom, int order) {
  constexpr double pi = std::numbers::pi;
  if (order < 1 || order > 3)
    throw domain_error("weyl_terms: order must be 1, 2 or 3");
  WeylTerms t;
  t.order = order;
  double c = 0.0;
  if (geom.full_sphere()) {
    t.geometry = WeylGeometry::sphere;
    c = 4.0 * pi;
  } else if (geom.hemisphere()) {
    t.geometry = WeylGeometry::hemisphere;
    c = 2.0 * pi + 3.0 * pi * pi / 4.0;
  } else {
    t.geometry = WeylGeometry::cone;
  }
  t.volume_coeff = geom.volume() / (6.0 * pi * pi);
  t.surface_coeff = geom.surface() / (16.0 * pi);
  if (order == 3) {
    if (t.geometry == WeylGeometry::cone)
      throw unsupported_error(
          "weyl_terms: the curvature term is available only for the sphere "
          "and the hemisphere");
    t.curvature_coeff = c / (6.0 * pi * pi);
  }
  return t;
}

inline double n_weyl(const WeylTerms& t, double energy) {
  if (!(energy >= 0.0)) throw domain_error("n_weyl: energy must be >= 0");
  const double s = std::sqrt(energy);
  double n = t.volume_coeff * energy * s;
  if (t.order >= 2) n -= t.surface_coeff * energy;
  if (t.order >= 3 && t.curvature_coeff) n += *t.curvature_coeff * s;
  return n;
}

struct RemainderSample {
  double energy;
  double below;  ///< r(E - eps)
  double above;  ///< r(E + eps)
};

struct RemainderSeries {
  std::vector<RemainderSample> samples;  ///< one per breakpoint
  RemainderSample endpoint{};            ///< r at e_max
  double beta = 0.5;
  double c = 0.0;        ///< max |r(E)| / E^beta
  double max_abs = 0.0;  ///< max |r(E)|
};

inline constexpr double kOneSidedEps = 1e-9;

namespace detail {

inline void absorb(RemainderSeries& rs, double e, double r) {
  rs.max_abs = std::max(rs.max_abs, std::fabs(r));
  if (e > 0.0) rs.c = std::max(rs.c, std::fabs(r) / std::pow(e, rs.beta));
}

}  // namespace detail

/// r(E) = N(E) - N_W(E) at both one-sided limits of every breakpoint up to
/// e_max, with the bound constant c of |r| < c E^{1/2}.
inline RemainderSeries remainder_series(const CountFunction& cf,
                                        const WeylTerms& terms, double e_max) {
  if (e_max > cf.ceiling)
    throw domain_error("remainder_series: e_max above the enumeration ceiling");
  RemainderSeries rs;
  auto r = [&](double e) {
    return static_cast<double>(eval_N(cf, e)) - n_weyl(terms, e);
  };
  for (double e : cf.energies) {
    if (e > e_max) break;
    const double eps = kOneSidedEps * e;
    const double hi = std::min(e + eps, cf.ceiling);
    RemainderSample s{e, r(e - eps), r(hi)};
    detail::absorb(rs, e - eps, s.below);
    detail::absorb(rs, hi, s.above);
    rs.samples.push_back(s);
  }
  const double end = r(e_max);
  rs.endpoint = {e_max, end, end};
  detail::absorb(rs, e_max, end);
  return rs;
}

struct DifferenceSample {
  double energy;
  long diff_below;  ///< N_sphere - 2 N_hemisphere just below the breakpoint
  long diff_above;
  long sum_below;  ///< sum over l of N_l just below the breakpoint
  long sum_above;
  double r_below;  ///< diff - (E/8 - sqrt(E)/4)
  double r_above;
};

struct DifferenceSeries {
  std::vector<DifferenceSample> samples;
  double max_abs = 0.0;
  long identity_failures = 0;
};

inline double weyl_difference(double e) {
  return e / 8.0 - std::sqrt(e) / 4.0;
}

/// N_sphere(E) - 2 N_hemisphere(E) against E/8 - sqrt(E)/4, sampled at every
/// breakpoint of either spectrum, and checked against sum_l N_l(E) where N_l
/// counts the zeros of j_l below sqrt(E).
inline DifferenceSeries sphere_minus_twice_hemisphere(double e_max) {
  const auto sphere = count_function(
      enumerate_spectrum(ConeGeometry::from_theta0(std::numbers::pi), e_max),
      e_max);
  const auto hemi = count_function(
      enumerate_spectrum(ConeGeometry::from_theta0(std::numbers::pi / 2), e_max),
      e_max);

  std::vector<double> radial;
  const double kmax = std::sqrt(e_max);
  for (int l = 0;; ++l) {
    const auto z = bessel_zeros_below(l, kmax);
    if (z.empty()) break;
    for (double a : z) radial.push_back(a * a);
  }
  std::sort(radial.begin(), radial.end());
  auto sum_nl = [&](double e) {
    return static_cast<long>(
        std::upper_bound(radial.begin(), radial.end(), e) - radial.begin());
  };

  std::vector<double> breaks(sphere.energies);
  breaks.insert(breaks.end(), hemi.energies.begin(), hemi.energies.end());
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> merged;
  for (double e : breaks)
    if (merged.empty() ||
        e - merged.back() > kLevelMergeTol * std::max(1.0, e))
      merged.push_back(e);

  DifferenceSeries ds;
  for (double e : merged) {
    const double eps = kOneSidedEps * e;
    const double lo = e - eps, hi = std::min(e + eps, e_max);
    DifferenceSample s{};
    s.energy = e;
    s.diff_below = eval_N(sphere, lo) - 2 * eval_N(hemi, lo);
    s.diff_above = eval_N(sphere, hi) - 2 * eval_N(hemi, hi);
    s.sum_below = sum_nl(lo);
    s.sum_above = sum_nl(hi);
    s.r_below = s.diff_below - weyl_difference(lo);
    s.r_above = s.diff_above - weyl_difference(hi);
    ds.max_abs = std::max({ds.max_abs, std::fabs(s.r_below), std::fabs(s.r_above)});
    if (s.diff_below != s.sum_below || s.diff_above != s.sum_above)
      ++ds.identity_failures;
    ds.samples.push_back(s);
  }
  const long d_end = eval_N(sphere, e_max) - 2 * eval_N(hemi, e_max);
  ds.max_abs = std::max(ds.max_abs, std::fabs(d_end - weyl_difference(e_max)));
  if (d_end != sum_nl(e_max)) ++ds.identity_failures;
  return ds;
}

}  // namespace conewell
