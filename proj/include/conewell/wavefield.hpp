#pragma once

// Eigenfunctions psi(r, theta, phi) of box, bound and zero-energy states.
// Values are real: the e^{i m phi} phase drops out of |psi|^2, so phi is
// accepted but unused.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "conewell/angular.hpp"
#include "conewell/boxspec.hpp"
#include "conewell/detail/parallel.hpp"
#include "conewell/errors.hpp"
#include "conewell/finitewell.hpp"
#include "conewell/specfun.hpp"

namespace conewell {

/// P_lambda^m(cos theta) on [0, theta0], divided by its sampled maximum.
class AngularFactor {
 public:
  explicit AngularFactor(const AngularMode& mode)
      : lambda_(mode.lambda), m_(mode.m), theta0_(mode.theta0) {
    constexpr int kSamples = 512;
    double peak = 0.0;
    for (int j = 0; j <= kSamples; ++j)
      peak = std::max(peak, std::fabs(raw(theta0_ * j / kSamples)));
    scale_ = peak > 0.0 ? 1.0 / peak : 1.0;
  }

  double theta0() const { return theta0_; }

  double operator()(double theta) const {
    if (!(theta >= 0.0) || theta > theta0_)
      throw domain_error("angular factor: theta outside [0, theta0]");
    return scale_ * raw(theta);
  }

 private:
  double raw(double theta) const {
    const double x = std::cos(theta);
    if (x > -1.0) return legendre_p(lambda_, m_, x);
    // theta = pi, reachable only for the full sphere with integer degree.
    const double l = std::round(lambda_);
    if (std::fabs(l - lambda_) > 1e-9)
      throw domain_error("angular factor: P diverges at theta = pi");
    if (m_ != 0) return 0.0;
    return std::fmod(l, 2.0) == 0.0 ? 1.0 : -1.0;
  }

  double lambda_;
  int m_;
  double theta0_;
  double scale_ = 1.0;
};

enum class RadialKind { box, well, zero_energy };

/// Radial factor R(r) with R = 1 at r = 1 for the well kinds.
class RadialFactor {
 public:
  static RadialFactor box(const BoxState& s) {
    RadialFactor f;
    f.kind_ = RadialKind::box;
    f.lambda_ = s.mode.lambda;
    f.k_ = s.alpha;
    return f;
  }

  static RadialFactor well(const BoundState& s) {
    RadialFactor f;
    f.kind_ = RadialKind::well;
    f.lambda_ = s.mode.lambda;
    f.k_ = s.k;
    f.q_ = s.q;
    f.j1_ = sph_bessel_j(f.lambda_, f.k_);
    f.kappa1_ = sph_bessel_kappa_eval(f.lambda_, f.q_).scaled_value;
    return f;
  }

  static RadialFactor zero_energy(const AngularMode& mode, double U0) {
    RadialFactor f;
    f.kind_ = RadialKind::zero_energy;
    f.lambda_ = mode.lambda;
    f.k_ = std::sqrt(U0);
    f.j1_ = sph_bessel_j(f.lambda_, f.k_);
    return f;
  }

  RadialKind kind() const { return kind_; }

  /// Box states vanish identically beyond the wall at r = 1.
  bool outside(double r) const { return kind_ == RadialKind::box && r > 1.0; }

  double operator()(double r) const {
    if (!(r >= 0.0)) throw domain_error("radial factor: r must be >= 0");
    if (kind_ == RadialKind::box) {
      if (r > 1.0) throw domain_error("box state: r must lie in [0, 1]");
      return sph_bessel_j(lambda_, k_ * r);
    }
    if (r <= 1.0) return sph_bessel_j(lambda_, k_ * r) / j1_;
    if (kind_ == RadialKind::zero_energy) return std::pow(r, -(lambda_ + 1.0));
    const auto kv = sph_bessel_kappa_eval(lambda_, q_ * r);
    return kv.scaled_value / kappa1_ * std::exp(-q_ * (r - 1.0));
  }

 private:
  RadialKind kind_ = RadialKind::box;
  double lambda_ = 0.0;
  double k_ = 0.0;
  double q_ = 0.0;
  double j1_ = 1.0;
  double kappa1_ = 1.0;
};

/// psi = R(r) P(cos theta) for a fixed state; theta beyond the cone is an
/// error here and zero in grids.
class Eigenfunction {
 public:
  Eigenfunction(RadialFactor radial, AngularFactor angular)
      : radial_(radial), angular_(angular) {}

  double theta0() const { return angular_.theta0(); }
  const RadialFactor& radial() const { return radial_; }
  const AngularFactor& angular() const { return angular_; }

  double operator()(double r, double theta, double /*phi*/ = 0.0) const {
    return radial_(r) * angular_(theta);
  }

  /// |psi|^2, zero outside the cone.
  double density(double r, double theta) const {
    if (theta > angular_.theta0() || radial_.outside(r)) return 0.0;
    const double v = (*this)(r, theta);
    return v * v;
  }

 private:
  RadialFactor radial_;
  AngularFactor angular_;
};

inline Eigenfunction box_eigenfunction(const BoxState& s) {
  return {RadialFactor::box(s), AngularFactor(s.mode)};
}

inline Eigenfunction well_eigenfunction(const BoundState& s) {
  return {RadialFactor::well(s), AngularFactor(s.mode)};
}

inline constexpr double kLadderMatchTol = 1e-8;

/// Zero-energy state of `mode` at a depth on its ladder. The exterior falls
/// off as r^{-(lambda+1)}; the derivative is continuous at r = 1 because
/// U0 is a ladder depth.
inline Eigenfunction zero_energy_eigenfunction(const AngularMode& mode,
                                               double U0) {
  if (!(U0 > 0.0)) throw domain_error("zero-energy state: U0 must be > 0");
  const auto depths = bessel_zeros_below(mode.lambda - 1.0,
                                         std::sqrt(U0 * (1.0 + 2 * kLadderMatchTol)));
  const bool on_ladder = std::any_of(depths.begin(), depths.end(), [U0](double a) {
    return std::fabs(a * a - U0) <= kLadderMatchTol * U0;
  });
  if (!on_ladder)
    throw domain_error("zero-energy state: U0 is not a zero-energy depth of the mode");
  return {RadialFactor::zero_energy(mode, U0), AngularFactor(mode)};
}

inline double eval_box_psi(const BoxState& s, double r, double theta,
                           double phi = 0.0) {
  return box_eigenfunction(s)(r, theta, phi);
}

inline double eval_well_psi(const BoundState& s, double r, double theta,
                            double phi = 0.0) {
  return well_eigenfunction(s)(r, theta, phi);
}

inline double eval_zero_energy_psi(const AngularMode& mode, double U0, double r,
                                   double theta, double phi = 0.0) {
  return zero_energy_eigenfunction(mode, U0)(r, theta, phi);
}

/// |psi|^2 on an r x theta grid, row-major in r.
struct FieldGrid {
  std::vector<double> r;
  std::vector<double> theta;
  double phi = 0.0;
  std::vector<double> values;

  double at(std::size_t ir, std::size_t it) const {
    return values[ir * theta.size() + it];
  }
};

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw domain_error("linspace: need at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int j = 0; j < n; ++j)
    v[static_cast<std::size_t>(j)] = ((n - 1 - j) * a + j * b) / (n - 1);
  return v;
}

/// The separable form lets each radial and angular factor be computed once.
inline FieldGrid eval_field(const Eigenfunction& psi, std::vector<double> r,
                            std::vector<double> theta, double phi = 0.0) {
  FieldGrid g{std::move(r), std::move(theta), phi, {}};
  std::vector<double> rad(g.r.size(), 0.0), ang(g.theta.size(), 0.0);
  detail::parallel_for(g.r.size(), [&](std::size_t ir) {
    if (!psi.radial().outside(g.r[ir])) rad[ir] = psi.radial()(g.r[ir]);
  });
  detail::parallel_for(g.theta.size(), [&](std::size_t it) {
    if (g.theta[it] <= psi.theta0()) ang[it] = psi.angular()(g.theta[it]);
  });
  g.values.resize(g.r.size() * g.theta.size());
  for (std::size_t ir = 0; ir < g.r.size(); ++ir)
    for (std::size_t it = 0; it < g.theta.size(); ++it) {
      const double v = rad[ir] * ang[it];
      g.values[ir * g.theta.size() + it] = v * v;
    }
  return g;
}

}  // namespace conewell
