#pragma once

// Associated Legendre functions of integer order and real degree, ordinary
// and modified Bessel functions of real order, and their spherical variants.
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "conewell/detail/ode.hpp"
#include "conewell/errors.hpp"

namespace conewell {

struct ValueDeriv {
  double value;
  double deriv;
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// ---------------------------------------------------------------------------
// Legendre

/// Ferrers P_nu^m(x) (Condon-Shortley phase) and d/dx from
///   P = (-1)^m / (2^m m!) * prod_{j=1-m}^{m}(nu+j) * (1-x^2)^{m/2}
///       * 2F1(m-nu, nu+m+1; m+1; (1-x)/2).
/// After the first term the series has constant sign, so it is accurate for
/// any z < 1; the term count grows like m / (1 - z).
inline ValueDeriv legendre_hypergeometric(double nu, int m, double x) {
  const double z = 0.5 * (1.0 - x);
  double pref = 1.0;
  for (int j = 1; j <= m; ++j) pref *= -(nu + j) * (nu - j + 1) / (2.0 * j);

  const double a = m - nu;
  const double b = nu + m + 1.0;
  const double c = m + 1.0;
  // u_k = (a)_k (b)_k / ((c)_k k!) z^{k-1};  F = 1 + sum u_k z,  F' = sum k u_k
  double u = a * b / c;
  double sum = 1.0 + u * z;
  double dsum = u;
  constexpr long kMaxTerms = 400'000;
  long k = 1;
  for (; k < kMaxTerms; ++k) {
    if (u == 0.0) break;
    const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0));
    u *= ratio * z;
    const double t = u * z;
    sum += t;
    dsum += (k + 1.0) * u;
    if (std::fabs(ratio * z) < 1.0 && std::fabs(t) <= 1e-17 * std::fabs(sum) &&
        std::fabs((k + 1.0) * u) <= 1e-17 * std::fabs(dsum))
      break;
  }
  if (k >= kMaxTerms)
    throw convergence_error("legendre: hypergeometric series did not converge");

  const double one_m_x2 = (1.0 - x) * (1.0 + x);
  const double half_m = 0.5 * m;
  if (one_m_x2 == 0.0) {
    // x == 1 exactly: only the value is meaningful.
    return {m == 0 ? 1.0 : 0.0, m == 0 ? 0.5 * nu * (nu + 1.0)
                                       : std::numeric_limits<double>::infinity()};
  }
  const double sm = std::pow(one_m_x2, half_m);
  const double value = pref * sm * sum;
  const double deriv =
      pref * (-m * x * std::pow(one_m_x2, half_m - 1.0) * sum - 0.5 * sm * dsum);
  return {value, deriv};
}

/// Below this x the upward degree recurrence starts inside the region where
/// P_nu^m is not oscillatory and loses accuracy, so the ODE path takes over.
inline double legendre_series_floor(int m) {
  const double r = m / (m + 1.0);
  return std::max(-0.9, -std::sqrt(1.0 - r * r));
}

/// Continues P_nu^m from x0 down to x < x0 by integrating the polar equation
/// in s = atanh(-x), where it reads Theta'' = (m^2 - nu(nu+1) sech^2 s) Theta.
inline ValueDeriv legendre_ode(double nu, int m, double x0, ValueDeriv p0,
                               double x) {
  const double s0 = std::atanh(-x0);
  const double s1 = std::atanh(-x);
  const double w0 = (1.0 - x0) * (1.0 + x0);

  // v = exp(-m (s - s0)) Theta removes the e^{m s} growth:
  //   v'' = -2 m v' - nu(nu+1) sech^2(s) v
  const double mm = m;
  const double c0 = nu * (nu + 1.0);
  auto rhs = [mm, c0](double s, const State<2>& y) {
    const double ch = std::cosh(s);
    return State<2>{y[1], -2.0 * mm * y[1] - c0 * y[0] / (ch * ch)};
  };
  const double th0 = p0.value, dth0 = -w0 * p0.deriv;
  State<2> y{th0, dth0 - mm * th0};
  y = integrate_dopri5<2>(rhs, s0, s1, y, 1e-13, 1e-300);

  const double grow = std::exp(mm * (s1 - s0));
  const double w = (1.0 - x) * (1.0 + x);
  return {grow * y[0], -grow * (y[1] + mm * y[0]) / w};
}

/// Series at lambda directly, or at a starting degree in [m, m+1) and one
/// above it followed by the upward recurrence
///   (nu-m+1) P_{nu+1} = (2nu+1) x P_nu - (nu+m) P_{nu-1}.
inline ValueDeriv legendre_series_recur(double lambda, int m, double x) {
  if (lambda <= m + 1.0) return legendre_hypergeometric(lambda, m, x);
  const int steps = static_cast<int>(std::floor(lambda - m));
  const double nu0 = lambda - steps;
  ValueDeriv lo = legendre_hypergeometric(nu0, m, x);
  ValueDeriv hi = legendre_hypergeometric(nu0 + 1.0, m, x);
  double nu = nu0 + 1.0;
  for (int k = 1; k < steps; ++k) {
    const double inv = 1.0 / (nu - m + 1.0);
    const ValueDeriv next{
        ((2.0 * nu + 1.0) * x * hi.value - (nu + m) * lo.value) * inv,
        ((2.0 * nu + 1.0) * (hi.value + x * hi.deriv) - (nu + m) * lo.deriv) *
            inv};
    lo = hi;
    hi = next;
    nu += 1.0;
  }
  return hi;
}

inline ValueDeriv legendre_eval(double lambda, int m, double x) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw domain_error("legendre: degree must be finite and >= 0");
  if (m < 0) throw domain_error("legendre: order must be >= 0");
  if (!(x > -1.0) || x > 1.0)
    throw domain_error("legendre: argument outside (-1, 1]");
  if (x == 1.0) return legendre_hypergeometric(lambda, m, x);
  const double x0 = legendre_series_floor(m);
  if (x >= x0) return legendre_series_recur(lambda, m, x);
  return legendre_ode(lambda, m, x0, legendre_series_recur(lambda, m, x0), x);
}

// ---------------------------------------------------------------------------
// Bessel

struct BesselJY {
  double j, jp, y, yp;
};

/// J, J', Y, Y' for nu >= 0 and x >= 2: continued fraction for J'/J, downward
/// recurrence to an order mu <= x, then Steed's complex continued fraction.
inline BesselJY bessel_jy_steed(double nu, double x) {
  constexpr int kMaxIt = 200'000;
  constexpr double kFpMin = 1e-30;
  constexpr double kCfEps = 1e-16;
  const int nl = std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu, d = 0.0, c = h;
  int it = 0;
  for (; it < kMaxIt; ++it) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < kCfEps) break;
  }
  if (it >= kMaxIt) throw convergence_error("bessel_j: CF1 did not converge");

  double rjl = isign * kFpMin;
  double rjpl = h * rjl;
  double rjl1 = rjl, rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
    if (std::fabs(rjl) > 1e250) {
      rjl *= 1e-250;
      rjpl *= 1e-250;
      rjl1 *= 1e-250;
      rjp1 *= 1e-250;
    }
  }
  if (rjl == 0.0) rjl = kCfEps;
  const double f = rjpl / rjl;

  double a = 0.25 - xmu2;
  double p = -0.5 * xi, q = 1.0;
  const double br = 2.0 * x;
  double bi = 2.0;
  fact = a * xi / (p * p + q * q);
  double cr = br + q * fact, ci = bi + p * fact;
  double den = br * br + bi * bi;
  double dr = br / den, di = -bi / den;
  double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
  double temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  for (it = 1; it < kMaxIt; ++it) {
    a += 2 * it;
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::fabs(dr) + std::fabs(di) < kFpMin) dr = kFpMin;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::fabs(cr) + std::fabs(ci) < kFpMin) cr = kFpMin;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::fabs(dlr - 1.0) + std::fabs(dli) < kCfEps) break;
  }
  if (it >= kMaxIt) throw convergence_error("bessel_j: CF2 did not converge");

  const double gam = (p - f) / q;
  double rjmu = std::sqrt(w / ((p - f) * gam + q));
  rjmu = std::copysign(rjmu, rjl);
  double rymu = rjmu * gam;
  const double rymup = rymu * (p + q / gam);
  double ry1 = xmu * xi * rymu - rymup;
  const double scale = rjmu / rjl;
  BesselJY out{};
  out.j = rjl1 * scale;
  out.jp = rjp1 * scale;
  for (int i = 1; i <= nl; ++i) {
    const double rytemp = (xmu + i) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.y = rymu;
  out.yp = nu * xi * rymu - ry1;
  return out;
}

/// Ascending series for J_nu and J'_nu, nu > -1. Used where x^2/4 <= nu+1 or
/// x < 2, so the alternating terms shrink from the start.
inline ValueDeriv bessel_j_series(double nu, double x) {
  const double lead = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
  const double y = 0.25 * x * x;
  double term = lead;
  double sum = term;
  double dsum = nu * term;
  for (int k = 1; k < 1000; ++k) {
    term *= -y / (k * (nu + k));
    sum += term;
    dsum += (2.0 * k + nu) * term;
    if (std::fabs(term) <= 1e-17 * std::fabs(sum) &&
        std::fabs((2.0 * k + nu) * term) <= 1e-17 * std::fabs(dsum))
      return {sum, dsum / x};
  }
  throw convergence_error("bessel_j: ascending series did not converge");
}

inline bool bessel_series_region(double nu, double x) {
  return x < 2.0 || 0.25 * x * x <= nu + 1.0;
}

/// Coefficients of 1/Gamma(1+z) = sum d_k z^k.
inline constexpr std::array<double, 25> kRecipGamma1p{
    1.0,
    0.5772156649015328606065121,
    -0.6558780715202538810770195,
    -0.04200263503409523552900393,
    0.1665386113822914895017008,
    -0.0421977345555443367482083,
    -0.009621971527876973562114922,
    0.00721894324666309954239501,
    -0.001165167591859065112113971,
    -0.00021524167411495097281573,
    0.0001280502823881161861531986,
    -0.00002013485478078823865568939,
    -0.000001250493482142670657345359,
    0.00000113302723198169588237413,
    -0.0000002056338416977607103450154,
    6.116095104481415817862499e-9,
    5.002007644469222930055665e-9,
    -1.181274570487020144588127e-9,
    1.04342671169110051049154e-10,
    7.782263439905071254049937e-12,
    -3.696805618642205708187816e-12,
    5.100370287454475979015481e-13,
    -2.05832605356650678322243e-14,
    -5.348122539423017982370017e-15,
    1.226778628238260790158894e-15};

struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

/// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2,
/// gampl = 1/G(1+mu), gammi = 1/G(1-mu), for |mu| <= 1/2.
inline TemmeGammas temme_gammas(double mu) {
  double even = 0.0, odd = 0.0;
  for (std::size_t k = kRecipGamma1p.size(); k-- > 0;) {
    if (k % 2 == 0)
      even = even * mu * mu + kRecipGamma1p[k];
    else
      odd = odd * mu * mu + kRecipGamma1p[k];
  }
  // even = sum_{k even} d_k mu^k ; odd = sum_{k odd} d_k mu^{k-1}
  return {-odd, even, even + mu * odd, even - mu * odd};
}

struct BesselKScaled {
  double k;   ///< e^x K_nu(x)
  double kp;  ///< e^x K'_nu(x)
  double ratio;  ///< K_{nu+1}(x) / K_nu(x)
};

/// Modified Bessel K of order |nu|: Temme's series for x < 2, Steed's
/// continued fraction otherwise, then upward recurrence in order.
inline BesselKScaled bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_k: argument must be > 0");
  nu = std::fabs(nu);
  constexpr int kMaxIt = 200'000;
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  double rkmu, rk1;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fact = std::fabs(pimu) < 1e-16 ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = xmu * d;
    const double fact2 = std::fabs(e) < 1e-16 ? 1.0 : std::sinh(e) / e;
    const auto g = temme_gammas(xmu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i < kMaxIt; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      c *= d / i;
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    if (i >= kMaxIt) throw convergence_error("bessel_k: Temme series");
    const double ex = std::exp(x);
    rkmu = sum * ex;
    rk1 = sum1 * xi2 * ex;
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i < kMaxIt; ++i) {
      a -= 2 * i;
      c = -a * c / (i + 1.0);
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::fabs(dels / s) < 1e-17) break;
    }
    if (i >= kMaxIt) throw convergence_error("bessel_k: Steed CF2");
    h = a1 * h;
    rkmu = std::sqrt(kPi / (2.0 * x)) / s;
    rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
  }
  double ratio = rk1 / rkmu;
  for (int i = 1; i <= nl; ++i) {
    const double rktemp = (xmu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
    ratio = (xmu + i) * xi2 + 1.0 / ratio;
  }
  return {rkmu, nu * xi * rkmu - rk1, ratio};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public surface

/// P_lambda^m(x) with the Condon-Shortley phase, lambda >= 0, -1 < x <= 1.
inline double legendre_p(double lambda, int m, double x) {
  return detail::legendre_eval(lambda, m, x).value;
}

/// dP_lambda^m / dx for |x| < 1.
inline double legendre_p_dx(double lambda, int m, double x) {
  if (!(std::fabs(x) < 1.0))
    throw domain_error("legendre_p_dx: argument must satisfy |x| < 1");
  return detail::legendre_eval(lambda, m, x).deriv;
}

inline ValueDeriv legendre_p_with_dx(double lambda, int m, double x) {
  if (!(std::fabs(x) < 1.0))
    throw domain_error("legendre_p_with_dx: argument must satisfy |x| < 1");
  return detail::legendre_eval(lambda, m, x);
}

/// J_nu(x) and J'_nu(x) for nu > -1, x > 0.
inline ValueDeriv cyl_bessel_j(double nu, double x) {
  if (!(x > 0.0)) throw domain_error("cyl_bessel_j: argument must be > 0");
  if (!(nu > -1.0)) throw domain_error("cyl_bessel_j: order must be > -1");
  if (detail::bessel_series_region(nu, x)) return detail::bessel_j_series(nu, x);
  if (nu >= 0.0) {
    const auto r = detail::bessel_jy_steed(nu, x);
    return {r.j, r.jp};
  }
  // J_{-mu} = cos(mu pi) J_mu - sin(mu pi) Y_mu
  const double mu = -nu;
  const auto r = detail::bessel_jy_steed(mu, x);
  const double cs = std::cos(mu * detail::kPi), sn = std::sin(mu * detail::kPi);
  return {cs * r.j - sn * r.y, cs * r.jp - sn * r.yp};
}

/// x K'_nu(x) / K_nu(x), free of overflow for large orders at small x.
inline double bessel_k_log_derivative(double nu, double x) {
  const auto r = detail::bessel_k_scaled(nu, x);
  return std::fabs(nu) - x * r.ratio;
}

/// j_lambda(x) = sqrt(pi/2x) J_{lambda+1/2}(x). Degrees down to -1 are
/// accepted for the zero-energy condition; x = 0 gives the small-x limit.
inline double sph_bessel_j(double lambda, double x) {
  if (!(lambda >= -1.0)) throw domain_error("sph_bessel_j: degree < -1");
  if (x < 0.0) throw domain_error("sph_bessel_j: argument must be >= 0");
  if (x == 0.0) {
    if (lambda == 0.0) return 1.0;
    if (lambda > 0.0) return 0.0;
    throw domain_error("sph_bessel_j: singular at x = 0 for negative degree");
  }
  const auto j = cyl_bessel_j(lambda + 0.5, x);
  const double value = std::sqrt(detail::kPi / (2.0 * x)) * j.value;
  if (!std::isfinite(value)) throw std::overflow_error("sph_bessel_j overflow");
  return value;
}

inline ValueDeriv sph_bessel_j_with_dx(double lambda, double x) {
  if (!(lambda >= -1.0)) throw domain_error("sph_bessel_j: degree < -1");
  if (!(x > 0.0)) throw domain_error("sph_bessel_j_dx: argument must be > 0");
  const auto j = cyl_bessel_j(lambda + 0.5, x);
  const double pre = std::sqrt(detail::kPi / (2.0 * x));
  const ValueDeriv out{pre * j.value, pre * (j.deriv - 0.5 * j.value / x)};
  if (!std::isfinite(out.value) || !std::isfinite(out.deriv))
    throw std::overflow_error("sph_bessel_j overflow");
  return out;
}

inline double sph_bessel_j_dx(double lambda, double x) {
  return sph_bessel_j_with_dx(lambda, x).deriv;
}

struct KappaValue {
  double value;         ///< kappa_lambda(x), may underflow to 0
  double deriv;         ///< kappa'_lambda(x), may underflow to 0
  double scaled_value;  ///< e^x kappa_lambda(x)
  double scaled_deriv;  ///< e^x kappa'_lambda(x)
  bool underflow;       ///< value flushed to zero
};

/// kappa_lambda(x) = sqrt(pi/2x) K_{lambda+1/2}(x) with its derivative.
inline KappaValue sph_bessel_kappa_eval(double lambda, double x) {
  if (!(lambda >= -1.0)) throw domain_error("sph_bessel_kappa: degree < -1");
  if (!(x > 0.0)) throw domain_error("sph_bessel_kappa: argument must be > 0");
  const auto k = detail::bessel_k_scaled(lambda + 0.5, x);
  const double pre = std::sqrt(detail::kPi / (2.0 * x));
  KappaValue out{};
  out.scaled_value = pre * k.k;
  out.scaled_deriv = pre * (k.kp - 0.5 * k.k / x);
  const double ex = std::exp(-x);
  out.value = out.scaled_value * ex;
  out.deriv = out.scaled_deriv * ex;
  out.underflow = out.value == 0.0 || !std::isnormal(out.value);
  if (out.underflow) {
    out.value = 0.0;
    out.deriv = 0.0;
  }
  return out;
}

inline double sph_bessel_kappa(double lambda, double x) {
  return sph_bessel_kappa_eval(lambda, x).value;
}

inline double sph_bessel_kappa_dx(double lambda, double x) {
  return sph_bessel_kappa_eval(lambda, x).deriv;
}

}  // namespace conewell
