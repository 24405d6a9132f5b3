#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <gtest/gtest.h>

#include "conewell/errors.hpp"
#include "conewell/specfun.hpp"

namespace {

using namespace conewell;
constexpr double pi = std::numbers::pi;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

TEST(Legendre, ElementaryCases) {
  EXPECT_NEAR(legendre_p(0.0, 0, 0.3), 1.0, 1e-14);
  EXPECT_NEAR(legendre_p(1.0, 0, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(legendre_p(1.0, 1, 0.5), -std::sqrt(0.75), 1e-14);
  EXPECT_NEAR(legendre_p(2.0, 0, 0.5), -0.125, 1e-14);
  EXPECT_NEAR(legendre_p(3.0, 2, -0.4), 15.0 * -0.4 * (1 - 0.16), 1e-13);
  EXPECT_DOUBLE_EQ(legendre_p(2.5, 0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(legendre_p(2.5, 2, 1.0), 0.0);
}

TEST(Legendre, HighPrecisionReferences) {
  struct Case {
    double lambda;
    int m;
    double x;
    double want;
  };
  const Case cases[] = {
      {2.7, 2, -0.95, -13.609439335972627514},
      {3.3, 1, 0.4, 0.81288309570649422294},
      {7.25, 3, -0.7, -142.56557247992054664},
      {12.5, 0, -0.999, -0.3321050031707520422},
      {0.5, 0, -0.5, 0.16908392457168987175},
      {5.5, 4, 0.9, 67.829225824310105806},
  };
  for (const auto& c : cases)
    EXPECT_LT(rel_err(legendre_p(c.lambda, c.m, c.x), c.want), 1e-10)
        << "lambda=" << c.lambda << " m=" << c.m << " x=" << c.x;
}

TEST(Legendre, FractionalDegreeNearConeEdge) {
  // P_{0.355}(cos 5pi/6) is small but not zero; the true root lies at 0.34618.
  EXPECT_NEAR(legendre_p(0.355, 0, std::cos(5 * pi / 6)), -0.024382879095650632, 1e-11);
  EXPECT_NEAR(legendre_p(0.3461839406483, 0, std::cos(5 * pi / 6)), 0.0, 1e-11);
}

TEST(Legendre, DomainErrors) {
  EXPECT_THROW(legendre_p(1.0, 0, -1.0), domain_error);
  EXPECT_THROW(legendre_p(1.0, 0, 1.5), domain_error);
  EXPECT_THROW(legendre_p(1.0, -1, 0.2), domain_error);
}

TEST(Legendre, DerivativeCases) {
  EXPECT_NEAR(legendre_p_dx(1.0, 0, 0.7), 1.0, 1e-13);
  EXPECT_NEAR(legendre_p_dx(2.0, 0, 0.5), 1.5, 1e-13);
  const double h = 1e-6;
  const double fd = (legendre_p(0.355, 0, 0.2 + h) - legendre_p(0.355, 0, 0.2 - h)) / (2 * h);
  EXPECT_NEAR(legendre_p_dx(0.355, 0, 0.2), fd, 1e-6);
}

TEST(Legendre, DerivativeMatchesFiniteDifferenceOnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    const double lam = 8.0 * u(rng);
    const int m = static_cast<int>(4 * u(rng));
    const double x = -0.95 + 1.9 * u(rng);
    const double h = 1e-5;
    const double fd = (legendre_p(lam, m, x + h) - legendre_p(lam, m, x - h)) / (2 * h);
    const double d = legendre_p_dx(lam, m, x);
    EXPECT_NEAR(d, fd, 1e-5 * std::max(1.0, std::fabs(d))) << lam << ' ' << m << ' ' << x;
  }
}

TEST(Legendre, IntegerDegreeMatchesBoost) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    const int l = static_cast<int>(15 * u(rng));
    const int m = std::min(l, static_cast<int>(5 * u(rng)));
    const double x = -0.999 + 1.998 * u(rng);
    const double want = boost::math::legendre_p(l, m, x);
    EXPECT_NEAR(legendre_p(l, m, x), want, 1e-10 * std::max(1.0, std::fabs(want)))
        << l << ' ' << m << ' ' << x;
  }
}

TEST(Legendre, RecurrenceInDegreeOrderHolds) {
  // P^{m+1} = -sqrt(1-x^2) dP^m/dx - m x / sqrt(1-x^2) P^m.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 300; ++s) {
    const double lam = 10.0 * u(rng);
    const int m = static_cast<int>(5 * u(rng));
    const double x = -0.99 + 1.98 * u(rng);
    const double sq = std::sqrt(1 - x * x);
    const auto pd = legendre_p_with_dx(lam, m, x);
    const double t1 = -sq * pd.deriv, t2 = -m * x / sq * pd.value;
    const double next = legendre_p(lam, m + 1, x);
    const double scale = std::max({std::fabs(t1), std::fabs(t2), std::fabs(next)});
    EXPECT_LE(std::fabs(next - t1 - t2), 1e-8 * scale) << lam << ' ' << m << ' ' << x;
  }
}

TEST(Legendre, ZerosOfHigherOrderInterlace) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 6; ++s) {
    const double lam = 3.0 + 6.0 * u(rng);
    const int m = static_cast<int>(3 * u(rng));
    constexpr int n = 1200;
    std::vector<bool> sa(n + 1), sb(n + 1);
    for (int j = 0; j <= n; ++j) {
      const double x = -0.99 + 1.98 * j / n;
      sa[j] = legendre_p(lam, m, x) < 0;
      sb[j] = legendre_p(lam, m + 1, x) < 0;
    }
    std::vector<int> za;
    for (int j = 1; j <= n; ++j)
      if (sa[j] != sa[j - 1]) za.push_back(j);
    for (std::size_t z = 1; z < za.size(); ++z) {
      int between = 0;
      for (int j = za[z - 1]; j < za[z]; ++j) between += sb[j + 1] != sb[j];
      EXPECT_EQ(between, 1) << lam << ' ' << m;
    }
  }
}

TEST(CylBessel, HighPrecisionReferences) {
  EXPECT_LT(rel_err(cyl_bessel_j(2.0, 3.0).value, 0.48609126058589107691), 1e-12);
  EXPECT_LT(rel_err(cyl_bessel_j(0.75, 0.3).value, 0.25889668297249305683), 1e-12);
  EXPECT_LT(rel_err(cyl_bessel_j(10.5, 7.0).value, 0.014204915635445128209), 1e-11);
  EXPECT_LT(rel_err(cyl_bessel_j(3.25, 25.0).value, 0.14313099641396200065), 1e-11);
  EXPECT_LT(rel_err(cyl_bessel_j(40.5, 30.0).value, 0.0002383810598062451949), 1e-11);
}

TEST(CylBessel, MatchesBoostOnRandomPoints) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 300; ++s) {
    const double nu = -0.5 + 20.0 * u(rng);
    const double x = 0.01 + 40.0 * u(rng);
    const double want = boost::math::cyl_bessel_j(nu, x);
    EXPECT_NEAR(cyl_bessel_j(nu, x).value, want, 1e-11) << nu << ' ' << x;
    const double want_dx = boost::math::cyl_bessel_j_prime(nu, x);
    EXPECT_NEAR(cyl_bessel_j(nu, x).deriv, want_dx, 1e-10) << nu << ' ' << x;
  }
}

TEST(CylBessel, KLogDerivativeMatchesBoost) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    const double nu = 0.5 + 10.0 * u(rng);
    const double x = 0.001 + 30.0 * u(rng);
    const double want =
        x * boost::math::cyl_bessel_k_prime(nu, x) / boost::math::cyl_bessel_k(nu, x);
    EXPECT_NEAR(bessel_k_log_derivative(nu, x), want, 1e-10 * std::fabs(want))
        << nu << ' ' << x;
  }
}

TEST(SphBessel, ClosedForms) {
  EXPECT_NEAR(sph_bessel_j(0.0, pi), 0.0, 1e-12);
  EXPECT_NEAR(sph_bessel_j(0.0, pi / 2), 2.0 / pi, 1e-14);
  EXPECT_NEAR(sph_bessel_j(-1.0, pi / 2), 0.0, 1e-12);
  EXPECT_NEAR(sph_bessel_j(-1.0, 1.0), std::cos(1.0), 1e-13);
  EXPECT_NEAR(sph_bessel_j(1.0, 2.0), std::sin(2.0) / 4 - std::cos(2.0) / 2, 1e-14);
  EXPECT_DOUBLE_EQ(sph_bessel_j(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sph_bessel_j(1.5, 0.0), 0.0);
  EXPECT_NEAR(sph_bessel_j_dx(0.0, pi), -1.0 / pi, 1e-13);
}

TEST(SphBessel, QuadratureOfIntegralRepresentation) {
  // J_2(3) = (1/pi) int_0^pi cos(2t - 3 sin t) dt, and j_{1.5}(3) = sqrt(pi/6) J_2(3).
  using boost::math::quadrature::gauss_kronrod;
  const double j2 = gauss_kronrod<double, 61>::integrate(
                        [](double t) { return std::cos(2 * t - 3 * std::sin(t)); }, 0.0, pi,
                        15, 1e-14) /
                    pi;
  EXPECT_NEAR(sph_bessel_j(1.5, 3.0), std::sqrt(pi / 6.0) * j2, 1e-8);
}

TEST(SphBessel, FirstMaximumOfJ1HasZeroSlope) {
  // The first maximum of j_1 sits where j_1' changes sign between 1.5 and 2.5.
  double a = 1.5, b = 2.5;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = (sph_bessel_j(1.0, c + 1e-7) - sph_bessel_j(1.0, c - 1e-7));
    (fc > 0 ? a : b) = c;
  }
  EXPECT_NEAR(sph_bessel_j_dx(1.0, 0.5 * (a + b)), 0.0, 1e-8);
}

TEST(SphKappa, ClosedFormsAndQuadrature) {
  EXPECT_NEAR(sph_bessel_kappa(0.0, 1.0), pi / 2 * std::exp(-1.0), 1e-14);
  EXPECT_NEAR(sph_bessel_kappa(0.0, 2.0), pi / 4 * std::exp(-2.0), 1e-14);
  // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
  using boost::math::quadrature::gauss_kronrod;
  const double k = gauss_kronrod<double, 61>::integrate(
      [](double t) { return std::exp(-1.3 * std::cosh(t)) * std::cosh(1.25 * t); }, 0.0, 8.0,
      15, 1e-14);
  EXPECT_NEAR(k, 0.43728695983191904538, 1e-12);
  EXPECT_NEAR(sph_bessel_kappa(0.75, 1.3), std::sqrt(pi / 2.6) * k, 1e-8);
}

TEST(SphKappa, ScaledFormAvoidsUnderflow) {
  const auto kv = sph_bessel_kappa_eval(6.0, 40.0);
  const double want = std::sqrt(pi / 80.0) * 1.4125812647439626228e-18;
  EXPECT_LT(rel_err(kv.value, want), 1e-12);
  EXPECT_LT(rel_err(kv.scaled_value, want * std::exp(40.0)), 1e-12);
  const auto far = sph_bessel_kappa_eval(1.0, 900.0);
  EXPECT_TRUE(far.underflow);
  EXPECT_GT(far.scaled_value, 0.0);
}

TEST(SphBessel, RadialEquationResidual) {
  // R'' + 2R'/r + (s - l(l+1)/r^2) R = 0 with s = +1 for j and -1 for kappa.
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-4;
  for (int s = 0; s < 60; ++s) {
    const double l = 6.0 * u(rng);
    const double r = 0.5 + 10.0 * u(rng);
    for (int sign : {1, -1}) {
      auto f = [&](double x) {
        return sign > 0 ? sph_bessel_j(l, x) : sph_bessel_kappa(l, x);
      };
      const double f0 = f(r), fp = f(r + h), fm = f(r - h);
      const double d2 = (fp - 2 * f0 + fm) / (h * h), d1 = (fp - fm) / (2 * h);
      const double c = sign - l * (l + 1) / (r * r);
      const double res = d2 + 2 * d1 / r + c * f0;
      const double scale = std::fabs(d2) + std::fabs(2 * d1 / r) + std::fabs(c * f0);
      EXPECT_LT(std::fabs(res), 1e-6 * scale) << l << ' ' << r << ' ' << sign;
    }
  }
}

TEST(SphBessel, DerivativesMatchFiniteDifference) {
  const double h = 1e-6;
  for (double l : {0.0, 0.355, 1.7, 4.2})
    for (double x : {0.3, 2.0, 9.5}) {
      const double fdj = (sph_bessel_j(l, x + h) - sph_bessel_j(l, x - h)) / (2 * h);
      EXPECT_NEAR(sph_bessel_j_dx(l, x), fdj, 1e-7 * std::max(1.0, std::fabs(fdj)));
      const double fdk = (sph_bessel_kappa(l, x + h) - sph_bessel_kappa(l, x - h)) / (2 * h);
      EXPECT_NEAR(sph_bessel_kappa_dx(l, x), fdk, 1e-7 * std::max(1.0, std::fabs(fdk)));
    }
}

TEST(SphBessel, DomainErrors) {
  EXPECT_THROW(sph_bessel_j(0.5, -1.0), domain_error);
  EXPECT_THROW(sph_bessel_kappa(0.5, 0.0), domain_error);
}

}  // namespace
