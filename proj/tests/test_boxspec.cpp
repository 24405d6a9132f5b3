#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include <gtest/gtest.h>

#include "conewell/boxspec.hpp"
#include "conewell/errors.hpp"

namespace {

using namespace conewell;
constexpr double pi = std::numbers::pi;

TEST(BesselZeros, ClosedFormsAndTanEquation) {
  EXPECT_NEAR(bessel_zero(0.0, 1), pi, 1e-12);
  EXPECT_NEAR(bessel_zero(0.0, 3), 3 * pi, 1e-12);
  EXPECT_NEAR(bessel_zeros(-1.0, 1)[0], pi / 2, 1e-12);
  EXPECT_THROW(bessel_zero(-1.0, 1), domain_error);
  // tan x = x by bisection on sin x - x cos x over (pi, 3pi/2).
  double a = pi + 1e-9, b = 1.5 * pi - 1e-9;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    (std::sin(c) - c * std::cos(c) > 0 ? a : b) = c;
  }
  EXPECT_NEAR(bessel_zero(1.0, 1), 0.5 * (a + b), 1e-12);
  EXPECT_NEAR(bessel_zero(1.0, 1), 4.493409457909064, 1e-12);
}

TEST(BesselZeros, AreZerosAndInterlace) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 40; ++s) {
    const double lam = 12.0 * u(rng);
    const auto z = bessel_zeros(lam, 6);
    const auto z_next = bessel_zeros(lam + 1.0, 6);
    ASSERT_EQ(z.size(), 6u);
    for (std::size_t n = 0; n < z.size(); ++n) {
      EXPECT_LT(std::fabs(sph_bessel_j(lam, z[n])), 1e-12);
      EXPECT_GT(z[n], lam);
      if (n > 0) {
        EXPECT_GT(z[n], z[n - 1]);
      }
      // Zeros of j_lambda and j_{lambda+1} alternate.
      EXPECT_LT(z[n], z_next[n]);
      if (n + 1 < z.size()) {
        EXPECT_LT(z_next[n], z[n + 1]);
      }
    }
  }
}

TEST(BesselZeros, BelowMatchesCount) {
  const auto z = bessel_zeros_below(2.0, 30.0);
  const auto all = bessel_zeros(2.0, static_cast<int>(z.size()) + 1);
  EXPECT_LE(z.back(), 30.0);
  EXPECT_GT(all.back(), 30.0);
  EXPECT_TRUE(bessel_zeros_below(5.0, 5.0).empty());
}

TEST(BesselZeros, CountFollowsTheZeroDensity) {
  // Number of zeros of j_l below x against the integral of
  // (1/pi) sqrt(1 - (l+1/2)^2 / y^2) from l+1/2 to x.
  for (int l : {20, 40, 60}) {
    const double nu = l + 0.5;
    for (double x : {1.5 * nu, 2.5 * nu, 4.0 * nu}) {
      const double integral =
          (std::sqrt(x * x - nu * nu) - nu * std::acos(nu / x)) / pi;
      const double count = static_cast<double>(bessel_zeros_below(l, x).size());
      EXPECT_NEAR(count, integral, 2.0) << l << ' ' << x;
    }
  }
}

TEST(BesselZeros, RejectsBadIndex) {
  EXPECT_THROW(bessel_zero(1.0, 0), domain_error);
  EXPECT_THROW(bessel_zeros(1.0, 0), domain_error);
}

TEST(Spectrum, FullSphereGroundLevelOnly) {
  const auto s = enumerate_spectrum(ConeGeometry::from_theta0(pi), 10.0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].energy, pi * pi, 1e-10);
  EXPECT_EQ(s[0].mode.degeneracy, 1);
}

TEST(Spectrum, HemisphereLowestLevel) {
  const auto s = enumerate_spectrum(ConeGeometry::from_theta0(pi / 2), 21.0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].mode.lambda, 1.0, 1e-12);
  EXPECT_NEAR(s[0].energy, std::pow(bessel_zero(1.0, 1), 2), 1e-10);
  EXPECT_NEAR(s[0].energy, 20.19072855642663, 1e-9);
}

TEST(Spectrum, FullSphereCountMatchesPerDegreeSum) {
  const double e_max = 4000.0;
  const auto cf = count_function(enumerate_spectrum(ConeGeometry::from_theta0(pi), e_max), e_max);
  long total = 0;
  for (int l = 0;; ++l) {
    const auto z = bessel_zeros_below(l, std::sqrt(e_max));
    if (z.empty()) break;
    total += static_cast<long>(z.size()) * (2 * l + 1);
  }
  EXPECT_EQ(eval_N(cf, e_max), total);
  EXPECT_EQ(total, 16805);
}

TEST(Spectrum, SortedAndComplete) {
  const auto g = ConeGeometry::from_theta0(0.4 * pi);
  const double e_max = 400.0;
  const auto s = enumerate_spectrum(g, e_max);
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k - 1].energy, s[k].energy);
  // Every (m, i, n) below the ceiling appears exactly once.
  long expected = 0;
  for (int m = 0;; ++m) {
    const auto modes = find_lambdas_below(g, m, std::sqrt(e_max));
    if (modes.empty()) break;
    for (const auto& mode : modes)
      expected += static_cast<long>(bessel_zeros_below(mode.lambda, std::sqrt(e_max)).size());
  }
  EXPECT_EQ(static_cast<long>(s.size()), expected);
}

TEST(Spectrum, EnergiesRiseAsTheConeCloses) {
  // Each E_n(lambda_i^m) is nondecreasing in w.
  const double e_max = 300.0;
  std::map<std::tuple<int, int, int>, double> prev;
  for (double w : {-0.6, -0.3, 0.0, 0.3}) {
    for (const auto& s : enumerate_spectrum(ConeGeometry::from_w(w), e_max)) {
      const auto key = std::make_tuple(s.mode.m, s.mode.i, s.n);
      const auto it = prev.find(key);
      if (it != prev.end()) {
        EXPECT_GE(s.energy, it->second);
      }
      prev[key] = s.energy;
    }
  }
}

TEST(CountFunction, DegeneracyWeightedSteps) {
  const double e_max = 25.0;
  const auto cf = count_function(enumerate_spectrum(ConeGeometry::from_theta0(pi), e_max), e_max);
  EXPECT_EQ(eval_N(cf, pi * pi - 0.01), 0);
  EXPECT_EQ(eval_N(cf, pi * pi + 0.01), 1);
  EXPECT_EQ(eval_N(cf, 20.19072855642663 + 1e-6), 4);
  EXPECT_THROW(eval_N(cf, 26.0), domain_error);
}

}  // namespace
