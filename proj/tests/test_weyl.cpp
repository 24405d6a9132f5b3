#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "conewell/errors.hpp"
#include "conewell/weyl.hpp"

namespace {

using namespace conewell;
constexpr double pi = std::numbers::pi;

TEST(WeylTerms, SphereCoefficients) {
  const auto t = weyl_terms(ConeGeometry::from_theta0(pi), 3);
  EXPECT_EQ(t.geometry, WeylGeometry::sphere);
  EXPECT_NEAR(t.volume_coeff, 2.0 / (9 * pi), 1e-15);
  EXPECT_NEAR(t.surface_coeff, 0.25, 1e-15);
  ASSERT_TRUE(t.curvature_coeff.has_value());
  EXPECT_NEAR(*t.curvature_coeff, 2.0 / (3 * pi), 1e-15);
}

TEST(WeylTerms, HemisphereCoefficients) {
  const auto t = weyl_terms(ConeGeometry::from_theta0(pi / 2), 3);
  EXPECT_EQ(t.geometry, WeylGeometry::hemisphere);
  EXPECT_NEAR(t.volume_coeff, 1.0 / (9 * pi), 1e-15);
  EXPECT_NEAR(t.surface_coeff, 3.0 / 16, 1e-15);
  EXPECT_NEAR(*t.curvature_coeff, 1.0 / (3 * pi) + 0.125, 1e-15);
  const auto t2 = weyl_terms(ConeGeometry::from_theta0(pi / 2), 2);
  EXPECT_NEAR(t2.volume_coeff * 6 * pi * pi, 2 * pi / 3, 1e-13);
  EXPECT_NEAR(t2.surface_coeff * 16 * pi, 3 * pi, 1e-13);
  EXPECT_FALSE(t2.curvature_coeff.has_value());
}

TEST(WeylTerms, GeneralConeStopsAtSecondOrder) {
  const auto g = ConeGeometry::from_theta0(1.0);
  EXPECT_NO_THROW(weyl_terms(g, 2));
  EXPECT_THROW(weyl_terms(g, 3), unsupported_error);
  EXPECT_THROW(weyl_terms(g, 4), domain_error);
}

TEST(NWeyl, TermArithmetic) {
  const auto s = ConeGeometry::from_theta0(pi);
  EXPECT_NEAR(n_weyl(weyl_terms(s, 1), 4000.0), 2.0 / (9 * pi) * std::pow(4000.0, 1.5), 1e-9);
  EXPECT_NEAR(n_weyl(weyl_terms(s, 1), 4000.0), 17894.8309704843, 1e-9);
  EXPECT_NEAR(n_weyl(weyl_terms(s, 3), 400.0) - n_weyl(weyl_terms(s, 2), 400.0),
              2.0 / (3 * pi) * 20, 1e-10);
  EXPECT_NEAR(n_weyl(weyl_terms(ConeGeometry::from_theta0(0.7), 1), 1e-12), 0.0, 1e-15);
  EXPECT_THROW(n_weyl(weyl_terms(s, 1), -1.0), domain_error);
}

TEST(Remainder, SphereBoundConstant) {
  const auto g = ConeGeometry::from_theta0(pi);
  const double e_max = 4000.0;
  const auto cf = count_function(enumerate_spectrum(g, e_max), e_max);
  const auto rs = remainder_series(cf, weyl_terms(g, 3), e_max);
  EXPECT_GE(rs.c, 2.5);
  EXPECT_LE(rs.c, 4.0);
  EXPECT_EQ(rs.samples.size(), cf.energies.size());
  const double ratio = eval_N(cf, e_max) / n_weyl(weyl_terms(g, 2), e_max);
  EXPECT_GT(ratio, 0.99);
  EXPECT_LT(ratio, 1.01);
}

TEST(Remainder, HemisphereBoundConstant) {
  const auto g = ConeGeometry::from_theta0(pi / 2);
  const double e_max = 4000.0;
  const auto cf = count_function(enumerate_spectrum(g, e_max), e_max);
  const auto rs = remainder_series(cf, weyl_terms(g, 3), e_max);
  EXPECT_GE(rs.c, 1.2);
  EXPECT_LE(rs.c, 2.2);
  const double ratio = eval_N(cf, e_max) / n_weyl(weyl_terms(g, 2), e_max);
  EXPECT_GT(ratio, 0.99);
  EXPECT_LT(ratio, 1.01);
}

TEST(Remainder, BelowTheFirstLevel) {
  const auto g = ConeGeometry::from_theta0(pi);
  const auto cf = count_function(enumerate_spectrum(g, 5.0), 5.0);
  const auto terms = weyl_terms(g, 3);
  const auto rs = remainder_series(cf, terms, 5.0);
  EXPECT_TRUE(rs.samples.empty());
  EXPECT_NEAR(rs.endpoint.below, -n_weyl(terms, 5.0), 1e-12);
}

TEST(Remainder, OneSidedLimitsDifferByTheStep) {
  const auto g = ConeGeometry::from_theta0(pi);
  const auto cf = count_function(enumerate_spectrum(g, 200.0), 200.0);
  const auto rs = remainder_series(cf, weyl_terms(g, 3), 200.0);
  long prev = 0;
  for (std::size_t k = 0; k < rs.samples.size(); ++k) {
    EXPECT_NEAR(rs.samples[k].above - rs.samples[k].below,
                static_cast<double>(cf.cumulative[k] - prev), 1e-4);
    prev = cf.cumulative[k];
  }
}

TEST(Difference, SphereMinusTwiceHemisphere) {
  const auto ds = sphere_minus_twice_hemisphere(4000.0);
  EXPECT_LT(ds.max_abs, 4.0);
  EXPECT_EQ(ds.identity_failures, 0);
  ASSERT_FALSE(ds.samples.empty());
  EXPECT_NEAR(ds.samples[0].energy, pi * pi, 1e-10);
  EXPECT_EQ(ds.samples[0].diff_above, 1);
  EXPECT_EQ(ds.samples[0].diff_below, 0);
  EXPECT_NEAR(weyl_difference(400.0), 50.0 - 5.0, 1e-12);
}

}  // namespace
