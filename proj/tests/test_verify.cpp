#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "archimedes/verify.hpp"

namespace archimedes {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(SampleSurface, PointsLieOnTheSurface) {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 2}, {4, 3}, {5, 2}, {6, 4}}) {
    const auto h = make_archimedean(n, k, 1.3);
    const auto s = sample_surface(h, 5000, 17);
    ASSERT_EQ(s.size(), 5000u);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(h.implicit_eval(s.point(i))));
    EXPECT_LE(worst, 1e-10) << n << "," << k;
  }
}

TEST(SampleSurface, DeterministicAcrossThreadCounts) {
  const auto h = make_archimedean(5, 3, 1.0);
  const auto one = sample_surface(h, 200000, 4, 1);
  const auto four = sample_surface(h, 200000, 4, 4);
  EXPECT_EQ(one.coords, four.coords);
  EXPECT_EQ(one.proposals, four.proposals);
  EXPECT_NE(one.coords, sample_surface(h, 200000, 5, 1).coords);
  // A prefix of a longer run is the shorter run.
  const auto longer = sample_surface(h, 300000, 4, 2);
  EXPECT_TRUE(std::equal(one.coords.begin(), one.coords.end(), longer.coords.begin()));
}

TEST(SampleSurface, AcceptanceRateOfDiskBase) {
  const auto h = make_archimedean(4, 2, 1.0);
  const auto s = sample_surface(h, 400000, 8);
  EXPECT_NEAR(s.acceptance_rate(), kPi / 4.0, 5e-3);
}

TEST(SampleSurface, ArchimedesZonesAreUniform) {
  // The height of a uniform point on S^2 is uniform on [-1, 1].
  const long count = 1000000;
  const auto s = sample_surface(make_archimedean(3, 2, 1.0), count, 2024);
  std::vector<double> z(count);
  for (long i = 0; i < count; ++i) z[i] = s.point(i)[2];
  std::sort(z.begin(), z.end());
  double ks = 0.0;
  for (long i = 0; i < count; ++i) {
    const double cdf = 0.5 * (z[i] + 1.0);
    ks = std::max({ks, cdf - static_cast<double>(i) / count, static_cast<double>(i + 1) / count - cdf});
  }
  EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(count)));
}

TEST(SampleSurface, MeanFiberRadiusMatchesQuadrature) {
  const auto h = make_archimedean(5, 3, 1.0);
  const auto s = sample_surface(h, 1000000, 3);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    mean += r;
    sq += r * r;
  }
  const double count = static_cast<double>(s.size());
  mean /= count;
  const double stderr_mean = std::sqrt((sq / count - mean * mean) / count);
  const double quad = integrate_over(h.base(), nullptr, [&](std::span<const double> x) { return h.warping(x); }).value /
                      h.base().domain_volume();
  EXPECT_NEAR(mean, quad, 4.0 * stderr_mean);
  EXPECT_LT(std::abs(mean - quad), 5e-4 * quad);  // three significant figures
}

TEST(SampleSurface, RejectsCustomWarps) {
  EXPECT_THROW(sample_surface(parabolic_control(4, 3, 1.0), 10, 1), DomainError);
  EXPECT_EQ(sample_product(parabolic_control(4, 3, 1.0), 10, 1).size(), 10u);
}

TEST(RandomRegions, DeterministicPositiveAndCovering) {
  const auto base = BaseDomain::ball({0.0, 0.0, 0.0}, 0.9);
  const auto a = random_regions(base, 100, 77);
  const auto b = random_regions(base, 100, 77);
  ASSERT_EQ(a.size(), 100u);
  int boxes = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GT(clipped_volume(base, a[i]), 0.0);
    EXPECT_STREQ(a[i].kind(), b[i].kind());
    if (const auto* box = a[i].as_box()) {
      ++boxes;
      EXPECT_EQ(box->lo, b[i].as_box()->lo);
      const double s = 0.5 * (box->hi[0] - box->lo[0]);
      EXPECT_GE(s, 0.05 * 0.9 - 1e-15);
      EXPECT_LE(s, 0.5 * 0.9 + 1e-15);
    } else {
      EXPECT_EQ(a[i].as_ball()->center, b[i].as_ball()->center);
      EXPECT_EQ(a[i].as_ball()->radius, b[i].as_ball()->radius);
    }
  }
  EXPECT_GT(boxes, 25);
  EXPECT_LT(boxes, 75);
  RandomStream rng(1);
  int covered = 0, inside = 0;
  Point x(3);
  while (inside < 20000) {
    for (double& c : x) c = rng.uniform(-0.9, 0.9);
    if (!base.contains(x)) continue;
    ++inside;
    covered += std::any_of(a.begin(), a.end(), [&](const Region& r) { return r.contains(x); });
  }
  EXPECT_GE(covered, inside / 2);
  const auto hex = BaseDomain::regular_polygon(6, 0.7);
  for (const auto& r : random_regions(hex, 30, 5)) EXPECT_GT(clipped_volume(hex, r), 0.0);
}

TEST(QuadraticForm, DiagonalAndDependentRows) {
  const auto [q, rank] = detail::covariance_quadratic_form({4.0, 0.0, 0.0, 0.25}, {2.0, 1.0}, 2);
  EXPECT_NEAR(q, 1.0 + 4.0, 1e-14);
  EXPECT_EQ(rank, 2);
  // Second row duplicates the first: it is dropped.
  const auto [q2, rank2] = detail::covariance_quadratic_form({1.0, 1.0, 1.0, 1.0}, {3.0, 3.0}, 2);
  EXPECT_NEAR(q2, 9.0, 1e-14);
  EXPECT_EQ(rank2, 1);
  // Correlated pair against the explicit inverse.
  const double a = 2.0, b = 0.6, c = 1.0;
  const auto [q3, rank3] = detail::covariance_quadratic_form({a, b, b, c}, {1.0, -1.0}, 2);
  EXPECT_NEAR(q3, (c + 2 * b + a) / (a * c - b * b), 1e-14);
  EXPECT_EQ(rank3, 2);
}

TEST(StatisticalTest, CylinderHalfBase) {
  const auto h = SphericalArray::cylinder(4, 2, 1.0, BaseDomain::ball({0.0, 0.0}, 0.8));
  const auto rep = app_statistical_test(h, {Region::box({0.0, -1.0}, {1.0, 1.0})}, 1000000, 12);
  EXPECT_NEAR(rep.regions[0].expected, 0.5, 1e-9);
  EXPECT_NEAR(rep.regions[0].observed, 0.5, 2e-3);
  EXPECT_LT(std::abs(rep.regions[0].z), 4.0);
  EXPECT_TRUE(rep.passed());
  EXPECT_STREQ(rep.sampler, "surface");
}

TEST(StatisticalTest, ZoneOfWidthTwoTenths) {
  const auto h = make_archimedean(3, 2, 1.0);
  const auto rep = app_statistical_test(h, {Region::box({0.3}, {0.5})}, 400000, 6);
  EXPECT_NEAR(rep.regions[0].expected, 0.1, 1e-10);
  EXPECT_NEAR(rep.regions[0].observed, 0.1, 2.5e-3);
}

TEST(StatisticalTest, FlagsTooFewExpectedHits) {
  const auto h = make_archimedean(4, 3, 1.0);
  const auto rep = app_statistical_test(h, {Region::box({0.0}, {0.05})}, 1000, 1);
  EXPECT_TRUE(rep.regions[0].insufficient);
  EXPECT_TRUE(rep.any_insufficient);
  EXPECT_FALSE(rep.passed());
}

TEST(StatisticalTest, ThreadCountDoesNotChangeTheReport) {
  const auto h = make_archimedean(5, 3, 1.0);
  const auto regions = random_regions(h.base(), 8, 3);
  const auto a = app_statistical_test(h, regions, 150000, 9, 1);
  const auto b = app_statistical_test(h, regions, 150000, 9, 3);
  EXPECT_EQ(a.chi2, b.chi2);
  for (std::size_t i = 0; i < regions.size(); ++i) EXPECT_EQ(a.regions[i].hits, b.regions[i].hits);
}

class ArchimedeanStatistics : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(ArchimedeanStatistics, PassesWithTwentyRegions) {
  const auto [n, k] = GetParam();
  const auto h = make_archimedean(n, k, 1.0);
  const auto rep = app_statistical_test(h, random_regions(h.base(), 20, 100 + n * 10 + k), 1000000, 31 + n * 10 + k);
  EXPECT_EQ(rep.dof, 20);
  EXPECT_GE(rep.p_value, 1e-3);
  EXPECT_LE(rep.over_threshold, 1);
  EXPECT_TRUE(rep.passed()) << "chi2 " << rep.chi2 << " p " << rep.p_value;
}

INSTANTIATE_TEST_SUITE_P(Arrays, ArchimedeanStatistics,
                         ::testing::Values(std::pair{3, 2}, std::pair{4, 3}, std::pair{5, 3}));

TEST(StatisticalTest, ParabolicControlFails) {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 2}, {4, 3}}) {
    const auto h = parabolic_control(n, k, 1.0);
    const auto rep = app_statistical_test(h, random_regions(h.base(), 20, 7), 1000000, 8);
    EXPECT_STREQ(rep.sampler, "product");
    EXPECT_GE(rep.over_threshold, 5) << n << "," << k;
    EXPECT_LT(rep.p_value, 1e-3);
    EXPECT_FALSE(rep.passed());
  }
}

}  // namespace
}  // namespace archimedes
