#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "archimedes/base.hpp"
#include "archimedes/random.hpp"

namespace archimedes {
namespace {

constexpr double kPi = std::numbers::pi;

BaseDomain unit_square() { return BaseDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }
BaseDomain square_side_two() { return BaseDomain::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); }

// Nearest ellipse point by dense angular scan plus golden-section polish.
double ellipse_distance_oracle(double a, double b, double px, double py) {
  auto dist = [&](double th) { return std::hypot(a * std::cos(th) - px, b * std::sin(th) - py); };
  const int samples = 20000;
  int best = 0;
  for (int i = 1; i < samples; ++i) {
    if (dist(2 * kPi * i / samples) < dist(2 * kPi * best / samples)) best = i;
  }
  double lo = 2 * kPi * (best - 1) / samples;
  double hi = 2 * kPi * (best + 1) / samples;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    (dist(m1) < dist(m2) ? hi : lo) = (dist(m1) < dist(m2) ? m2 : m1);
  }
  return dist(0.5 * (lo + hi));
}

// Uniform interior points (by Halton) that clear the singular band.
std::vector<Point> clear_points(const BaseDomain& d, int count) {
  std::vector<Point> pts;
  Point x(d.dim());
  for (std::uint64_t i = 1; static_cast<int>(pts.size()) < count; ++i) {
    halton(i, x);
    for (int j = 0; j < d.dim(); ++j) x[j] = d.bbox_lo()[j] + (d.bbox_hi()[j] - d.bbox_lo()[j]) * x[j];
    const double h = 1e-5 * d.inradius();
    if (d.signed_distance(x) <= 2.0 * h) continue;
    if (d.singular_set_distance(x) <= d.singular_band() + 2.0 * h) continue;
    pts.push_back(x);
  }
  return pts;
}

TEST(Ball, DistanceExamples) {
  const double m = 0.75;
  const auto d = BaseDomain::ball({0.0, 0.0, 0.0}, m);
  EXPECT_EQ(d.distance_to_boundary(Point{0, 0, 0}), m);
  EXPECT_NEAR(d.distance_to_boundary(Point{0.3, 0.0, 0.4}), m - 0.5, 1e-15);
  EXPECT_NEAR(d.signed_distance(Point{0.0, 1.5, 0.0}), -0.75, 1e-15);
  EXPECT_THROW(d.distance_to_boundary(Point{1.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(d.distance_to_boundary(Point{1.0, 0.0}), DomainError);
  const auto unit = BaseDomain::ball({0.0, 0.0}, 1.0);
  EXPECT_EQ(unit.signed_distance(Point{2.0, 0.0}), -1.0);
}

TEST(Ball, GradientAndSingularSet) {
  const auto d = BaseDomain::ball({0.0, 0.0}, 2.0);
  const Point g = d.omega_gradient(Point{0.6, -0.8});
  EXPECT_NEAR(g[0], -0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.8, 1e-15);
  EXPECT_EQ(d.singular_set_distance(Point{0.0, 0.0}), 0.0);
  EXPECT_THROW(d.omega_gradient(Point{0.0, 0.0}), SingularSetError);
  EXPECT_THROW(d.omega_gradient(Point{1e-4, 0.0}), SingularSetError);
  EXPECT_NEAR(d.singular_band(), 2e-3, 1e-18);
}

TEST(Ball, MaximumOfOmegaIsRadiusAtCenter) {
  const auto d = BaseDomain::ball({0.1, -0.2}, 0.6);
  double best = 0.0;
  Point x(2);
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      x = {0.1 - 0.6 + 1.2 * i / 200.0, -0.2 - 0.6 + 1.2 * j / 200.0};
      if (d.contains(x)) best = std::max(best, d.distance_to_boundary(x));
    }
  }
  EXPECT_NEAR(best, 0.6, 1e-15);
  EXPECT_EQ(d.distance_to_boundary(Point{0.1, -0.2}), 0.6);
}

TEST(Ball, ValidatesParameters) {
  EXPECT_THROW(BaseDomain::ball({0.0}, 0.0), DomainError);
  EXPECT_THROW(BaseDomain::ball({}, 1.0), DomainError);
  EXPECT_THROW(BaseDomain::ball({0.0}, -1.0), DomainError);
}

TEST(Polygon, DistanceExamples) {
  const auto sq = unit_square();
  EXPECT_NEAR(sq.distance_to_boundary(Point{0.3, 0.5}), 0.3, 1e-15);
  EXPECT_EQ(sq.signed_distance(Point{1.0, 1.0}), 0.0);
  EXPECT_EQ(sq.signed_distance(Point{0.0, 0.0}), 0.0);
  EXPECT_NEAR(sq.signed_distance(Point{2.0, 2.0}), -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sq.signed_distance(Point{0.5, -0.25}), -0.25, 1e-15);
  EXPECT_THROW(sq.distance_to_boundary(Point{1.5, 0.5}), DomainError);
  const Point inside{0.2, 0.7};
  EXPECT_EQ(sq.signed_distance(inside), sq.distance_to_boundary(inside));
}

TEST(Polygon, GradientPointsAwayFromNearestEdge) {
  const auto sq = unit_square();
  const Point g = sq.omega_gradient(Point{0.5, 0.1});
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 1.0);
  EXPECT_THROW(sq.omega_gradient(Point{0.5, 0.5}), SingularSetError);
}

TEST(Polygon, SquareMedialAxis) {
  const auto sq = square_side_two();
  EXPECT_EQ(sq.singular_set_distance(Point{0.0, 0.0}), 0.0);
  // The medial axis of a square is its two diagonals.
  EXPECT_NEAR(sq.singular_set_distance(Point{0.9, 0.0}), 0.9 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sq.singular_set_distance(Point{0.5, 0.5}), 0.0, 1e-15);
  EXPECT_NEAR(sq.inradius(), 1.0, 1e-12);
}

TEST(Polygon, MedialAxisMatchesMultiplicityScan) {
  // Oracle: grid points where the two nearest edges are (nearly) equidistant
  // approximate Sigma; distance to the nearest such point.
  const auto poly = BaseDomain::polygon({{0, 0}, {3, 0}, {4, 1.5}, {2, 3}, {-0.5, 1.5}});
  std::vector<Vec2> sigma;
  const int grid = 500;
  const double h = 5.0 / grid;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      const Vec2 p{-0.5 + 4.5 * i / grid, 3.0 * j / grid};
      double d1 = 1e300, d2 = 1e300;
      for (const auto& e : poly.edges()) {
        const double s = e.slack(p);
        if (s < d1) {
          d2 = d1;
          d1 = s;
        } else if (s < d2) {
          d2 = s;
        }
      }
      if (d1 >= 0.0 && d2 - d1 < 0.5 * h) sigma.push_back(p);
    }
  }
  ASSERT_GT(sigma.size(), 100u);
  for (const Vec2 q : {Vec2{1.0, 0.6}, Vec2{2.5, 1.0}, Vec2{0.5, 1.2}, Vec2{3.2, 1.3}}) {
    double best = 1e300;
    for (const Vec2& s : sigma) best = std::min(best, norm(q - s));
    EXPECT_NEAR(poly.singular_set_distance(Point{q.x, q.y}), best, 2.0 * h) << q.x << "," << q.y;
  }
}

TEST(Polygon, Validation) {
  EXPECT_THROW(BaseDomain::polygon({{0, 0}, {1, 0}}), DomainError);
  EXPECT_THROW(BaseDomain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), DomainError);  // clockwise
  EXPECT_THROW(BaseDomain::polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), DomainError);  // collinear
  EXPECT_THROW(BaseDomain::polygon({{0, 0}, {2, 0}, {1, 1}, {1.2, -0.5}}), DomainError);
  std::vector<Vec2> star;
  for (int i = 0; i < 5; ++i) {
    const double t = 2.0 * kPi * (2 * i) / 5.0;
    star.push_back({std::cos(t), std::sin(t)});
  }
  EXPECT_THROW(BaseDomain::polygon(star), DomainError);
}

TEST(Polygon, RegularHexagon) {
  const auto hex = BaseDomain::regular_polygon(6, 0.4);
  EXPECT_NEAR(hex.inradius(), 0.4, 1e-12);
  EXPECT_NEAR(hex.domain_volume(), 2.0 * std::sqrt(3.0) * 0.16, 1e-14);
  EXPECT_NEAR(hex.distance_to_boundary(Point{0.0, 0.0}), 0.4, 1e-15);
  EXPECT_NEAR(hex.bbox_lo()[1], -0.4, 1e-15);
  // Six spokes from the center to the vertices.
  EXPECT_NEAR(hex.singular_set_distance(Point{0.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(hex.singular_set_distance(Point{0.0, -0.2}), 0.2 * std::sin(kPi / 6.0), 1e-14);
}

TEST(Polygon, CsvLoader) {
  const std::string path = ::testing::TempDir() + "square.csv";
  {
    std::ofstream out(path);
    out << "x,y\n0,0\r\n1,0\n\n# comment\n1,1\n0,1\n";
  }
  const auto v = BaseDomain::read_polygon_csv(path);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[2].x, 1.0);
  EXPECT_EQ(BaseDomain::polygon(v).domain_volume(), 1.0);
  {
    std::ofstream out(path);
    out << "0,0\n1,zero\n";
  }
  EXPECT_THROW(BaseDomain::read_polygon_csv(path), DomainError);
  EXPECT_THROW(BaseDomain::read_polygon_csv(path + ".missing"), DomainError);
  std::remove(path.c_str());
}

TEST(Ellipse, DistanceMatchesScanOracle) {
  const double a = 2.0, b = 0.7;
  const auto e = BaseDomain::ellipse({0.0, 0.0}, a, b);
  for (const auto& [x, y] : std::vector<std::pair<double, double>>{
           {0.3, 0.2}, {1.5, 0.1}, {-1.2, -0.5}, {0.0, 0.3}, {1.0, 0.0}, {1.9, 0.0}, {2.5, 1.0}, {0.0, -2.0}}) {
    const double expected = ellipse_distance_oracle(a, b, x, y);
    const double inside = (x / a) * (x / a) + (y / b) * (y / b) <= 1.0 ? 1.0 : -1.0;
    EXPECT_NEAR(e.signed_distance(Point{x, y}), inside * expected, 1e-12) << x << "," << y;
  }
  // Tall ellipses go through the same code with the axes swapped.
  const auto tall = BaseDomain::ellipse({1.0, 1.0}, 0.5, 1.5);
  EXPECT_NEAR(tall.signed_distance(Point{1.2, 1.7}), ellipse_distance_oracle(0.5, 1.5, 0.2, 0.7), 1e-12);
}

TEST(Ellipse, VolumeAndSingularSegment) {
  const auto e = BaseDomain::ellipse({0.0, 0.0}, 2.0, 1.0);
  EXPECT_NEAR(e.domain_volume(), 2.0 * kPi, 1e-14);
  EXPECT_EQ(e.inradius(), 1.0);
  // Sigma is the segment |x| <= (a^2 - b^2)/a = 1.5 on the major axis.
  EXPECT_EQ(e.singular_set_distance(Point{1.0, 0.0}), 0.0);
  EXPECT_NEAR(e.singular_set_distance(Point{1.8, 0.1}), std::hypot(0.3, 0.1), 1e-15);
  EXPECT_NEAR(e.singular_set_distance(Point{0.2, -0.4}), 0.4, 1e-15);
  EXPECT_THROW(BaseDomain::ellipse({0, 0}, 0.0, 1.0), DomainError);
}

TEST(Volumes, ClosedForms) {
  EXPECT_NEAR(BaseDomain::ball({0.0, 0.0}, 1.0).domain_volume(), kPi, 1e-14);
  for (int m = 1; m <= 6; ++m) {
    const double delta = 0.8;
    const double expected = 2.0 * std::pow(kPi, m / 2.0) * std::pow(delta, m) / (m * std::tgamma(m / 2.0));
    EXPECT_NEAR(BaseDomain::ball(Point(m, 0.0), delta).domain_volume(), expected, 1e-14) << m;
  }
  EXPECT_EQ(unit_square().domain_volume(), 1.0);
}

class EikonalProperty : public ::testing::TestWithParam<int> {};

BaseDomain eikonal_domain(int which) {
  switch (which) {
    case 0: return BaseDomain::ball({0.0, 0.0}, 0.8);
    case 1: return BaseDomain::ball({0.1, 0.2, -0.1}, 1.3);
    case 2: return BaseDomain::ellipse({0.2, -0.1}, 1.5, 0.6);
    case 3: return BaseDomain::regular_polygon(6, 0.45);
    default: return BaseDomain::polygon({{0, 0}, {3, 0}, {4, 1.5}, {2, 3}, {-0.5, 1.5}});
  }
}

TEST_P(EikonalProperty, FiniteDifferenceGradientHasUnitNorm) {
  const auto d = eikonal_domain(GetParam());
  const double h = 1e-5 * d.inradius();
  Point x(d.dim()), g(d.dim());
  double worst_norm = 0.0, worst_grad = 0.0;
  for (const Point& p : clear_points(d, 10000)) {
    d.omega_gradient(p, g);
    double n2 = 0.0, diff = 0.0;
    for (int j = 0; j < d.dim(); ++j) {
      x = p;
      x[j] += h;
      const double up = d.distance_to_boundary(x);
      x[j] -= 2.0 * h;
      const double down = d.distance_to_boundary(x);
      const double fd = (up - down) / (2.0 * h);
      n2 += fd * fd;
      diff = std::max(diff, std::abs(fd - g[j]));
    }
    worst_norm = std::max(worst_norm, std::abs(std::sqrt(n2) - 1.0));
    worst_grad = std::max(worst_grad, diff);
    double gn = 0.0;
    for (double c : g) gn += c * c;
    ASSERT_NEAR(std::sqrt(gn), 1.0, 1e-15);
  }
  EXPECT_LE(worst_norm, 1e-6);
  EXPECT_LE(worst_grad, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Domains, EikonalProperty, ::testing::Range(0, 5));

}  // namespace
}  // namespace archimedes
