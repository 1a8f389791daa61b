#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "archimedes/quadrature.hpp"
#include "archimedes/special_functions.hpp"

namespace archimedes {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Gamma, KnownValues) {
  EXPECT_NEAR(gamma(0.5), 1.7724538509055160, 1e-15);
  EXPECT_NEAR(gamma(1.0), 1.0, 1e-15);
  EXPECT_NEAR(gamma(5.0), 24.0, 24.0 * 1e-14);
}

TEST(Gamma, MatchesStdTgammaOnWorkingRange) {
  for (double x = 0.05; x <= 50.0; x += 0.0731) {
    const double expected = std::tgamma(x);
    EXPECT_LE(std::abs(gamma(x) - expected), 1e-13 * expected) << "x = " << x;
  }
}

TEST(Gamma, Recurrence) {
  for (int i = 1; i <= 100; ++i) {
    const double x = 0.1 * i;
    EXPECT_LE(std::abs(gamma(x + 1.0) - x * gamma(x)), 1e-12 * gamma(x + 1.0)) << "x = " << x;
  }
}

TEST(Gamma, Reflection) {
  for (double x = 0.05; x < 1.0; x += 0.05) {
    EXPECT_NEAR(gamma(x) * gamma(1.0 - x) * std::sin(kPi * x) / kPi, 1.0, 1e-13);
  }
}

TEST(Gamma, LogGammaConsistent) {
  for (double x = 0.07; x < 60.0; x *= 1.37) {
    EXPECT_NEAR(log_gamma(x), std::log(gamma(x)), 1e-13 * std::max(1.0, std::abs(log_gamma(x))));
  }
  EXPECT_NEAR(log_gamma(500.0), std::lgamma(500.0), 1e-12 * std::lgamma(500.0));
}

TEST(Gamma, DomainErrors) {
  EXPECT_THROW(gamma(0.0), DomainError);
  EXPECT_THROW(gamma(-1.5), DomainError);
  EXPECT_THROW(log_gamma(0.0), DomainError);
}

TEST(IncompleteBeta, Endpoints) {
  EXPECT_EQ(incomplete_beta(0.0, 0.7, 0.5), 0.0);
  for (double p : {0.3, 0.5, 0.75, 2.0, 3.5}) {
    for (double q : {0.5, 1.0, 2.5}) {
      const double complete = gamma(p) * gamma(q) / gamma(p + q);
      EXPECT_NEAR(incomplete_beta(1.0, p, q), complete, 1e-14 * complete);
    }
  }
  const double half_half = gamma(0.5) * gamma(0.5) / gamma(1.0);
  EXPECT_NEAR(incomplete_beta(1.0, 0.5, 0.5), half_half, 1e-14);
  EXPECT_NEAR(half_half, kPi, 1e-14);
}

TEST(IncompleteBeta, ClosedFormsForIntegerParameters) {
  // B(z; 1, q) = (1 - (1-z)^q) / q and B(z; p, 1) = z^p / p.
  for (double z = 0.0; z <= 1.0; z += 0.05) {
    EXPECT_NEAR(incomplete_beta(z, 1.0, 2.5), (1.0 - std::pow(1.0 - z, 2.5)) / 2.5, 1e-14);
    EXPECT_NEAR(incomplete_beta(z, 3.0, 1.0), std::pow(z, 3.0) / 3.0, 1e-14);
  }
}

TEST(IncompleteBeta, MonotoneInZ) {
  for (double p : {0.55, 1.0, 4.0}) {
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double z = i / 1000.0;
      const double value = incomplete_beta(z, p, 0.5);
      EXPECT_GE(value, prev) << "p = " << p << " z = " << z;
      prev = value;
    }
  }
}

TEST(IncompleteBeta, AgreesWithQuadratureForScalingParameters) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  for (int k = 2; k <= 10; ++k) {
    const double p = k / (2.0 * k - 2.0);
    auto lower = [p](double u) { return std::pow(u, p - 1.0) / std::sqrt(1.0 - u); };
    for (double z : {0.1, 0.35, 0.7, 0.95}) {
      const double expected = integrate(lower, 0.0, z, spec, Singular::lower).value;
      EXPECT_NEAR(incomplete_beta(z, p, 0.5), expected, 1e-10) << "k = " << k << " z = " << z;
    }
    auto both = [p](double u, double gap) {
      const double one_minus = u > 0.5 ? gap : 1.0 - u;
      return std::pow(u, p - 1.0) / std::sqrt(one_minus);
    };
    const double whole = integrate(both, 0.0, 1.0, spec, Singular::both).value;
    EXPECT_NEAR(incomplete_beta(1.0, p, 0.5), whole, 1e-10) << "k = " << k;
  }
}

TEST(IncompleteBeta, ComplementOverloadKeepsPrecisionNearOne) {
  const double gap = 1e-12;
  const double p = 0.75;
  const double full = beta(p, 0.5);
  // B(1 - g; p, 1/2) = B(p, 1/2) - 2 sqrt(g) + O(g^{3/2}).
  EXPECT_NEAR(full - incomplete_beta(1.0 - gap, gap, p, 0.5), 2.0 * std::sqrt(gap), 1e-15);
}

TEST(IncompleteBeta, DomainErrors) {
  EXPECT_THROW(incomplete_beta(-0.1, 1.0, 1.0), DomainError);
  EXPECT_THROW(incomplete_beta(1.1, 1.0, 1.0), DomainError);
  EXPECT_THROW(incomplete_beta(0.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(incomplete_beta(0.5, 1.0, -2.0), DomainError);
}

TEST(IncompleteGamma, ChiSquareTails) {
  for (double x : {0.1, 1.0, 3.0, 10.0, 40.0}) {
    EXPECT_NEAR(chi_square_sf(x, 2.0), std::exp(-0.5 * x), 1e-14);
    EXPECT_NEAR(chi_square_sf(x, 1.0), std::erfc(std::sqrt(0.5 * x)), 1e-13);
  }
  EXPECT_NEAR(regularized_gamma_p(3.0, 2.0) + regularized_gamma_q(3.0, 2.0), 1.0, 1e-15);
}

TEST(VolumeFormulas, SpheresAndBalls) {
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4.0 * kPi, 1e-14);
  EXPECT_NEAR(unit_sphere_area(4), 2.0 * kPi * kPi, 1e-13);
  EXPECT_NEAR(ball_volume(1, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(ball_volume(2, 1.0), kPi, 1e-14);
  EXPECT_NEAR(ball_volume(3, 2.0), 4.0 * kPi * 8.0 / 3.0, 1e-12);
}

}  // namespace
}  // namespace archimedes
