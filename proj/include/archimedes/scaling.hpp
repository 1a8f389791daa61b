#pragma once

// The codimension-k Archimedean scaling function f_k : [0, M_k] -> [0, 1].
//
// f_k is the inverse of F_k(y) = int_0^y t^(k-1) / sqrt(1 - t^(2k-2)) dt.
// Convention: f_k(0) = 0 and f_k(M_k) = 1, i.e. x measures distance from the
// rim of the base. The profile ODE is usually written with the variable
// measured from the pole instead; the two are related by x -> M_k - x, and
// only even powers of (x - M_k) survive so the Taylor data is unaffected.
//
// F_k is evaluated through the incomplete Beta function,
//   F_k(y) = B(y^(2k-2); k/(2k-2), 1/2) / (2k-2),
// and f_k by safeguarded Newton iteration seeded from a Chebyshev table.
// Near x = M_k, where f_k flattens out, the even Taylor series about M_k
// is used instead.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "archimedes/errors.hpp"
#include "archimedes/quadrature.hpp"
#include "archimedes/special_functions.hpp"

namespace archimedes {

/// Closed form M_k = sqrt(pi)/(2k-2) * Gamma(k/(2k-2)) / Gamma((2k-1)/(2k-2)).
inline double mk_closed_form(int k) {
  if (k < 2) throw DomainError("mk_closed_form: k must be >= 2");
  const double m = 2.0 * k - 2.0;
  return std::sqrt(std::numbers::pi) / m * gamma(k / m) / gamma((2.0 * k - 1.0) / m);
}

/// M_k by adaptive quadrature of t^(k-1)/sqrt(1 - t^(2k-2)) over [0, 1],
/// with the inverse-square-root singularity at t = 1 mapped away.
inline QuadratureResult mk_quadrature(int k, const QuadratureSpec& spec = {}) {
  if (k < 2) throw DomainError("mk_quadrature: k must be >= 2");
  const double m = 2.0 * k - 2.0;
  auto integrand = [k, m](double t, double gap) {
    const double one_minus = -std::expm1(m * std::log1p(-gap));
    return std::pow(t, k - 1) / std::sqrt(one_minus);
  };
  return integrate(integrand, 0.0, 1.0, spec, Singular::upper);
}

/// Coefficients a_j of f_k(x) = sum_j a_j (x - M_k)^(2j), a_0 = 1.
///
/// With v = (x - M_k)^2 and y = 1 + w(v), the profile ODE
/// y^(2k-2) (1 + y'^2) = 1 becomes 4 v w'(v)^2 = (1 + w)^(-(2k-2)) - 1.
/// Matching powers of v fixes a_1 = -(2k-2)/4 and then each a_p linearly
/// in terms of a_1..a_(p-1).
inline std::vector<double> scaling_series_coefficients(int k, int terms) {
  if (k < 2) throw DomainError("scaling_series_coefficients: k must be >= 2");
  const double m = 2.0 * k - 2.0;
  const double alpha = -m;
  std::vector<double> a(terms + 1, 0.0);
  std::vector<double> q(terms + 1, 0.0);  // coefficients of (1 + w)^alpha
  a[0] = 1.0;
  q[0] = 1.0;
  if (terms == 0) return a;
  a[1] = -m / 4.0;
  q[1] = alpha * a[1];
  for (int p = 2; p <= terms; ++p) {
    double q_known = 0.0;
    for (int j = 1; j < p; ++j) q_known += ((alpha + 1.0) * j - p) * a[j] * q[p - j];
    q_known /= p;
    double lhs_known = 0.0;
    for (int i = 2; i < p; ++i) {
      const int l = p + 1 - i;
      lhs_known += 4.0 * i * l * a[i] * a[l];
    }
    a[p] = (q_known - lhs_known) / (m * (1.0 - 2.0 * p));
    q[p] = q_known + alpha * a[p];
  }
  return a;
}

class ScalingFunction;
ScalingFunction make_scaling(int k, const QuadratureSpec& spec);

class ScalingFunction {
 public:
  static constexpr int kTableSize = 4096;
  static constexpr int kMaxSeriesTerms = 40;  // highest Taylor order is 2 * this
  static constexpr double kSeriesTolerance = 1e-15;

  struct TableEntry {
    double y;  // f_k value
    double x;  // f_k^{-1}(y)
  };

  /// f_k(x) together with 1 - f_k(x) carried at full relative precision.
  struct Value {
    double y;
    double gap;
  };

  int k() const noexcept { return k_; }
  double m_k() const noexcept { return m_k_; }
  double m_k_closed_form() const noexcept { return m_k_closed_; }
  const std::vector<TableEntry>& inverse_table() const noexcept { return table_; }
  /// Series path is used for m_k - x <= series_radius().
  double series_radius() const noexcept { return series_radius_; }
  /// Coefficients a_0..a_J of the truncated series in (x - m_k)^2.
  const std::vector<double>& series() const noexcept { return series_; }

  /// f_k^{-1}(y) for y in [0, 1].
  double inverse(double y) const {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("f_inverse: y must lie in [0, 1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return m_k_;
    const double m = exponent();
    const double z = std::pow(y, m);
    const double zc = -std::expm1(m * std::log(y));
    const double p = k_ / m;
    if (z <= 0.5) return incomplete_beta(z, zc, p, 0.5) / m;
    return m_k_ - incomplete_beta(zc, z, 0.5, p) / m;
  }

  /// f_k(x) for x in [0, m_k].
  double operator()(double x) const { return evaluate(x).y; }
  double value(double x) const { return evaluate(x).y; }

  /// f_k(x) with the gap 1 - f_k(x).
  Value evaluate(double x) const {
    x = clamp_domain(x);
    if (x == 0.0) return {0.0, 1.0};
    if (k_ == 2) {
      // Quarter circle.
      const double y = std::sqrt(x * (2.0 - x));
      return {y, (1.0 - x) * (1.0 - x) / (1.0 + y)};
    }
    const double u = x - m_k_;
    if (-u <= series_radius_) {
      const double w = series_tail(u * u);
      return {1.0 + w, -w};
    }
    const double y = solve(x);
    return {y, 1.0 - y};
  }

  /// f_k'(x) for x in (0, m_k]; zero at m_k, unbounded as x -> 0.
  double derivative(double x) const {
    if (!(x > 0.0)) throw DomainError("f_prime: x must be > 0");
    return derivative_from(evaluate(x));
  }

  /// f_k'(x) = sqrt(1 - y^(2k-2)) / y^(k-1) given y = f_k(x).
  double derivative_from(const Value& v) const {
    if (v.gap <= 0.0) return 0.0;
    if (v.y <= 0.0) throw DomainError("f_prime: derivative diverges at x = 0");
    const double one_minus = -std::expm1(exponent() * std::log1p(-v.gap));
    return std::sqrt(one_minus) / std::pow(v.y, k_ - 1);
  }

  /// Taylor coefficients f_k^(2j)(m_k)/(2j)! for 2j <= order.
  std::vector<double> taylor_at_mk(int order) const {
    if (order < 0 || order % 2 != 0) throw DomainError("taylor_at_mk: order must be even and >= 0");
    if (order > 2 * kMaxSeriesTerms) {
      throw DomainError("taylor_at_mk: order exceeds the implemented recursion depth");
    }
    return std::vector<double>(all_coefficients_.begin(), all_coefficients_.begin() + order / 2 + 1);
  }

  /// w(v) = sum_{j>=1} a_j v^j and dw/dv over the truncated series.
  std::pair<double, double> series_tail_and_slope(double v) const {
    double w = 0.0;
    double dw = 0.0;
    for (std::size_t j = series_.size() - 1; j >= 1; --j) {
      w = (w + series_[j]) * v;
      dw = dw * v + static_cast<double>(j) * series_[j];
    }
    return {w, dw};
  }

 private:
  friend ScalingFunction make_scaling(int k, const QuadratureSpec& spec);

  ScalingFunction() = default;

  double exponent() const noexcept { return 2.0 * k_ - 2.0; }

  double clamp_domain(double x) const {
    // Allow for rounding in callers that form m_k - something.
    if (x < 0.0 && x >= -1e-14 * m_k_) return 0.0;
    if (x > m_k_ && x <= m_k_ * (1.0 + 1e-12)) return m_k_;
    if (!(x >= 0.0 && x <= m_k_)) throw DomainError("f: x must lie in [0, m_k]");
    return x;
  }

  double series_tail(double v) const {
    double w = 0.0;
    for (std::size_t j = series_.size() - 1; j >= 1; --j) w = (w + series_[j]) * v;
    return w;
  }

  double inverse_slope(double y) const {
    const double m = exponent();
    return std::pow(y, k_ - 1) / std::sqrt(-std::expm1(m * std::log(y)));
  }

  double solve(double x) const {
    auto it = std::upper_bound(table_.begin(), table_.end(), x,
                               [](double v, const TableEntry& e) { return v < e.x; });
    const std::size_t hi_index = std::min<std::size_t>(
        static_cast<std::size_t>(it - table_.begin()), table_.size() - 1);
    const TableEntry& lo_entry = table_[hi_index - 1];
    const TableEntry& hi_entry = table_[hi_index];
    double lo = lo_entry.y;
    double hi = hi_entry.y;
    if (x == lo_entry.x) return lo;
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      (inverse(mid) < x ? lo : hi) = mid;
    }
    double y;
    if (hi_index == 1) {
      // F_k(y) ~ y^k / k near 0.
      y = std::clamp(std::pow(k_ * x, 1.0 / k_), lo, hi);
    } else {
      // Cubic Hermite start from the node slopes: about 1e-12 off, so one
      // Newton step usually finishes.
      const double dx = hi_entry.x - lo_entry.x;
      const double s = (x - lo_entry.x) / dx;
      const double s2 = s * s, s3 = s2 * s;
      y = (2 * s3 - 3 * s2 + 1) * lo_entry.y + (s3 - 2 * s2 + s) * dx * table_slope_[hi_index - 1] +
          (-2 * s3 + 3 * s2) * hi_entry.y + (s3 - s2) * dx * table_slope_[hi_index];
      y = std::clamp(y, lo, hi);
    }
    for (int iter = 0; iter < 100; ++iter) {
      const double g = inverse(y) - x;
      if (g == 0.0) return y;
      (g < 0.0 ? lo : hi) = y;
      const double newton = g / inverse_slope(y);
      if (std::abs(newton) <= 4.0 * std::numeric_limits<double>::epsilon() * y) return y;
      double next = y - newton;
      const bool bisected = !(next > lo && next < hi);
      if (bisected) next = 0.5 * (lo + hi);
      const double step = std::abs(next - y);
      y = next;
      // Quadratic convergence: after a Newton step this small the error is
      // below rounding, measured against the curvature scale min(y, 1 - y).
      if ((!bisected && step <= 1e-9 * std::min(y, 1.0 - y)) ||
          step <= 4.0 * std::numeric_limits<double>::epsilon() * y || hi - lo <= 1e-300) {
        break;
      }
    }
    return y;
  }

  int k_ = 2;
  double m_k_ = 1.0;
  double m_k_closed_ = 1.0;
  double series_radius_ = 0.25;
  std::vector<double> series_;
  std::vector<double> all_coefficients_;
  std::vector<TableEntry> table_;
  std::vector<double> table_slope_;  // f_k' at the table nodes
};

/// Builds f_k. M_k is computed by quadrature and cross-checked against its
/// closed form; a disagreement beyond 1e-8 relative is a ConstructionError.
inline ScalingFunction make_scaling(int k, const QuadratureSpec& spec = {}) {
  if (k < 2) throw DomainError("make_scaling: k must be >= 2");
  ScalingFunction s;
  s.k_ = k;
  s.m_k_ = mk_quadrature(k, spec).value;
  s.m_k_closed_ = mk_closed_form(k);
  if (std::abs(s.m_k_ - s.m_k_closed_) > 1e-8 * s.m_k_closed_) {
    throw ConstructionError("make_scaling: quadrature and closed-form M_k disagree");
  }
  s.all_coefficients_ = scaling_series_coefficients(k, ScalingFunction::kMaxSeriesTerms);

  // Smallest truncation whose first omitted term is below tolerance at the guard.
  s.series_radius_ = 0.25 * s.m_k_;
  const double v_guard = s.series_radius_ * s.series_radius_;
  int terms = 1;
  while (terms < ScalingFunction::kMaxSeriesTerms &&
         std::abs(s.all_coefficients_[terms + 1]) * std::pow(v_guard, terms + 1) >=
             ScalingFunction::kSeriesTolerance) {
    ++terms;
  }
  if (terms >= ScalingFunction::kMaxSeriesTerms) {
    throw ConstructionError("make_scaling: Taylor series does not converge at the guard radius");
  }
  s.series_.assign(s.all_coefficients_.begin(), s.all_coefficients_.begin() + terms + 1);

  s.table_.resize(ScalingFunction::kTableSize);
  for (int i = 0; i < ScalingFunction::kTableSize; ++i) {
    const double theta = std::numbers::pi * i / (ScalingFunction::kTableSize - 1);
    double y = 0.5 * (1.0 - std::cos(theta));
    if (i == 0) y = 0.0;
    if (i == ScalingFunction::kTableSize - 1) y = 1.0;
    s.table_[i] = {y, s.inverse(y)};
  }
  s.table_slope_.resize(ScalingFunction::kTableSize);
  for (int i = 1; i < ScalingFunction::kTableSize; ++i) s.table_slope_[i] = 1.0 / s.inverse_slope(s.table_[i].y);
  return s;
}

inline std::shared_ptr<const ScalingFunction> make_shared_scaling(int k,
                                                                  const QuadratureSpec& spec = {}) {
  return std::make_shared<const ScalingFunction>(make_scaling(k, spec));
}

}  // namespace archimedes
