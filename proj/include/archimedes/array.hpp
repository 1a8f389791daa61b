#pragma once

// Spherical arrays H = Ω^{n-k} ×_f S^{k-1} in R^n: over each base point x''
// sits a (k-1)-sphere of radius f(x''). Points of R^n are ordered
// (x', x'') with x' in R^k the fiber coordinates and x'' in R^{n-k} the
// base coordinates.
//
// The Archimedean array uses f = R f_k(omega / R), which makes the
// projection onto the base measure preserving up to the constant
// Vol(S^{k-1}(R)):  (f/R)^{k-1} sqrt(1 + |grad f|^2) = 1.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "archimedes/base.hpp"
#include "archimedes/errors.hpp"
#include "archimedes/parallel.hpp"
#include "archimedes/quadrature.hpp"
#include "archimedes/random.hpp"
#include "archimedes/region.hpp"
#include "archimedes/scaling.hpp"
#include "archimedes/special_functions.hpp"
#include "archimedes/summation.hpp"

namespace archimedes {

enum class WarpMode { archimedean, cylinder, custom };

inline const char* to_string(WarpMode m) {
  switch (m) {
    case WarpMode::archimedean: return "archimedean";
    case WarpMode::cylinder: return "cylinder";
    case WarpMode::custom: return "custom";
  }
  return "?";
}

/// User-supplied warping. Without a gradient, derivatives are taken by
/// central differences.
struct CustomWarp {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::string label = "custom";
};

/// Vol(A_k^{n-1}(R)) = Vol(S^{k-1}(1)) Vol(B^{n-k}(M_k)) R^{n-1} written out
/// with Gamma functions.
inline double archimedean_volume(int n, int k, double r) {
  if (n < 3 || k < 2 || k > n - 1) throw DomainError("archimedean_volume: need n >= 3 and 2 <= k <= n-1");
  const int d = n - k;
  const double pi = std::numbers::pi;
  const double p = k / (2.0 * k - 2.0);
  const double q = (2.0 * k - 1.0) / (2.0 * k - 2.0);
  const double log_value = 0.5 * (2.0 * n - k) * std::log(pi) - (d - 2) * std::log(2.0) -
                           d * std::log(k - 1.0) - std::log(static_cast<double>(d)) + d * log_gamma(p) -
                           log_gamma(0.5 * d) - log_gamma(0.5 * k) - d * log_gamma(q);
  return std::exp(log_value) * std::pow(r, n - 1);
}

/// (n-1)-volume of the equizonal ovaloid A_{n-1}^{n-1}(R).
inline double equizonal_volume(int n, double r) {
  if (n < 3) throw DomainError("equizonal_volume: need n >= 3");
  const double pi = std::numbers::pi;
  return 2.0 * std::pow(pi, 0.5 * n) / (n - 2.0) * gamma((n - 1.0) / (2.0 * n - 4.0)) /
         (gamma(0.5 * (n - 1.0)) * gamma((2.0 * n - 3.0) / (2.0 * n - 4.0))) * std::pow(r, n - 1);
}

/// n-volume enclosed by the equizonal ovaloid A_{n-1}^{n-1}(R).
inline double equizonal_enclosed_volume(int n, double r) {
  if (n < 3) throw DomainError("equizonal_enclosed_volume: need n >= 3");
  const double pi = std::numbers::pi;
  return 2.0 * std::pow(pi, 0.5 * n) / ((n - 1.0) * (n - 2.0)) * gamma((n - 1.0) / (n - 2.0)) /
         (gamma(0.5 * (n - 1.0)) * gamma((3.0 * n - 4.0) / (2.0 * n - 4.0))) * std::pow(r, n);
}

struct TotalVolume {
  QuadratureResult numeric;
  std::optional<double> closed_form;
};

struct EnclosedVolume {
  QuadratureResult quadrature;
  double monte_carlo = 0.0;
  double monte_carlo_error = 0.0;  // one standard error
  long samples = 0;
  std::optional<double> closed_form;
};

class SphericalArray {
 public:
  static SphericalArray archimedean(int n, int k, double r, BaseDomain base,
                                    std::shared_ptr<const ScalingFunction> scaling = nullptr) {
    if (!scaling) scaling = make_shared_scaling(k);
    if (scaling->k() != k) throw DomainError("scaling function has the wrong codimension");
    SphericalArray h(n, k, r, std::move(base), WarpMode::archimedean);
    if (h.base_.inradius() > r * scaling->m_k() * (1.0 + 1e-12)) {
      throw DomainError("archimedean warp needs inradius <= R * M_k");
    }
    h.scaling_ = std::move(scaling);
    if (const auto* b = h.base_.as_ball()) {
      // Series about the center when omega is close to its maximum R*M_k.
      h.ball_series_ = std::abs(b->radius - r * h.scaling_->m_k()) <= 1e-12 * b->radius;
    }
    return h;
  }

  static SphericalArray cylinder(int n, int k, double r, BaseDomain base) {
    return SphericalArray(n, k, r, std::move(base), WarpMode::cylinder);
  }

  static SphericalArray custom(int n, int k, double r, BaseDomain base, CustomWarp warp) {
    if (!warp.value) throw DomainError("custom warp needs a value function");
    SphericalArray h(n, k, r, std::move(base), WarpMode::custom);
    h.custom_ = std::move(warp);
    return h;
  }

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  int base_dim() const noexcept { return n_ - k_; }
  double r_scale() const noexcept { return r_; }
  WarpMode mode() const noexcept { return mode_; }
  const BaseDomain& base() const noexcept { return base_; }
  const ScalingFunction* scaling() const noexcept { return scaling_.get(); }
  const CustomWarp* custom_warp() const noexcept { return mode_ == WarpMode::custom ? &custom_ : nullptr; }
  /// Vol(S^{k-1}(1)), the constant of the projection property at R = 1.
  double sphere_constant() const noexcept { return sphere_area_; }
  /// Within this distance of the boundary the surface density is replaced
  /// by its limit.
  double boundary_offset() const noexcept { return 1e-6 * base_.inradius(); }

  /// Fiber radius f(x'').
  double warping(std::span<const double> x) const {
    check_base_point(x);
    switch (mode_) {
      case WarpMode::cylinder:
        if (base_.signed_distance(x) < -outside_tolerance()) throw DomainError("warping: point outside the base");
        return r_;
      case WarpMode::custom:
        if (base_.signed_distance(x) < -outside_tolerance()) throw DomainError("warping: point outside the base");
        return custom_.value(x);
      case WarpMode::archimedean: {
        if (ball_series_) {
          const double v = center_v(x);
          if (v <= series_v_limit()) return r_ * (1.0 + scaling_->series_tail_and_slope(v).first);
        }
        const double omega = base_.distance_to_boundary(x);
        return r_ * scaling_->value(std::min(omega / r_, scaling_->m_k()));
      }
    }
    return 0.0;
  }

  /// grad f(x''). Throws SingularSetError inside the singular band and
  /// DomainError on the boundary, where f_k' diverges.
  void warping_gradient(std::span<const double> x, std::span<double> out) const {
    check_base_point(x);
    const int d = base_dim();
    switch (mode_) {
      case WarpMode::cylinder:
        if (base_.signed_distance(x) < -outside_tolerance()) throw DomainError("warping_gradient: point outside the base");
        std::fill(out.begin(), out.begin() + d, 0.0);
        return;
      case WarpMode::custom:
        if (base_.signed_distance(x) < -outside_tolerance()) throw DomainError("warping_gradient: point outside the base");
        if (custom_.gradient) {
          custom_.gradient(x, out);
        } else {
          custom_fd_gradient(x, out);
        }
        return;
      case WarpMode::archimedean: {
        if (ball_series_) {
          const double v = center_v(x);
          if (v <= series_v_limit()) {
            const auto& c = base_.as_ball()->center;
            const double slope = scaling_->series_tail_and_slope(v).second;
            for (int i = 0; i < d; ++i) out[i] = 2.0 * slope * (x[i] - c[i]) / r_;
            return;
          }
        }
        const double omega = base_.distance_to_boundary(x);
        if (!(omega > 0.0)) throw DomainError("warping_gradient: f_k' diverges on the boundary");
        base_.omega_gradient(x, out);
        const double slope = scaling_->derivative_from(scaling_->evaluate(std::min(omega / r_, scaling_->m_k())));
        for (int i = 0; i < d; ++i) out[i] *= slope;
        return;
      }
    }
  }

  Point warping_gradient(std::span<const double> x) const {
    Point g(base_dim());
    warping_gradient(x, g);
    return g;
  }

  /// (f/R)^{k-1} sqrt(1 + |grad f|^2) - 1; zero exactly when the projection
  /// property holds at x''.
  double app_residual(std::span<const double> x) const {
    std::array<double, kMaxDim> g{};
    warping_gradient(x, std::span<double>(g.data(), base_dim()));
    double g2 = 0.0;
    for (int i = 0; i < base_dim(); ++i) g2 += g[i] * g[i];
    const double ratio = warping(x) / r_;
    return std::pow(ratio, k_ - 1) * std::sqrt(1.0 + g2) - 1.0;
  }

  /// Surface density over the base: Vol(S^{k-1}(1)) f^{k-1} sqrt(1 + |grad f|^2).
  /// Singular points (measure zero) use a one-sided gradient.
  double surface_density(std::span<const double> x) const {
    const double c = density_scale_;
    if (mode_ == WarpMode::cylinder) return c;
    std::array<double, kMaxDim> g{};
    std::span<double> grad(g.data(), base_dim());
    double f;
    if (mode_ == WarpMode::archimedean) {
      if (ball_series_ && center_v(x) <= series_v_limit()) {
        f = warping(x);
        warping_gradient(x, grad);
      } else {
        const double omega = std::max(0.0, base_.signed_distance(x));
        // 0 * inf at the rim; the density tends to its interior value.
        if (omega <= boundary_offset()) return c;
        const auto v = scaling_->evaluate(std::min(omega / r_, scaling_->m_k()));
        f = r_ * v.y;
        base_.gradient_unchecked(x, grad);
        const double slope = scaling_->derivative_from(v);
        for (double& gi : grad) gi *= slope;
      }
    } else {
      f = custom_.value(x);
      if (custom_.gradient) custom_.gradient(x, grad);
      else custom_fd_gradient(x, grad);
    }
    double g2 = 0.0;
    for (double gi : grad) g2 += gi * gi;
    return sphere_area_ * (k_ == 2 ? f : std::pow(f, k_ - 1)) * std::sqrt(1.0 + g2);
  }

  /// (n-1)-volume of the part of H lying over U ∩ Ω.
  QuadratureResult patch_volume(const Region& u, RegionSpec spec = {}) const {
    spec.scale = density_scale_;
    return integrate_over(base_, &u, [this](std::span<const double> x) { return surface_density(x); }, spec);
  }

  /// Total (n-1)-volume; the closed form is included for Archimedean
  /// arrays over a ball of radius R M_k.
  TotalVolume total_volume(RegionSpec spec = {}) const {
    spec.scale = density_scale_;
    TotalVolume t;
    t.numeric = integrate_over(base_, nullptr, [this](std::span<const double> x) { return surface_density(x); }, spec);
    if (mode_ == WarpMode::archimedean && ball_series_) t.closed_form = archimedean_volume(n_, k_, r_);
    return t;
  }

  /// n-volume of {(x', x'') : |x'| <= f(x'')}: quadrature of Vol(B^k(f))
  /// over the base, cross-checked by hit-or-miss sampling in a box around H.
  EnclosedVolume enclosed_volume(long samples, std::uint64_t seed, int threads = 1, RegionSpec spec = {}) const {
    if (mode_ == WarpMode::custom) throw DomainError("enclosed_volume: custom warps are not supported");
    EnclosedVolume e;
    const double unit_ball = ball_volume(k_, 1.0);
    spec.scale = unit_ball * std::pow(r_, k_);
    e.quadrature = integrate_over(
        base_, nullptr, [&](std::span<const double> x) { return unit_ball * std::pow(warping(x), k_); }, spec);
    if (mode_ == WarpMode::archimedean && ball_series_ && k_ == n_ - 1) {
      e.closed_form = equizonal_enclosed_volume(n_, r_);
    }
    if (samples > 0) {
      const int d = base_dim();
      double box = std::pow(2.0 * r_, k_);
      for (int i = 0; i < d; ++i) box *= base_.bbox_hi()[i] - base_.bbox_lo()[i];
      const std::size_t chunks = (static_cast<std::uint64_t>(samples) + kChunkSamples - 1) / kChunkSamples;
      std::vector<long> hits(chunks, 0);
      for_each_chunk(chunks, threads, [&](std::size_t c) {
        RandomStream rng(seed, c);
        const long begin = static_cast<long>(c * kChunkSamples);
        const long end = std::min<long>(samples, begin + static_cast<long>(kChunkSamples));
        std::array<double, kMaxDim> xb{};
        std::span<const double> base_point(xb.data(), d);
        long local = 0;
        for (long s = begin; s < end; ++s) {
          double fiber2 = 0.0;
          for (int i = 0; i < k_; ++i) {
            const double t = rng.uniform(-r_, r_);
            fiber2 += t * t;
          }
          for (int i = 0; i < d; ++i) xb[i] = rng.uniform(base_.bbox_lo()[i], base_.bbox_hi()[i]);
          if (fiber2 > r_ * r_ || !base_.contains(base_point)) continue;
          const double f = warping(base_point);
          if (fiber2 <= f * f) ++local;
        }
        hits[c] = local;
      });
      long total = 0;
      for (long h : hits) total += h;
      const double p = static_cast<double>(total) / samples;
      e.monte_carlo = box * p;
      e.monte_carlo_error = box * std::sqrt(p * (1.0 - p) / samples);
      e.samples = samples;
    }
    return e;
  }

  /// |x'|^2 - f(x'')^2 for x = (x', x'') in R^n; zero on H.
  double implicit_eval(std::span<const double> x) const {
    check_ambient_point(x);
    double fiber2 = 0.0;
    for (int i = 0; i < k_; ++i) fiber2 += x[i] * x[i];
    const double f = warping(x.subspan(k_));
    return fiber2 - f * f;
  }

  /// f_k^{-1}(|x'|/R) - omega(x'')/R, the form of the implicit equation that
  /// stays smooth across the rim of the base. Archimedean arrays only.
  double boundary_form_eval(std::span<const double> x) const {
    check_ambient_point(x);
    if (mode_ != WarpMode::archimedean) throw DomainError("boundary_form_eval: archimedean arrays only");
    double fiber2 = 0.0;
    for (int i = 0; i < k_; ++i) fiber2 += x[i] * x[i];
    const double fiber = std::sqrt(fiber2);
    if (fiber > r_ * (1.0 + 1e-12)) throw DomainError("boundary_form_eval: |x'| exceeds R");
    return scaling_->inverse(std::min(1.0, fiber / r_)) - base_.signed_distance(x.subspan(k_)) / r_;
  }

 private:
  SphericalArray(int n, int k, double r, BaseDomain base, WarpMode mode)
      : n_(n), k_(k), r_(r), base_(std::move(base)), mode_(mode) {
    if (n < 3) throw DomainError("spherical array: n must be >= 3");
    if (k < 2 || k > n - 1) throw DomainError("spherical array: need 2 <= k <= n-1");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("spherical array: R must be > 0");
    if (base_.dim() != n - k) throw DomainError("spherical array: base dimension must be n - k");
    sphere_area_ = unit_sphere_area(k);
    density_scale_ = sphere_area_ * std::pow(r, k - 1);
  }

  void check_base_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != base_dim()) throw DomainError("base point has the wrong dimension");
  }

  void check_ambient_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) throw DomainError("point must have n coordinates");
  }

  double outside_tolerance() const noexcept { return 1e-12 * base_.inradius(); }

  // (|x'' - c| / R)^2, the series variable about the ball center.
  double center_v(std::span<const double> x) const {
    const auto& c = base_.as_ball()->center;
    double v = 0.0;
    for (int i = 0; i < base_dim(); ++i) v += (x[i] - c[i]) * (x[i] - c[i]);
    return v / (r_ * r_);
  }

  double series_v_limit() const noexcept { return scaling_->series_radius() * scaling_->series_radius(); }

  void custom_fd_gradient(std::span<const double> x, std::span<double> out) const {
    const double omega = base_.distance_to_boundary(x);
    const double h = std::min(1e-5 * base_.inradius(), 1e-4 * omega);
    if (!(h > 0.0)) throw DomainError("warping_gradient: no room for a difference step at the boundary");
    std::array<double, kMaxDim> y{};
    std::copy(x.begin(), x.end(), y.begin());
    std::span<const double> ys(y.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = x[i] + h;
      const double up = custom_.value(ys);
      y[i] = x[i] - h;
      const double down = custom_.value(ys);
      y[i] = x[i];
      out[i] = (up - down) / (2.0 * h);
    }
  }

  int n_;
  int k_;
  double r_;
  BaseDomain base_;
  WarpMode mode_;
  std::shared_ptr<const ScalingFunction> scaling_;
  CustomWarp custom_;
  bool ball_series_ = false;
  double sphere_area_ = 0.0;
  double density_scale_ = 0.0;  // sphere_area_ R^{k-1}
};

/// A_k^{n-1}(R): ball base of radius R M_k about the origin.
inline SphericalArray make_archimedean(int n, int k, double r,
                                       std::shared_ptr<const ScalingFunction> scaling = nullptr) {
  if (n < 3) throw DomainError("make_archimedean: n must be >= 3");
  if (k < 2 || k > n - 1) throw DomainError("make_archimedean: need 2 <= k <= n-1");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("make_archimedean: R must be > 0");
  if (!scaling) scaling = make_shared_scaling(k);
  auto base = BaseDomain::ball(Point(n - k, 0.0), r * scaling->m_k());
  return SphericalArray::archimedean(n, k, r, std::move(base), std::move(scaling));
}

}  // namespace archimedes
