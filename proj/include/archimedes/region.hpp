#pragma once

// Measurable test sets U (boxes and balls) and integration over U ∩ Ω.
//
// Integrals over the convex set U ∩ Ω are computed as iterated 1-D adaptive
// Gauss-Kronrod integrals. At each level the exact range of the next
// coordinate is known in closed form (ball ∩ box via clamped distances,
// ball ∩ ball via the rim of the lens, planar sets via their sections), and
// the range is split at the points where the integrand of that level loses
// smoothness: where the slice starts or stops touching a box face, where the
// two spheres of a lens become tangent, or where a planar boundary switches
// from one curve to another. Range ends are treated as square-root
// singular. With no integrand ("volume mode") the innermost level returns
// the section length exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "archimedes/base.hpp"
#include "archimedes/errors.hpp"
#include "archimedes/quadrature.hpp"
#include "archimedes/special_functions.hpp"
#include "archimedes/summation.hpp"

namespace archimedes {

struct BoxRegion {
  Point lo, hi;
};

struct BallRegion {
  Point center;
  double radius;
};

class Region {
 public:
  using Shape = std::variant<BoxRegion, BallRegion>;

  static Region box(Point lo, Point hi) {
    if (lo.size() != hi.size() || lo.empty()) throw DomainError("box region: corner dimensions differ");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) throw DomainError("box region: requires lo < hi componentwise");
    }
    Region r;
    r.shape_ = BoxRegion{std::move(lo), std::move(hi)};
    return r;
  }

  static Region ball(Point center, double radius) {
    if (center.empty()) throw DomainError("ball region: empty center");
    if (!(radius > 0.0)) throw DomainError("ball region: radius must be > 0");
    Region r;
    r.shape_ = BallRegion{std::move(center), radius};
    return r;
  }

  const Shape& shape() const noexcept { return shape_; }
  const BoxRegion* as_box() const noexcept { return std::get_if<BoxRegion>(&shape_); }
  const BallRegion* as_ball() const noexcept { return std::get_if<BallRegion>(&shape_); }
  const char* kind() const noexcept { return as_box() ? "box" : "ball"; }
  int dim() const noexcept {
    return static_cast<int>(as_box() ? as_box()->lo.size() : as_ball()->center.size());
  }

  bool contains(std::span<const double> x) const {
    if (const auto* b = as_box()) {
      for (std::size_t i = 0; i < b->lo.size(); ++i) {
        if (x[i] < b->lo[i] || x[i] > b->hi[i]) return false;
      }
      return true;
    }
    const auto* s = as_ball();
    double r2 = 0.0;
    for (std::size_t i = 0; i < s->center.size(); ++i) r2 += (x[i] - s->center[i]) * (x[i] - s->center[i]);
    return r2 <= s->radius * s->radius;
  }

  /// Cached Vol(U ∩ Ω), when it has been computed for the base in use.
  std::optional<double> clipped_volume;

 private:
  Region() = default;
  Shape shape_;
};

/// Tolerances for iterated integration. Each inner level is run at
/// `inner_factor` times the tolerance of the level around it.
struct RegionSpec {
  double rel_tol = 1e-9;
  double inner_factor = 0.1;
  double min_rel_tol = 1e-13;
  int rule_order = 15;
  int max_depth = 40;
  double scale = 1.0;  // typical integrand magnitude, sets absolute tolerances
};

/// Volume of the cap {x in B(r) : x_1 >= r - h}, 0 <= h <= 2r, in dimension d.
inline double ball_cap_volume(int d, double r, double h) {
  if (h <= 0.0) return 0.0;
  if (h >= 2.0 * r) return ball_volume(d, r);
  if (h > r) return ball_volume(d, r) - ball_cap_volume(d, r, 2.0 * r - h);
  const double c = (r - h) / r;
  const double one_minus = c * c;
  const double a = 0.5 * (d + 1);
  const double regularized = incomplete_beta(1.0 - one_minus, one_minus, a, 0.5) / beta(a, 0.5);
  return 0.5 * ball_volume(d, r) * regularized;
}

/// Volume of the intersection of two balls in dimension d.
inline double lens_volume(int d, double ra, double rb, double distance) {
  if (distance >= ra + rb) return 0.0;
  if (distance + rb <= ra) return ball_volume(d, rb);
  if (distance + ra <= rb) return ball_volume(d, ra);
  const double t = (distance * distance + ra * ra - rb * rb) / (2.0 * distance);
  return ball_cap_volume(d, ra, ra - t) + ball_cap_volume(d, rb, rb - (distance - t));
}

namespace detail {

struct Interval {
  double lo = 0.0;
  double hi = -1.0;
  bool empty() const { return !(lo < hi); }
};

/// Up to kCap breakpoints without heap traffic.
struct Breaks {
  static constexpr int kCap = 128;
  std::array<double, kCap> v{};
  int n = 0;
  void add(double x) {
    if (n < kCap) v[n++] = x;
  }
};

/// A planar convex set given by its x-extent and vertical sections.
struct PlanarSet {
  std::function<Interval(double)> section;
  Interval extent;
  std::vector<double> kinks;  // x positions where the section is not smooth
};

/// Exact section geometry of Ω ∩ U, level by level.
class SliceGeometry {
 public:
  SliceGeometry(const BaseDomain& base, const Region* region) : base_(base), region_(region), dim_(base.dim()) {
    if (region && region->dim() != dim_) throw DomainError("region dimension does not match the base");
    if (const auto* b = base.as_ball()) {
      ball_center_ = b->center;
      ball_radius_ = b->radius;
      if (!region) {
        kind_ = Kind::ball;
      } else if (const auto* box = region->as_box()) {
        kind_ = Kind::ball_box;
        build_box_criticals(*box);
      } else {
        kind_ = Kind::ball_ball;
        build_lens_frame(*region->as_ball());
      }
    } else {
      kind_ = Kind::planar;
      build_planar();
    }
  }

  int dim() const noexcept { return dim_; }

  /// Slice coordinates are rotated (ball ∩ ball); to_base maps them back.
  bool rotated() const noexcept { return !axis_.empty(); }
  void to_base(const double* y, double* x) const {
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += axis_[i] * y[i];
    for (int i = 0; i < dim_; ++i) x[i] = origin_[i] + y[i] - 2.0 * dot * axis_[i];
  }

  /// Range of coordinate j given x[0..j-1].
  Interval range(int j, const double* x) const {
    switch (kind_) {
      case Kind::ball: {
        const double r2 = remaining_radius2(ball_center_, ball_radius_, j, x);
        if (r2 <= 0.0) return {};
        const double h = std::sqrt(r2);
        return {ball_center_[j] - h, ball_center_[j] + h};
      }
      case Kind::ball_box: {
        const auto& box = *region_->as_box();
        double r2 = remaining_radius2(ball_center_, ball_radius_, j, x);
        for (int i = j + 1; i < dim_; ++i) r2 -= box_gap_[i] * box_gap_[i];
        if (r2 <= 0.0) return {};
        const double h = std::sqrt(r2);
        return {std::max(box.lo[j], ball_center_[j] - h), std::min(box.hi[j], ball_center_[j] + h)};
      }
      case Kind::ball_ball:
        return lens_range(j, x, nullptr);
      case Kind::planar:
        if (j == 0) return planar_range_;
        return planar_section(x[0]);
    }
    return {};
  }

  /// Interior points of `r` where the level-j integrand is not smooth.
  void breakpoints(int j, const double* x, Interval r, Breaks& out) const {
    switch (kind_) {
      case Kind::ball:
        return;
      case Kind::ball_box: {
        const double r2 = remaining_radius2(ball_center_, ball_radius_, j, x);
        for (double crit : criticals_[j]) {
          const double h2 = r2 - crit;
          if (h2 <= 0.0) continue;
          const double h = std::sqrt(h2);
          out.add(ball_center_[j] - h);
          out.add(ball_center_[j] + h);
        }
        break;
      }
      case Kind::ball_ball:
        lens_range(j, x, &out);
        break;
      case Kind::planar:
        if (j == 0) {
          for (double k : planar_breaks_) out.add(k);
        }
        break;
    }
    (void)r;
  }

 private:
  enum class Kind { ball, ball_box, ball_ball, planar };

  double remaining_radius2(const Point& c, double radius, int j, const double* x) const {
    double r2 = radius * radius;
    for (int i = 0; i < j; ++i) r2 -= (x[i] - c[i]) * (x[i] - c[i]);
    return r2;
  }

  // For the ball ∩ box slice in coordinates j+1.., the remaining integral is
  // a piecewise-smooth function of the slice radius, with breaks at the
  // squared radii where the sphere touches a face of the sub-box: each later
  // coordinate contributes either its clamped gap (free) or the squared
  // offset of one of its two faces.
  void build_box_criticals(const BoxRegion& box) {
    box_gap_.assign(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      const double c = ball_center_[i];
      box_gap_[i] = c < box.lo[i] ? box.lo[i] - c : (c > box.hi[i] ? c - box.hi[i] : 0.0);
    }
    criticals_.assign(dim_, {});
    for (int j = 0; j < dim_; ++j) {
      std::vector<double> sums = {0.0};
      for (int i = j + 1; i < dim_; ++i) {
        std::vector<double> next;
        const double lo = box.lo[i] - ball_center_[i];
        const double hi = box.hi[i] - ball_center_[i];
        for (double s : sums) {
          next.push_back(s + box_gap_[i] * box_gap_[i]);
          next.push_back(s + lo * lo);
          next.push_back(s + hi * hi);
        }
        sums = std::move(next);
      }
      std::sort(sums.begin(), sums.end());
      sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
      criticals_[j] = std::move(sums);
    }
  }

  // Lenses are integrated in a frame whose first axis joins the two centers
  // (a Householder reflection about the base center). Every deeper slice is
  // then a pair of concentric balls, so the only break is the radical plane;
  // in the original axes the slice bounds switch spheres along curved
  // surfaces that no finite set of breakpoints captures.
  void build_lens_frame(const BallRegion& other) {
    origin_ = ball_center_;
    Point d(dim_);
    double l2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      d[i] = other.center[i] - origin_[i];
      l2 += d[i] * d[i];
    }
    lens_ = BallRegion{Point(dim_, 0.0), other.radius};
    ball_center_.assign(dim_, 0.0);
    const double l = std::sqrt(l2);
    if (l == 0.0) return;
    lens_.center[0] = l;
    // Reflect e_0 onto d / l: axis ∝ e_0 - d / l, picking the better
    // conditioned sign (reflecting onto -d / l flips the lens center).
    Point v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = -d[i] / l;
    if (d[0] <= 0.0) {
      v[0] += 1.0;
    } else {
      v[0] -= 1.0;
      lens_.center[0] = -l;
    }
    double n2 = 0.0;
    for (double c : v) n2 += c * c;
    const double n = std::sqrt(n2);
    for (double& c : v) c /= n;
    axis_ = std::move(v);
  }

  // Projection onto axis j of the lens slice with x[0..j-1] fixed. With
  // `breaks`, also reports the rim extremes (where the slices of the two
  // spheres become tangent).
  Interval lens_range(int j, const double* x, Breaks* breaks) const {
    const auto& other = lens_;
    const double ra2 = remaining_radius2(ball_center_, ball_radius_, j, x);
    const double rb2 = remaining_radius2(other.center, other.radius, j, x);
    if (ra2 <= 0.0 || rb2 <= 0.0) return {};
    const double ra = std::sqrt(ra2);
    const double rb = std::sqrt(rb2);
    double l2 = 0.0;
    for (int i = j; i < dim_; ++i) l2 += (other.center[i] - ball_center_[i]) * (other.center[i] - ball_center_[i]);
    const double l = std::sqrt(l2);
    const double ca = ball_center_[j];
    const double cb = other.center[j];
    if (l >= ra + rb) return {};
    if (l + rb <= ra) return {cb - rb, cb + rb};
    if (l + ra <= rb) return {ca - ra, ca + ra};
    // Rim: a sphere in the radical hyperplane at distance t from center a.
    const double t = (l2 + ra2 - rb2) / (2.0 * l);
    const double rho = std::sqrt(std::max(0.0, ra2 - t * t));
    const double u = (cb - ca) / l;
    const double p = ca + t * u;
    const double spread = rho * std::sqrt(std::max(0.0, 1.0 - u * u));
    if (breaks) {
      breaks->add(p - spread);
      breaks->add(p + spread);
    }
    auto inside_b = [&](double coord) {
      // Point of ball a's slice extreme along axis j, tested against ball b.
      double d2 = (coord - cb) * (coord - cb);
      for (int i = j + 1; i < dim_; ++i) d2 += (ball_center_[i] - other.center[i]) * (ball_center_[i] - other.center[i]);
      return d2 <= rb2;
    };
    auto inside_a = [&](double coord) {
      double d2 = (coord - ca) * (coord - ca);
      for (int i = j + 1; i < dim_; ++i) d2 += (other.center[i] - ball_center_[i]) * (other.center[i] - ball_center_[i]);
      return d2 <= ra2;
    };
    Interval r;
    if (inside_b(ca - ra)) r.lo = ca - ra;
    else if (inside_a(cb - rb)) r.lo = cb - rb;
    else r.lo = p - spread;
    if (inside_b(ca + ra)) r.hi = ca + ra;
    else if (inside_a(cb + rb)) r.hi = cb + rb;
    else r.hi = p + spread;
    return r;
  }

  Interval planar_section(double x) const {
    Interval r{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const PlanarSet& s : planar_) {
      const Interval part = s.section(x);
      r.lo = std::max(r.lo, part.lo);
      r.hi = std::min(r.hi, part.hi);
    }
    return r;
  }

  static PlanarSet planar_from_base(const BaseDomain& base) {
    PlanarSet s;
    if (const auto* e = base.as_ellipse()) {
      const EllipseShape shape = *e;
      s.extent = {shape.center.x - shape.a, shape.center.x + shape.a};
      s.section = [shape](double x) -> Interval {
        const double u = (x - shape.center.x) / shape.a;
        const double w = 1.0 - u * u;
        if (w < 0.0) return {};
        const double h = shape.b * std::sqrt(w);
        return {shape.center.y - h, shape.center.y + h};
      };
      return s;
    }
    const auto& v = base.as_polygon()->vertices;
    const auto edges = base.edges();
    s.extent = {base.bbox_lo()[0], base.bbox_hi()[0]};
    for (const Vec2& p : v) s.kinks.push_back(p.x);
    s.section = [edges](double x) -> Interval {
      Interval r{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      for (const HalfPlane& h : edges) {
        // n.x x + n.y y <= c
        if (h.n.y > 1e-15) r.hi = std::min(r.hi, (h.c - h.n.x * x) / h.n.y);
        else if (h.n.y < -1e-15) r.lo = std::max(r.lo, (h.c - h.n.x * x) / h.n.y);
        else if (h.n.x * x > h.c) return {};
      }
      return r;
    };
    return s;
  }

  static PlanarSet planar_from_region(const Region& region) {
    PlanarSet s;
    if (const auto* b = region.as_box()) {
      const BoxRegion box = *b;
      s.extent = {box.lo[0], box.hi[0]};
      s.section = [box](double x) -> Interval {
        if (x < box.lo[0] || x > box.hi[0]) return {};
        return {box.lo[1], box.hi[1]};
      };
      return s;
    }
    const BallRegion ball = *region.as_ball();
    s.extent = {ball.center[0] - ball.radius, ball.center[0] + ball.radius};
    s.section = [ball](double x) -> Interval {
      const double dx = x - ball.center[0];
      const double w = ball.radius * ball.radius - dx * dx;
      if (w < 0.0) return {};
      const double h = std::sqrt(w);
      return {ball.center[1] - h, ball.center[1] + h};
    };
    return s;
  }

  // The intersection's x-range is where min(upper) - max(lower) >= 0, a
  // concave function; breaks are the x positions where the active upper or
  // lower curve changes, located by scanning and bisection.
  void build_planar() {
    planar_.push_back(planar_from_base(base_));
    if (region_) planar_.push_back(planar_from_region(*region_));
    Interval ext{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const PlanarSet& s : planar_) {
      ext.lo = std::max(ext.lo, s.extent.lo);
      ext.hi = std::min(ext.hi, s.extent.hi);
    }
    planar_range_ = {};
    if (!(ext.lo < ext.hi)) return;
    auto slack = [this](double x) {
      const Interval r = planar_section(x);
      return r.hi - r.lo;
    };
    constexpr int kScan = 512;
    std::vector<double> xs(kScan + 1);
    for (int i = 0; i <= kScan; ++i) xs[i] = ext.lo + (ext.hi - ext.lo) * i / kScan;
    int first = -1, last = -1;
    for (int i = 0; i <= kScan; ++i) {
      if (slack(xs[i]) > 0.0) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0) {
      // A sliver thinner than the scan: maximize the concave slack.
      double lo = ext.lo, hi = ext.hi;
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 200; ++it) {
        const double m1 = hi - g * (hi - lo);
        const double m2 = lo + g * (hi - lo);
        if (slack(m1) < slack(m2)) lo = m1; else hi = m2;
      }
      const double mid = 0.5 * (lo + hi);
      if (!(slack(mid) > 0.0)) return;
      xs.assign({ext.lo, mid, ext.hi});
      first = last = 1;
    }
    auto root = [&](double in, double out) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (in + out);
        if (mid == in || mid == out) break;
        (slack(mid) > 0.0 ? in : out) = mid;
      }
      return in;
    };
    planar_range_.lo = first == 0 ? ext.lo : root(xs[first], xs[first - 1]);
    planar_range_.hi = last + 1 == static_cast<int>(xs.size()) ? ext.hi : root(xs[last], xs[last + 1]);

    auto active = [this](double x) {
      // Index of the set bounding the section from below and from above.
      int lo_idx = 0, hi_idx = 0;
      double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < planar_.size(); ++i) {
        const Interval r = planar_[i].section(x);
        if (r.lo > lo) {
          lo = r.lo;
          lo_idx = static_cast<int>(i);
        }
        if (r.hi < hi) {
          hi = r.hi;
          hi_idx = static_cast<int>(i);
        }
      }
      return std::pair{lo_idx, hi_idx};
    };
    for (const PlanarSet& s : planar_) {
      for (double k : s.kinks) planar_breaks_.push_back(k);
      planar_breaks_.push_back(s.extent.lo);
      planar_breaks_.push_back(s.extent.hi);
    }
    if (planar_.size() > 1) {
      const Interval r = planar_range_;
      double prev_x = r.lo + 1e-9 * (r.hi - r.lo);
      auto prev = active(prev_x);
      for (int i = 1; i <= kScan; ++i) {
        const double x = r.lo + (r.hi - r.lo) * (i == kScan ? 1.0 - 1e-9 : static_cast<double>(i) / kScan);
        const auto cur = active(x);
        if (cur != prev) {
          // Bisect separately for the lower and upper switches.
          for (int side = 0; side < 2; ++side) {
            const int before = side == 0 ? prev.first : prev.second;
            const int after = side == 0 ? cur.first : cur.second;
            if (before == after) continue;
            double a = prev_x, b = x;
            for (int it = 0; it < 200; ++it) {
              const double mid = 0.5 * (a + b);
              if (mid == a || mid == b) break;
              const auto m = active(mid);
              ((side == 0 ? m.first : m.second) == before ? a : b) = mid;
            }
            planar_breaks_.push_back(0.5 * (a + b));
          }
        }
        prev = cur;
        prev_x = x;
      }
    }
    std::sort(planar_breaks_.begin(), planar_breaks_.end());
  }

  const BaseDomain& base_;
  const Region* region_;
  int dim_;
  Kind kind_ = Kind::ball;
  Point ball_center_;
  double ball_radius_ = 0.0;
  std::vector<double> box_gap_;
  std::vector<std::vector<double>> criticals_;
  std::vector<PlanarSet> planar_;
  Interval planar_range_;
  std::vector<double> planar_breaks_;
  BallRegion lens_;
  Point origin_;
  std::vector<double> axis_;  // unit Householder vector; empty = identity
};

template <class F>
class NestedIntegrator {
 public:
  NestedIntegrator(const SliceGeometry& g, F* f, const RegionSpec& spec, double length_scale)
      : g_(g), f_(f), spec_(spec), length_(length_scale) {}

  QuadratureResult run() {
    std::array<double, kMaxDim> x{};
    CompensatedSum err;
    const double value = level(0, x.data(), spec_.rel_tol, &err);
    return {value, err.value(), evaluations_, converged_};
  }

 private:
  double level(int j, double* x, double rel, CompensatedSum* err) {
    const Interval r = g_.range(j, x);
    if (r.empty()) return 0.0;
    const bool innermost = j + 1 == g_.dim();
    if (innermost && f_ == nullptr) return r.hi - r.lo;

    Breaks b;
    g_.breakpoints(j, x, r, b);
    std::array<double, Breaks::kCap + 2> pts{};
    int n = 0;
    pts[n++] = r.lo;
    std::sort(b.v.begin(), b.v.begin() + b.n);
    const double sep = 1e-12 * (r.hi - r.lo);
    for (int i = 0; i < b.n; ++i) {
      if (b.v[i] > pts[n - 1] + sep && b.v[i] < r.hi - sep) pts[n++] = b.v[i];
    }
    pts[n++] = r.hi;

    QuadratureSpec spec;
    spec.rel_tol = std::max(rel, spec_.min_rel_tol);
    // Absolute floor: a tiny fraction of a unit-density integral over a
    // slab of the base at this level.
    spec.abs_tol = std::max(1e-300, 1e-3 * spec.rel_tol * spec_.scale * std::pow(length_, g_.dim() - j));
    spec.rule_order = spec_.rule_order;
    spec.max_depth = spec_.max_depth;
    const double inner_rel = rel * spec_.inner_factor;

    CompensatedSum total;
    for (int p = 0; p + 1 < n; ++p) {
      QuadratureResult piece;
      if (innermost) {
        piece = integrate_nothrow(
            [&](double t) {
              x[j] = t;
              ++evaluations_;
              if (g_.rotated()) {
                std::array<double, kMaxDim> p;
                g_.to_base(x, p.data());
                return (*f_)(std::span<const double>(p.data(), g_.dim()));
              }
              return (*f_)(std::span<const double>(x, g_.dim()));
            },
            pts[p], pts[p + 1], spec, Singular::both);
      } else {
        piece = integrate_nothrow(
            [&](double t) {
              x[j] = t;
              return level(j + 1, x, inner_rel, nullptr);
            },
            pts[p], pts[p + 1], spec, Singular::both);
      }
      if (!piece.converged) converged_ = false;
      total += piece.value;
      if (err) *err += piece.error;
    }
    return total.value();
  }

  const SliceGeometry& g_;
  F* f_;
  RegionSpec spec_;
  double length_;
  long evaluations_ = 0;
  bool converged_ = true;
};

inline double length_scale(const BaseDomain& base) {
  double l = 0.0;
  for (int i = 0; i < base.dim(); ++i) l = std::max(l, base.bbox_hi()[i] - base.bbox_lo()[i]);
  return l;
}

}  // namespace detail

/// ∫_{U ∩ Ω} f(x) dx (U = whole base when `region` is null). `f` takes a
/// std::span<const double> of base coordinates.
template <class F>
QuadratureResult integrate_over(const BaseDomain& base, const Region* region, F&& f, const RegionSpec& spec = {}) {
  detail::SliceGeometry g(base, region);
  using Fn = std::remove_reference_t<F>;
  detail::NestedIntegrator<Fn> integrator(g, &f, spec, detail::length_scale(base));
  return integrator.run();
}

/// Vol(U ∩ Ω) by iterated quadrature, sections measured exactly.
inline QuadratureResult volume_by_quadrature(const BaseDomain& base, const Region* region, const RegionSpec& spec = {}) {
  detail::SliceGeometry g(base, region);
  using Fn = std::function<double(std::span<const double>)>;
  detail::NestedIntegrator<Fn> integrator(g, nullptr, spec, detail::length_scale(base));
  return integrator.run();
}

/// Vol(U ∩ Ω): closed form where one exists, otherwise iterated quadrature.
inline double clipped_volume(const BaseDomain& base, const Region& region, const RegionSpec& spec = {}) {
  if (region.dim() != base.dim()) throw DomainError("region dimension does not match the base");
  const int d = base.dim();
  if (const auto* b = base.as_ball()) {
    if (const auto* s = region.as_ball()) {
      double l2 = 0.0;
      for (int i = 0; i < d; ++i) l2 += (s->center[i] - b->center[i]) * (s->center[i] - b->center[i]);
      return lens_volume(d, b->radius, s->radius, std::sqrt(l2));
    }
    const auto& box = *region.as_box();
    if (d == 1) {
      return std::max(0.0, std::min(box.hi[0], b->center[0] + b->radius) - std::max(box.lo[0], b->center[0] - b->radius));
    }
    // Box entirely inside the ball: its farthest corner is inside.
    double far2 = 0.0;
    double box_volume = 1.0;
    for (int i = 0; i < d; ++i) {
      const double f = std::max(std::abs(box.lo[i] - b->center[i]), std::abs(box.hi[i] - b->center[i]));
      far2 += f * f;
      box_volume *= box.hi[i] - box.lo[i];
    }
    if (far2 <= b->radius * b->radius) return box_volume;
  }
  if (const auto* p = base.as_polygon()) {
    if (const auto* box = region.as_box()) {
      std::vector<Vec2> poly = p->vertices;
      std::vector<int> tags(poly.size(), 0);
      clip_polygon(poly, tags, {{-1.0, 0.0}, -box->lo[0]}, 0);
      clip_polygon(poly, tags, {{1.0, 0.0}, box->hi[0]}, 0);
      clip_polygon(poly, tags, {{0.0, -1.0}, -box->lo[1]}, 0);
      clip_polygon(poly, tags, {{0.0, 1.0}, box->hi[1]}, 0);
      return poly.size() < 3 ? 0.0 : polygon_area(poly);
    }
  }
  const QuadratureResult r = volume_by_quadrature(base, &region, spec);
  return r.value;
}

}  // namespace archimedes
