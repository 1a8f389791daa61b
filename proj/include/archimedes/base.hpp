#pragma once

// Convex base domains and their distance-to-boundary functions.
//
// omega(x) = dist(x, boundary) solves the eikonal equation |grad omega| = 1
// away from the singular set Sigma (the medial axis). For a ball Sigma is the
// center; for an ellipse it is the segment between the major-axis centers of
// curvature; for a convex polygon it is the union of edge-bisector pieces.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "archimedes/errors.hpp"
#include "archimedes/special_functions.hpp"

namespace archimedes {

inline constexpr int kMaxDim = 16;

using Point = std::vector<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

/// Halfplane n . x <= c with |n| = 1.
struct HalfPlane {
  Vec2 n;
  double c;
  double slack(Vec2 p) const { return c - dot(n, p); }
};

/// Sutherland-Hodgman clip of a convex polygon by one halfplane. `tags`
/// follows the edges: tags[i] labels the edge from poly[i] to poly[i+1];
/// the new edge created along the cut gets `cut_tag`.
inline void clip_polygon(std::vector<Vec2>& poly, std::vector<int>& tags, const HalfPlane& h,
                         int cut_tag) {
  const std::size_t count = poly.size();
  if (count == 0) return;
  std::vector<Vec2> out;
  std::vector<int> out_tags;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % count];
    const double sa = h.slack(a);
    const double sb = h.slack(b);
    if (sa >= 0.0) {
      out.push_back(a);
      if (sb >= 0.0) {
        out_tags.push_back(tags[i]);
      } else {
        out_tags.push_back(tags[i]);
        out.push_back(a + (sa / (sa - sb)) * (b - a));
        out_tags.push_back(cut_tag);
      }
    } else if (sb >= 0.0) {
      out.push_back(a + (sa / (sa - sb)) * (b - a));
      out_tags.push_back(tags[i]);
    }
  }
  // Drop repeated vertices produced by clipping exactly through a vertex.
  std::vector<Vec2> clean;
  std::vector<int> clean_tags;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec2 next = out[(i + 1) % out.size()];
    if (out.size() > 1 && norm(next - out[i]) == 0.0) continue;
    clean.push_back(out[i]);
    clean_tags.push_back(out_tags[i]);
  }
  poly = std::move(clean);
  tags = std::move(clean_tags);
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

struct BallShape {
  Point center;
  double radius;
};

/// Axis-aligned ellipse (x/a)^2 + (y/b)^2 <= 1 about `center`.
struct EllipseShape {
  Vec2 center;
  double a;
  double b;
};

struct PolygonShape {
  std::vector<Vec2> vertices;  // counterclockwise
};

class BaseDomain {
 public:
  using Shape = std::variant<BallShape, EllipseShape, PolygonShape>;

  static BaseDomain ball(Point center, double radius) {
    if (center.empty() || center.size() > static_cast<std::size_t>(kMaxDim)) {
      throw DomainError("ball: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball: radius must be > 0");
    BaseDomain d;
    d.dim_ = static_cast<int>(center.size());
    d.shape_ = BallShape{std::move(center), radius};
    d.inradius_ = radius;
    d.finish();
    return d;
  }

  static BaseDomain ellipse(Vec2 center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse: semi-axes must be > 0");
    BaseDomain d;
    d.dim_ = 2;
    d.shape_ = EllipseShape{center, a, b};
    d.inradius_ = std::min(a, b);
    d.finish();
    return d;
  }

  static BaseDomain polygon(std::vector<Vec2> vertices) {
    validate_polygon(vertices);
    BaseDomain d;
    d.dim_ = 2;
    d.shape_ = PolygonShape{std::move(vertices)};
    d.build_polygon();
    d.finish();
    return d;
  }

  /// Regular polygon with the given inradius, one edge at the bottom.
  static BaseDomain regular_polygon(int sides, double inradius, Vec2 center = {}) {
    if (sides < 3) throw DomainError("regular_polygon: need at least 3 sides");
    if (!(inradius > 0.0)) throw DomainError("regular_polygon: inradius must be > 0");
    const double circumradius = inradius / std::cos(std::numbers::pi / sides);
    std::vector<Vec2> v;
    for (int i = 0; i < sides; ++i) {
      const double angle =
          -std::numbers::pi / 2.0 - std::numbers::pi / sides + 2.0 * std::numbers::pi * i / sides;
      v.push_back(center + circumradius * Vec2{std::cos(angle), std::sin(angle)});
    }
    return polygon(std::move(v));
  }

  BaseDomain with_singular_band(double band) const {
    if (!(band >= 0.0)) throw DomainError("singular band must be >= 0");
    BaseDomain d = *this;
    d.band_ = band;
    return d;
  }

  int dim() const noexcept { return dim_; }
  const Shape& shape() const noexcept { return shape_; }
  const BallShape* as_ball() const noexcept { return std::get_if<BallShape>(&shape_); }
  const EllipseShape* as_ellipse() const noexcept { return std::get_if<EllipseShape>(&shape_); }
  const PolygonShape* as_polygon() const noexcept { return std::get_if<PolygonShape>(&shape_); }
  double singular_band() const noexcept { return band_; }
  double inradius() const noexcept { return inradius_; }
  /// A point where omega attains the inradius.
  const Point& incenter() const noexcept { return incenter_; }
  const Point& bbox_lo() const noexcept { return lo_; }
  const Point& bbox_hi() const noexcept { return hi_; }
  /// Outward halfplanes of a polygon, one per edge (edge i runs v[i] -> v[i+1]).
  const std::vector<HalfPlane>& edges() const noexcept { return edges_; }
  /// Medial-axis segments of a polygon.
  const std::vector<std::pair<Vec2, Vec2>>& medial_axis() const noexcept { return medial_; }
  const char* kind() const noexcept {
    return std::visit([](const auto& s) -> const char* {
      using S = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<S, BallShape>) return "ball";
      else if constexpr (std::is_same_v<S, EllipseShape>) return "ellipse";
      else return "polygon";
    }, shape_);
  }

  double domain_volume() const {
    if (const auto* b = as_ball()) return ball_volume(dim_, b->radius);
    if (const auto* e = as_ellipse()) return std::numbers::pi * e->a * e->b;
    return polygon_area(as_polygon()->vertices);
  }

  bool contains(std::span<const double> x) const {
    check_dim(x);
    if (const auto* b = as_ball()) {
      double r2 = 0.0;
      for (int i = 0; i < dim_; ++i) r2 += (x[i] - b->center[i]) * (x[i] - b->center[i]);
      return r2 <= b->radius * b->radius;
    }
    if (const auto* e = as_ellipse()) {
      const double u = (x[0] - e->center.x) / e->a;
      const double v = (x[1] - e->center.y) / e->b;
      return u * u + v * v <= 1.0;
    }
    const Vec2 p{x[0], x[1]};
    for (const HalfPlane& h : edges_) {
      if (h.slack(p) < 0.0) return false;
    }
    return true;
  }

  /// Positive inside, negative outside, zero on the boundary.
  double signed_distance(std::span<const double> x) const {
    check_dim(x);
    if (const auto* b = as_ball()) {
      double r2 = 0.0;
      for (int i = 0; i < dim_; ++i) r2 += (x[i] - b->center[i]) * (x[i] - b->center[i]);
      return b->radius - std::sqrt(r2);
    }
    if (const auto* e = as_ellipse()) return ellipse_nearest(*e, {x[0], x[1]}).signed_distance;
    const Vec2 p{x[0], x[1]};
    double inside = std::numeric_limits<double>::infinity();
    for (const HalfPlane& h : edges_) inside = std::min(inside, h.slack(p));
    if (inside >= 0.0) return inside;
    const auto& v = as_polygon()->vertices;
    double outside = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      outside = std::min(outside, segment_distance(p, v[i], v[(i + 1) % v.size()]));
    }
    return -outside;
  }

  double distance_to_boundary(std::span<const double> x) const {
    const double s = signed_distance(x);
    if (s < -outside_tolerance()) throw DomainError("distance_to_boundary: point outside the domain");
    return std::max(s, 0.0);
  }

  /// grad omega, a unit vector pointing away from the nearest boundary point.
  /// Throws SingularSetError within the singular band.
  void omega_gradient(std::span<const double> x, std::span<double> out) const {
    if (signed_distance(x) < -outside_tolerance()) {
      throw DomainError("omega_gradient: point outside the domain");
    }
    if (singular_set_distance(x) <= band_) {
      throw SingularSetError("omega_gradient: point within the singular band");
    }
    gradient_unchecked(x, out);
  }

  Point omega_gradient(std::span<const double> x) const {
    Point g(dim_);
    omega_gradient(x, g);
    return g;
  }

  /// grad omega without the singular-set check; on Sigma an arbitrary
  /// one-sided gradient is returned. Used where Sigma has measure zero.
  void gradient_unchecked(std::span<const double> x, std::span<double> out) const {
    check_dim(x);
    if (const auto* b = as_ball()) {
      double r2 = 0.0;
      for (int i = 0; i < dim_; ++i) r2 += (x[i] - b->center[i]) * (x[i] - b->center[i]);
      const double r = std::sqrt(r2);
      if (r == 0.0) {
        std::fill(out.begin(), out.begin() + dim_, 0.0);
        out[0] = -1.0;
        return;
      }
      for (int i = 0; i < dim_; ++i) out[i] = -(x[i] - b->center[i]) / r;
      return;
    }
    if (const auto* e = as_ellipse()) {
      const auto near = ellipse_nearest(*e, {x[0], x[1]});
      Vec2 d = Vec2{x[0], x[1]} - near.point;
      double len = norm(d);
      if (len == 0.0) {
        // On the boundary: inward normal.
        d = Vec2{-(near.point.x - e->center.x) / (e->a * e->a),
                 -(near.point.y - e->center.y) / (e->b * e->b)};
        len = norm(d);
      }
      const double sign = near.signed_distance >= 0.0 ? 1.0 : -1.0;
      out[0] = sign * d.x / len;
      out[1] = sign * d.y / len;
      return;
    }
    const Vec2 p{x[0], x[1]};
    std::size_t best = 0;
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i].slack(p) < edges_[best].slack(p)) best = i;
    }
    out[0] = -edges_[best].n.x;
    out[1] = -edges_[best].n.y;
  }

  /// Distance from an interior point to the singular set Sigma.
  double singular_set_distance(std::span<const double> x) const {
    check_dim(x);
    if (const auto* b = as_ball()) {
      double r2 = 0.0;
      for (int i = 0; i < dim_; ++i) r2 += (x[i] - b->center[i]) * (x[i] - b->center[i]);
      return std::sqrt(r2);
    }
    const Vec2 p{x[0], x[1]};
    if (const auto* e = as_ellipse()) {
      // Sigma: the segment of the major axis between the centers of
      // curvature of its endpoints, half-length (a^2 - b^2)/a.
      const Vec2 q = p - e->center;
      if (e->a >= e->b) {
        const double half = (e->a * e->a - e->b * e->b) / e->a;
        return segment_distance(q, {-half, 0.0}, {half, 0.0});
      }
      const double half = (e->b * e->b - e->a * e->a) / e->b;
      return segment_distance(q, {0.0, -half}, {0.0, half});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : medial_) best = std::min(best, segment_distance(p, a, b));
    return best;
  }

  struct EllipseNearest {
    Vec2 point;
    double signed_distance;
  };

  /// Nearest boundary point of an ellipse, by Newton iteration on the
  /// Lagrange parameter t: sum_i (e_i y_i / (t + e_i^2))^2 = 1.
  static EllipseNearest ellipse_nearest(const EllipseShape& e, Vec2 p) {
    Vec2 q = p - e.center;
    const double sx = q.x < 0.0 ? -1.0 : 1.0;
    const double sy = q.y < 0.0 ? -1.0 : 1.0;
    q = {std::abs(q.x), std::abs(q.y)};
    const bool swap = e.a < e.b;
    double e0 = e.a, e1 = e.b, y0 = q.x, y1 = q.y;
    if (swap) {
      std::swap(e0, e1);
      std::swap(y0, y1);
    }
    const bool inside = (y0 / e0) * (y0 / e0) + (y1 / e1) * (y1 / e1) <= 1.0;
    double x0 = 0.0, x1 = 0.0;
    if (y1 > 0.0 && y0 > 0.0) {
      // F is convex and decreasing on (-e1^2, inf); Newton from the left
      // of the root never overshoots.
      double lo = -e1 * e1 + e1 * y1;
      double hi = -e1 * e1 + std::hypot(e0 * y0, e1 * y1);
      double t = lo;
      for (int it = 0; it < 200; ++it) {
        const double d0 = t + e0 * e0;
        const double d1 = t + e1 * e1;
        const double r0 = e0 * y0 / d0;
        const double r1 = e1 * y1 / d1;
        const double f = r0 * r0 + r1 * r1 - 1.0;
        if (f > 0.0) lo = std::max(lo, t); else hi = std::min(hi, t);
        const double df = -2.0 * (r0 * r0 / d0 + r1 * r1 / d1);
        double next = t - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * std::max(std::abs(t), e1 * e1) || hi - lo <= 0.0) {
          t = next;
          break;
        }
        t = next;
      }
      x0 = e0 * e0 * y0 / (t + e0 * e0);
      x1 = e1 * e1 * y1 / (t + e1 * e1);
    } else if (y1 > 0.0) {
      x0 = 0.0;
      x1 = e1;
    } else {
      const double focal = (e0 * e0 - e1 * e1) / e0;
      if (y0 < focal) {
        x0 = e0 * e0 * y0 / (e0 * e0 - e1 * e1);
        x1 = e1 * std::sqrt(std::max(0.0, 1.0 - (x0 / e0) * (x0 / e0)));
      } else {
        x0 = e0;
        x1 = 0.0;
      }
    }
    const double dist = std::hypot(x0 - y0, x1 - y1);
    if (swap) std::swap(x0, x1);
    return {e.center + Vec2{sx * x0, sy * x1}, inside ? dist : -dist};
  }

  /// Vertices from a CSV of "x,y" rows. A non-numeric first row is treated
  /// as a header; blank lines and lines starting with '#' are skipped.
  static std::vector<Vec2> read_polygon_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open polygon file: " + path);
    std::vector<Vec2> vertices;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      Vec2 v;
      if (!(row >> v.x >> v.y)) {
        if (first) {
          first = false;
          continue;
        }
        throw DomainError("malformed polygon row: " + line);
      }
      first = false;
      vertices.push_back(v);
    }
    return vertices;
  }

 private:
  BaseDomain() = default;

  static void validate_polygon(const std::vector<Vec2>& v) {
    if (v.size() < 3) throw DomainError("polygon: need at least 3 vertices");
    if (v.size() > 4096) throw DomainError("polygon: too many vertices");
    double scale = 0.0;
    for (const Vec2& p : v) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("polygon: non-finite vertex");
      scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    }
    double turning = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 a = v[i];
      const Vec2 b = v[(i + 1) % v.size()];
      const Vec2 c = v[(i + 2) % v.size()];
      const Vec2 ab = b - a;
      const Vec2 bc = c - b;
      if (norm(ab) == 0.0) throw DomainError("polygon: repeated vertex");
      if (cross(ab, bc) <= 1e-12 * norm(ab) * norm(bc)) {
        throw DomainError("polygon: must be strictly convex and counterclockwise");
      }
      turning += std::atan2(cross(ab, bc), dot(ab, bc));
    }
    // A star polygon turns left everywhere but winds more than once.
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
      throw DomainError("polygon: self-intersecting vertex order");
    }
  }

  void build_polygon() {
    const auto& v = as_polygon()->vertices;
    const std::size_t count = v.size();
    for (std::size_t i = 0; i < count; ++i) {
      const Vec2 d = v[(i + 1) % count] - v[i];
      const Vec2 n = (1.0 / norm(d)) * Vec2{d.y, -d.x};
      edges_.push_back({n, dot(n, v[i])});
    }
    // Medial axis: the Voronoi cell of edge i inside the polygon is cut out
    // by the bisectors (n_j - n_i) . x <= c_j - c_i; cell edges that are not
    // on the polygon boundary belong to Sigma.
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<Vec2> cell = v;
      std::vector<int> tags(count);
      for (std::size_t j = 0; j < count; ++j) tags[j] = static_cast<int>(j);
      for (std::size_t j = 0; j < count && cell.size() >= 2; ++j) {
        if (j == i) continue;
        const Vec2 dn = edges_[j].n - edges_[i].n;
        const double len = norm(dn);
        clip_polygon(cell, tags, {(1.0 / len) * dn, (edges_[j].c - edges_[i].c) / len}, -1);
      }
      for (std::size_t e = 0; e < cell.size(); ++e) {
        if (tags[e] >= 0) continue;
        const Vec2 a = cell[e];
        const Vec2 b = cell[(e + 1) % cell.size()];
        if (norm(b - a) > 0.0) medial_.emplace_back(a, b);
      }
    }
    // Inradius: the largest t for which all offset halfplanes still meet.
    double lo = 0.0;
    double hi = 0.0;
    for (const Vec2& p : v) hi = std::max(hi, norm(p - v[0]));
    Vec2 center = v[0];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double t = 0.5 * (lo + hi);
      std::vector<Vec2> core = v;
      std::vector<int> tags(count, 0);
      for (const HalfPlane& h : edges_) clip_polygon(core, tags, {h.n, h.c - t}, 0);
      if (!core.empty()) {
        lo = t;
        Vec2 sum{};
        for (const Vec2& p : core) sum = sum + p;
        center = (1.0 / core.size()) * sum;
      } else {
        hi = t;
      }
    }
    inradius_ = lo;
    incenter_ = {center.x, center.y};
  }

  void finish() {
    lo_.assign(dim_, 0.0);
    hi_.assign(dim_, 0.0);
    if (const auto* b = as_ball()) {
      for (int i = 0; i < dim_; ++i) {
        lo_[i] = b->center[i] - b->radius;
        hi_[i] = b->center[i] + b->radius;
      }
      incenter_ = b->center;
    } else if (const auto* e = as_ellipse()) {
      lo_ = {e->center.x - e->a, e->center.y - e->b};
      hi_ = {e->center.x + e->a, e->center.y + e->b};
      incenter_ = {e->center.x, e->center.y};
    } else {
      lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      hi_ = {-lo_[0], -lo_[1]};
      for (const Vec2& p : as_polygon()->vertices) {
        lo_[0] = std::min(lo_[0], p.x);
        lo_[1] = std::min(lo_[1], p.y);
        hi_[0] = std::max(hi_[0], p.x);
        hi_[1] = std::max(hi_[1], p.y);
      }
    }
    if (!(inradius_ > 0.0)) throw DomainError("base domain has empty interior");
    band_ = 1e-3 * inradius_;
  }

  void check_dim(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw DomainError("point dimension does not match the base");
  }

  double outside_tolerance() const noexcept { return 1e-12 * inradius_; }

  int dim_ = 0;
  Shape shape_;
  double band_ = 0.0;
  double inradius_ = 0.0;
  Point incenter_;
  Point lo_, hi_;
  std::vector<HalfPlane> edges_;
  std::vector<std::pair<Vec2, Vec2>> medial_;
};

}  // namespace archimedes
