#pragma once

// Triangle meshes of 3D realizations and profile curves of f_k.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "archimedes/array.hpp"

namespace archimedes {

using Vec3 = std::array<double, 3>;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  bool closed = false;
};

/// (x_i, f_k(x_i)) with x_i = m_k (1 - cos(pi i / (samples-1))) / 2.
inline std::vector<std::pair<double, double>> profile_curve(const ScalingFunction& s, int samples) {
  if (samples < 2) throw DomainError("profile_curve: samples must be >= 2");
  std::vector<std::pair<double, double>> out(samples);
  const double mk = s.m_k();
  for (int i = 0; i < samples; ++i) {
    const double x = 0.5 * mk * (1.0 - std::cos(std::numbers::pi * i / (samples - 1)));
    out[i] = {x, s.value(x)};
  }
  out.front() = {0.0, 0.0};
  out.back() = {mk, 1.0};
  return out;
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 w{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
}

inline double mesh_area(const Mesh& m) {
  double sum = 0.0;
  for (const auto& t : m.triangles) sum += triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
  return sum;
}

/// Every undirected edge used by exactly two triangles, once in each direction.
inline bool is_watertight(const Mesh& m) {
  if (m.triangles.empty()) return false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[e], b = t[(e + 1) % 3];
      if (a >= m.vertices.size() || b >= m.vertices.size() || a == b) return false;
      if (++directed[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    if (!directed.contains({edge.second, edge.first})) return false;
  }
  return true;
}

inline long euler_characteristic(const Mesh& m) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) edges[std::minmax(t[e], t[(e + 1) % 3])] = 1;
  }
  return static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) +
         static_cast<long>(m.triangles.size());
}

/// Divergence-theorem volume; positive for outward orientation.
inline double signed_volume(const Mesh& m) {
  double v = 0.0;
  for (const auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    const Vec3& b = m.vertices[t[1]];
    const Vec3& c = m.vertices[t[2]];
    v += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
  }
  return v / 6.0;
}

namespace detail {

// Grid of `rings` rings of `sectors` vertices between two optional poles;
// ring r vertex j sits at index first + r*sectors + j. Orientation follows
// the caller's ordering (pole_a -> rings -> pole_b).
inline void stitch_rings(Mesh& m, std::uint32_t first, int rings, int sectors, bool reversed) {
  for (int r = 0; r + 1 < rings; ++r) {
    for (int j = 0; j < sectors; ++j) {
      const int jn = (j + 1) % sectors;
      const std::uint32_t a = first + r * sectors + j, b = first + r * sectors + jn;
      const std::uint32_t c = first + (r + 1) * sectors + j, d = first + (r + 1) * sectors + jn;
      if (reversed) {
        m.triangles.push_back({a, d, c});
        m.triangles.push_back({a, b, d});
      } else {
        m.triangles.push_back({a, c, d});
        m.triangles.push_back({a, d, b});
      }
    }
  }
}

inline void fan(Mesh& m, std::uint32_t pole, std::uint32_t ring, int sectors, bool reversed) {
  for (int j = 0; j < sectors; ++j) {
    const std::uint32_t a = ring + j, b = ring + (j + 1) % sectors;
    if (reversed) {
      m.triangles.push_back({pole, a, b});
    } else {
      m.triangles.push_back({pole, b, a});
    }
  }
}

}  // namespace detail

/// Surface of revolution for n = 3: vertices (f cos t, f sin t, x'') over the
/// interval base, Chebyshev-spaced toward the two poles, pole fans at the ends.
/// Vertex order: pole at the lower end, rings by axial index then angle,
/// upper pole.
inline Mesh revolve_mesh(const SphericalArray& h, int res_axial, int res_angular) {
  if (h.n() != 3) throw DomainError("revolve_mesh: requires n = 3");
  if (res_axial < 2 || res_angular < 3) throw DomainError("revolve_mesh: need res_axial >= 2, res_angular >= 3");
  const double lo = h.base().bbox_lo()[0];
  const double hi = h.base().bbox_hi()[0];
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double pi = std::numbers::pi;
  Mesh m;
  auto end_radius = [&](double x) { return h.mode() == WarpMode::archimedean ? 0.0 : h.warping(Point{x}); };
  if (end_radius(lo) != 0.0 || end_radius(hi) != 0.0) throw DomainError("revolve_mesh: warping must vanish at both ends of the base");
  m.vertices.push_back({0.0, 0.0, lo});
  for (int i = 1; i < res_axial; ++i) {
    const double x = mid - half * std::cos(pi * i / res_axial);
    const double f = h.warping(Point{x});
    for (int j = 0; j < res_angular; ++j) {
      const double t = 2.0 * pi * j / res_angular;
      m.vertices.push_back({f * std::cos(t), f * std::sin(t), x});
    }
  }
  m.vertices.push_back({0.0, 0.0, hi});
  const auto top = static_cast<std::uint32_t>(m.vertices.size() - 1);
  const int rings = res_axial - 1;
  // Outward normals (checked by signed_volume in the tests).
  detail::fan(m, 0, 1, res_angular, false);
  detail::stitch_rings(m, 1, rings, res_angular, true);
  detail::fan(m, top, 1 + (rings - 1) * res_angular, res_angular, true);
  m.closed = true;
  return m;
}

namespace detail {

// Distance from the base's interior center to its boundary along direction u.
inline double ray_to_boundary(const BaseDomain& b, const Point& c, double ux, double uy) {
  if (const auto* ball = b.as_ball()) return ball->radius;
  double lo = 0.0;
  double hi = 0.0;
  for (int i = 0; i < 2; ++i) hi += (b.bbox_hi()[i] - b.bbox_lo()[i]) * (b.bbox_hi()[i] - b.bbox_lo()[i]);
  hi = std::sqrt(hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (b.contains(Point{c[0] + mid * ux, c[1] + mid * uy})) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace detail

/// Slice x_2 = ... = x_k = 0 of an array with a 2D base: the sheets
/// x_1 = +f and x_1 = -f over the base, joined along the rim where f = 0.
/// Rings sit at s_i = sin(pi i / (2 res)) of the way from the base center to
/// the boundary; 2*res angular sectors. Vertices are (x_1, x''_1, x''_2).
inline Mesh graph_slice_mesh(const SphericalArray& h, int res) {
  if (h.base_dim() != 2) throw DomainError("graph_slice_mesh: requires a 2-dimensional base");
  if (res < 2) throw DomainError("graph_slice_mesh: res must be >= 2");
  const BaseDomain& b = h.base();
  const Point c = b.incenter();
  const int sectors = 2 * res;
  const double pi = std::numbers::pi;
  std::vector<double> ux(sectors), uy(sectors), reach(sectors);
  for (int j = 0; j < sectors; ++j) {
    const double t = 2.0 * pi * j / sectors;
    ux[j] = std::cos(t);
    uy[j] = std::sin(t);
    reach[j] = detail::ray_to_boundary(b, c, ux[j], uy[j]);
  }
  // The rim is f = 0. Custom warps are only checked loosely there: the rim
  // point comes from bisection and profiles like f_k grow as sqrt(omega).
  if (h.mode() != WarpMode::archimedean) {
    for (int j = 0; j < sectors; ++j) {
      const double f = h.warping(Point{c[0] + reach[j] * ux[j], c[1] + reach[j] * uy[j]});
      if (!(std::abs(f) <= 1e-6 * h.r_scale())) {
        throw DomainError("graph_slice_mesh: warping must vanish on the base boundary");
      }
    }
  }

  Mesh m;
  const double f0 = h.warping(c);
  // Upper pole, upper rings (inner to outer, excluding rim), rim ring,
  // lower rings (outer to inner), lower pole.
  m.vertices.push_back({f0, c[0], c[1]});
  auto ring_point = [&](int i, int j) {
    const double s = std::sin(0.5 * pi * i / res);
    return Point{c[0] + s * reach[j] * ux[j], c[1] + s * reach[j] * uy[j]};
  };
  std::vector<double> fvals(static_cast<std::size_t>(res - 1) * sectors);
  for (int i = 1; i < res; ++i) {
    for (int j = 0; j < sectors; ++j) fvals[(i - 1) * sectors + j] = h.warping(ring_point(i, j));
  }
  for (int i = 1; i < res; ++i) {
    for (int j = 0; j < sectors; ++j) {
      const Point p = ring_point(i, j);
      m.vertices.push_back({fvals[(i - 1) * sectors + j], p[0], p[1]});
    }
  }
  for (int j = 0; j < sectors; ++j) {
    m.vertices.push_back({0.0, c[0] + reach[j] * ux[j], c[1] + reach[j] * uy[j]});
  }
  for (int i = res - 1; i >= 1; --i) {
    for (int j = 0; j < sectors; ++j) {
      const Point p = ring_point(i, j);
      m.vertices.push_back({-fvals[(i - 1) * sectors + j], p[0], p[1]});
    }
  }
  m.vertices.push_back({-f0, c[0], c[1]});
  const auto bottom = static_cast<std::uint32_t>(m.vertices.size() - 1);
  const int rings = 2 * (res - 1) + 1;
  // Outward normals; the ring sequence runs from +x_1 to -x_1.
  detail::fan(m, 0, 1, sectors, true);
  detail::stitch_rings(m, 1, rings, sectors, false);
  detail::fan(m, bottom, 1 + (rings - 1) * sectors, sectors, false);
  m.closed = true;
  return m;
}

/// ASCII OBJ: "v x y z" with 9 significant digits, "f a b c" 1-based, LF.
inline void write_obj(std::ostream& os, const Mesh& m) {
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    os << buf;
  }
  for (const auto& t : m.triangles) {
    std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    os << buf;
  }
}

inline void write_profile_csv(std::ostream& os, const std::vector<std::pair<double, double>>& curve) {
  char buf[96];
  os << "x,f\n";
  for (const auto& [x, y] : curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, y);
    os << buf;
  }
}

}  // namespace archimedes
