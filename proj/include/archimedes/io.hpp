#pragma once

// JSON documents and CSV tables. Needs nlohmann/json on the include path.
//
// Documents are built as ordered_json and written by write_json, which prints
// every floating-point number with 17 significant digits (nlohmann's own dump
// prints the shortest round-trip form instead).

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "archimedes/array.hpp"
#include "archimedes/verify.hpp"

namespace archimedes {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json_value(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(key).dump() << (indent > 0 ? ": " : ":");
        write_json_value(os, value, indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) os << ',' << nl;
        os << pad;
        write_json_value(os, j[i], indent, depth + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << format_double(v);
      } else {
        os << "null";
      }
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Pretty-printed (indent > 0) or compact JSON with a trailing newline.
inline void write_json(std::ostream& os, const Json& j, int indent = 2) {
  detail::write_json_value(os, j, indent, 0);
  os << '\n';
}

inline Json point_json(std::span<const double> p) {
  Json a = Json::array();
  for (double v : p) a.push_back(v);
  return a;
}

inline Json base_json(const BaseDomain& b) {
  Json j;
  j["kind"] = b.kind();
  if (const auto* s = b.as_ball()) {
    j["center"] = point_json(s->center);
    j["radius"] = s->radius;
  } else if (const auto* e = b.as_ellipse()) {
    j["center"] = Json::array({e->center.x, e->center.y});
    j["a"] = e->a;
    j["b"] = e->b;
  } else {
    Json v = Json::array();
    for (const Vec2& p : b.as_polygon()->vertices) v.push_back(Json::array({p.x, p.y}));
    j["vertices"] = std::move(v);
  }
  return j;
}

inline Json region_json(const Region& r) {
  Json j;
  j["kind"] = r.kind();
  if (const auto* b = r.as_box()) {
    j["lo"] = point_json(b->lo);
    j["hi"] = point_json(b->hi);
  } else {
    j["center"] = point_json(r.as_ball()->center);
    j["radius"] = r.as_ball()->radius;
  }
  return j;
}

inline Json array_json(const SphericalArray& h) {
  Json j;
  j["n"] = h.n();
  j["k"] = h.k();
  j["R"] = h.r_scale();
  j["warp_mode"] = to_string(h.mode());
  if (const auto* w = h.custom_warp()) j["warp_label"] = w->label;
  j["base"] = base_json(h.base());
  return j;
}

inline Json quadrature_json(const QuadratureResult& q) {
  Json j;
  j["value"] = q.value;
  j["error"] = q.error;
  j["evaluations"] = q.evaluations;
  j["converged"] = q.converged;
  return j;
}

inline Json statistical_json(const StatisticalReport& rep) {
  Json regions = Json::array();
  for (const RegionCheck& rc : rep.regions) {
    Json r;
    r["region"] = region_json(rc.region);
    r["expected"] = rc.expected;
    r["observed"] = rc.observed;
    r["expected_hits"] = rc.expected * static_cast<double>(rep.samples);
    r["hits"] = rc.hits;
    r["z"] = rc.z;
    r["insufficient"] = rc.insufficient;
    regions.push_back(std::move(r));
  }
  Json j;
  j["sampler"] = rep.sampler;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["acceptance_rate"] = rep.acceptance_rate;
  j["regions"] = std::move(regions);
  j["aggregate"] = {{"chi2", rep.chi2},
                    {"dof", rep.dof},
                    {"p", rep.p_value},
                    {"regions_over_z", rep.over_threshold},
                    {"z_threshold", StatisticalReport::kZThreshold},
                    {"any_insufficient", rep.any_insufficient}};
  j["passed"] = rep.passed();
  return j;
}

/// Header x1..xn, one row per point, 17 significant digits.
inline void write_samples_csv(std::ostream& os, const SurfaceSamples& s) {
  for (int i = 0; i < s.n; ++i) os << (i ? "," : "") << 'x' << (i + 1);
  os << '\n';
  std::string line;
  for (std::size_t p = 0; p < s.size(); ++p) {
    line.clear();
    const auto pt = s.point(p);
    for (int i = 0; i < s.n; ++i) {
      if (i) line += ',';
      line += format_double(pt[i]);
    }
    line += '\n';
    os << line;
  }
}

}  // namespace archimedes
