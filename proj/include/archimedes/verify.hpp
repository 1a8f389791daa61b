#pragma once

// Monte Carlo checks of the projection property: sample the hypersurface
// measure, push the points down to the base and compare region frequencies
// with the volume prediction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "archimedes/array.hpp"
#include "archimedes/parallel.hpp"
#include "archimedes/random.hpp"
#include "archimedes/region.hpp"
#include "archimedes/special_functions.hpp"

namespace archimedes {

/// Row-major point list, n coordinates per point in the (x', x'') layout.
struct SurfaceSamples {
  int n = 0;
  std::vector<double> coords;
  long proposals = 0;  // base points drawn from the bounding box
  long accepted = 0;

  std::size_t size() const noexcept { return n == 0 ? 0 : coords.size() / static_cast<std::size_t>(n); }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * n, static_cast<std::size_t>(n)}; }
  double acceptance_rate() const noexcept { return proposals == 0 ? 0.0 : static_cast<double>(accepted) / proposals; }
};

namespace detail {

// Chunk c draws samples [c*kChunkSamples, (c+1)*kChunkSamples) from
// RandomStream(seed, c): base point by rejection from the bounding box,
// then k normals for the fiber direction.
inline SurfaceSamples sample_product(const SphericalArray& h, long count, std::uint64_t seed, int threads) {
  if (count < 0) throw DomainError("sample_surface: count must be >= 0");
  const int n = h.n();
  const int k = h.k();
  const int d = h.base_dim();
  const BaseDomain& base = h.base();
  SurfaceSamples out;
  out.n = n;
  out.coords.assign(static_cast<std::size_t>(count) * n, 0.0);
  const std::size_t chunks = (static_cast<std::uint64_t>(count) + kChunkSamples - 1) / kChunkSamples;
  std::vector<long> proposals(chunks, 0);
  for_each_chunk(chunks, threads, [&](std::size_t c) {
    RandomStream rng(seed, c);
    const long begin = static_cast<long>(c * kChunkSamples);
    const long end = std::min<long>(count, begin + static_cast<long>(kChunkSamples));
    std::array<double, kMaxDim> dir{};
    long drawn = 0;
    for (long s = begin; s < end; ++s) {
      double* p = out.coords.data() + static_cast<std::size_t>(s) * n;
      std::span<double> xb(p + k, static_cast<std::size_t>(d));
      do {
        for (int i = 0; i < d; ++i) xb[i] = rng.uniform(base.bbox_lo()[i], base.bbox_hi()[i]);
        ++drawn;
      } while (!base.contains(xb));
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int i = 0; i < k; ++i) {
          dir[i] = rng.normal();
          norm2 += dir[i] * dir[i];
        }
      } while (norm2 == 0.0);
      const double scale = h.warping(xb) / std::sqrt(norm2);
      for (int i = 0; i < k; ++i) p[i] = scale * dir[i];
    }
    proposals[c] = drawn;
  });
  for (long v : proposals) out.proposals += v;
  out.accepted = count;
  return out;
}

// Solve L L^T = a in place, dropping directions whose pivot collapses
// (indicator vectors that are linear combinations of others). Returns the
// quadratic form b^T a^+ b and the rank used.
inline std::pair<double, int> covariance_quadratic_form(std::vector<double> a, std::vector<double> b, int m) {
  std::vector<bool> kept(m, false);
  int rank = 0;
  for (int j = 0; j < m; ++j) {
    const double diag = a[j * m + j];
    double s = diag;
    for (int p = 0; p < j; ++p) {
      if (kept[p]) s -= a[j * m + p] * a[j * m + p];
    }
    if (!(s > 1e-10 * std::max(diag, 0.0)) || !(diag > 0.0)) continue;
    kept[j] = true;
    ++rank;
    const double l = std::sqrt(s);
    a[j * m + j] = l;
    for (int i = j + 1; i < m; ++i) {
      double t = a[i * m + j];
      for (int p = 0; p < j; ++p) {
        if (kept[p]) t -= a[i * m + p] * a[j * m + p];
      }
      a[i * m + j] = t / l;
    }
  }
  // Forward substitution over the kept columns.
  double q = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!kept[i]) continue;
    double t = b[i];
    for (int p = 0; p < i; ++p) {
      if (kept[p]) t -= a[i * m + p] * b[p];
    }
    b[i] = t / a[i * m + i];
    q += b[i] * b[i];
  }
  return {q, rank};
}

}  // namespace detail

/// Points distributed by the (n-1)-volume of H. Uniform base points are
/// correct only because the projection property makes the base density
/// constant, so custom warps are refused.
inline SurfaceSamples sample_surface(const SphericalArray& h, long count, std::uint64_t seed, int threads = 1) {
  if (h.mode() == WarpMode::custom) {
    throw DomainError("sample_surface: custom warps have a non-constant base density");
  }
  return detail::sample_product(h, count, seed, threads);
}

/// Base-uniform x fiber-uniform points for any warp. On a non-APP surface
/// this is not the surface measure, which is what the negative control needs.
inline SurfaceSamples sample_product(const SphericalArray& h, long count, std::uint64_t seed, int threads = 1) {
  return detail::sample_product(h, count, seed, threads);
}

/// Boxes (half-width s) and balls (radius s), s uniform in
/// [0.05, 0.5] x inradius, centered at uniform base points.
inline std::vector<Region> random_regions(const BaseDomain& base, int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("random_regions: count must be >= 1");
  // Chunk index 2^63 keeps this stream apart from the sampler chunks.
  RandomStream rng(seed, std::uint64_t{1} << 63);
  const int d = base.dim();
  std::vector<Region> out;
  Point c(d);
  while (static_cast<int>(out.size()) < count) {
    do {
      for (int i = 0; i < d; ++i) c[i] = rng.uniform(base.bbox_lo()[i], base.bbox_hi()[i]);
    } while (!base.contains(c));
    const double s = rng.uniform(0.05, 0.5) * base.inradius();
    std::optional<Region> r;
    if (rng.uniform01() < 0.5) {
      Point lo(c), hi(c);
      for (int i = 0; i < d; ++i) {
        lo[i] -= s;
        hi[i] += s;
      }
      r = Region::box(std::move(lo), std::move(hi));
    } else {
      r = Region::ball(c, s);
    }
    if (clipped_volume(base, *r) > 0.0) out.push_back(std::move(*r));
  }
  return out;
}

struct RegionCheck {
  Region region;
  double expected = 0.0;  // predicted fraction of the surface measure
  double observed = 0.0;  // fraction of samples whose projection lies in U
  long hits = 0;
  double z = 0.0;
  bool insufficient = false;  // fewer than 100 expected hits
};

struct StatisticalReport {
  std::vector<RegionCheck> regions;
  long samples = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;
  const char* sampler = "surface";
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int over_threshold = 0;  // regions with |z| > kZThreshold
  bool any_insufficient = false;

  static constexpr double kZThreshold = 4.0;
  static constexpr double kMinPValue = 1e-3;
  static constexpr int kMaxOverThreshold = 1;
  static constexpr double kMinExpectedHits = 100.0;

  bool passed() const noexcept {
    return !any_insufficient && p_value >= kMinPValue && over_threshold <= kMaxOverThreshold;
  }
};

/// Compares region frequencies of projected samples with the surface-measure
/// prediction patch_volume(U) / total_volume. For APP arrays that is
/// Vol(U n Omega) / Vol(Omega).
///
/// Per-region z uses the binomial variance. Regions overlap, so the aggregate
/// statistic is N d^T S^-1 d with S the sample covariance of the region
/// indicators; it is chi-square with len(regions) dof under the null.
inline StatisticalReport app_statistical_test(const SphericalArray& h, const std::vector<Region>& regions, long samples,
                                              std::uint64_t seed, int threads = 1, RegionSpec spec = {}) {
  if (regions.empty()) throw DomainError("app_statistical_test: no regions");
  if (samples < 1) throw DomainError("app_statistical_test: samples must be >= 1");
  const double total = h.total_volume(spec).numeric.value;
  StatisticalReport rep;
  rep.samples = samples;
  rep.seed = seed;
  for (const Region& u : regions) {
    if (u.dim() != h.base_dim()) throw DomainError("app_statistical_test: region dimension differs from base");
    if (!(clipped_volume(h.base(), u, spec) > 0.0)) {
      throw DomainError("app_statistical_test: region misses the base");
    }
    RegionCheck rc{u};
    rc.expected = h.patch_volume(u, spec).value / total;
    rep.regions.push_back(std::move(rc));
  }

  const bool product = h.mode() == WarpMode::custom;
  rep.sampler = product ? "product" : "surface";
  const SurfaceSamples pts = detail::sample_product(h, samples, seed, threads);
  rep.acceptance_rate = pts.acceptance_rate();

  const int m = static_cast<int>(regions.size());
  const int k = h.k();
  // Joint hit counts (upper triangle incl. diagonal); integer sums, so the
  // chunked reduction is exact.
  const std::size_t chunks = (static_cast<std::uint64_t>(samples) + kChunkSamples - 1) / kChunkSamples;
  std::vector<std::vector<long>> joint(chunks);
  for_each_chunk(chunks, threads, [&](std::size_t c) {
    std::vector<long> local(static_cast<std::size_t>(m) * m, 0);
    std::vector<int> inside;
    const std::size_t begin = c * kChunkSamples;
    const std::size_t end = std::min<std::size_t>(samples, begin + kChunkSamples);
    for (std::size_t s = begin; s < end; ++s) {
      const auto xb = pts.point(s).subspan(k);
      inside.clear();
      for (int i = 0; i < m; ++i) {
        if (regions[i].contains(xb)) inside.push_back(i);
      }
      for (std::size_t a = 0; a < inside.size(); ++a) {
        for (std::size_t b = a; b < inside.size(); ++b) ++local[inside[a] * m + inside[b]];
      }
    }
    joint[c] = std::move(local);
  });
  std::vector<long> counts(static_cast<std::size_t>(m) * m, 0);
  for (const auto& local : joint) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
  }

  const double nn = static_cast<double>(samples);
  std::vector<double> diff(m), cov(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    RegionCheck& rc = rep.regions[i];
    rc.hits = counts[i * m + i];
    rc.observed = rc.hits / nn;
    const double var = rc.expected * (1.0 - rc.expected);
    rc.z = var > 0.0 ? (rc.hits - nn * rc.expected) / std::sqrt(nn * var) : 0.0;
    rc.insufficient = nn * rc.expected < StatisticalReport::kMinExpectedHits;
    rep.any_insufficient = rep.any_insufficient || rc.insufficient;
    if (std::abs(rc.z) > StatisticalReport::kZThreshold) ++rep.over_threshold;
    diff[i] = rc.observed - rc.expected;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double c = counts[i * m + j] / nn - rep.regions[i].observed * rep.regions[j].observed;
      cov[i * m + j] = c;
      cov[j * m + i] = c;
    }
  }
  const auto [q, rank] = detail::covariance_quadratic_form(std::move(cov), std::move(diff), m);
  rep.chi2 = nn * q;
  rep.dof = rank;
  rep.p_value = rank > 0 ? chi_square_sf(rep.chi2, rank) : 1.0;
  return rep;
}

/// Negative control: f = R (1 - |x''|^2 / (2 (R m_k)^2)) over the canonical
/// ball base. For k = 2, R = 1 this is 1 - |x''|^2 / 2. Its surface density
/// f^{k-1} sqrt(1 + |grad f|^2) is not constant.
inline SphericalArray parabolic_control(int n, int k, double r, std::shared_ptr<const ScalingFunction> scaling = {}) {
  const SphericalArray ref = make_archimedean(n, k, r, std::move(scaling));
  const double rb = ref.base().as_ball()->radius;
  CustomWarp w;
  w.label = "parabolic";
  w.value = [r, rb](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return r * (1.0 - s / (2.0 * rb * rb));
  };
  w.gradient = [r, rb](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -r * x[i] / (rb * rb);
  };
  return SphericalArray::custom(n, k, r, ref.base(), std::move(w));
}

}  // namespace archimedes
