#pragma once

// Globally adaptive Gauss-Kronrod quadrature with optional removal of
// inverse-square-root endpoint singularities.
//
// A flagged endpoint is mapped away by t = a + (b - a) u^2 (lower) or
// t = b - (b - a) u^2 (upper); with both ends flagged the smoothstep map
// t = a + (b - a)(3u^2 - 2u^3) is used. The integrand may accept a second
// argument: the exact distance from t to the nearest flagged endpoint,
// which lets callers form differences like 1 - t^m without cancellation.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <vector>

#include "archimedes/errors.hpp"
#include "archimedes/summation.hpp"

namespace archimedes {

struct QuadratureSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_depth = 60;
  int rule_order = 21;  // Kronrod points per panel: 15 or 21

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw DomainError("QuadratureSpec: tolerances must be strictly positive");
    }
    if (max_depth < 1) throw DomainError("QuadratureSpec: max_depth must be >= 1");
    if (rule_order != 15 && rule_order != 21) {
      throw DomainError("QuadratureSpec: rule_order must be 15 or 21");
    }
  }
};

enum class Singular : unsigned { none = 0, lower = 1, upper = 2, both = 3 };

constexpr Singular operator|(Singular a, Singular b) {
  return static_cast<Singular>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has_flag(Singular s, Singular flag) {
  return (static_cast<unsigned>(s) & static_cast<unsigned>(flag)) != 0;
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

struct KronrodRule {
  std::span<const double> nodes;     // Kronrod abscissae, descending, last is 0
  std::span<const double> kronrod;   // weights for nodes
  std::span<const double> gauss;     // weights for odd-indexed nodes (and centre)
};

inline constexpr double kXgk15[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk15[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg7[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr double kXgk21[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk21[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715087452730, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg10[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline KronrodRule kronrod_rule(int order) {
  if (order == 15) return {kXgk15, kWgk15, kWg7};
  return {kXgk21, kWgk21, kWg10};
}

struct Panel {
  double a, b;
  double value, error;
  double roundoff;  // error floor set by cancellation in the panel sum
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One Gauss-Kronrod panel on [a, b] in the substituted variable u. The
// error estimate follows the QUADPACK heuristic.
template <class G>
Panel gk_panel(G& g, double a, double b, int depth, const KronrodRule& rule, long& evals) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t n = rule.nodes.size();  // includes centre
  const bool gauss_has_centre = (n - 1) % 2 == 1;  // G7K15: centre is a Gauss node
  std::array<double, 10> fv1{}, fv2{};
  const double fc = g(centre);
  double resk = rule.kronrod[n - 1] * fc;
  double resg = gauss_has_centre ? rule.gauss[rule.gauss.size() - 1] * fc : 0.0;
  double resabs = std::abs(resk);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dx = half * rule.nodes[j];
    fv1[j] = g(centre - dx);
    fv2[j] = g(centre + dx);
    const double s = fv1[j] + fv2[j];
    resk += rule.kronrod[j] * s;
    resabs += rule.kronrod[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += rule.gauss[j / 2] * s;
  }
  evals += static_cast<long>(2 * n - 1);
  const double reskh = 0.5 * resk;
  double resasc = rule.kronrod[n - 1] * std::abs(fc - reskh);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    resasc += rule.kronrod[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double roundoff = 50.0 * kEps * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(roundoff, err);
  }
  return {a, b, value, err, roundoff, depth};
}

template <class G>
QuadratureResult adaptive(G&& g, double a, double b, const QuadratureSpec& spec) {
  constexpr std::size_t kMaxPanels = 2000;
  const KronrodRule rule = kronrod_rule(spec.rule_order);
  long evals = 0;
  std::vector<Panel> heap;     // max-heap on error
  std::vector<Panel> retired;  // panels at max depth, never split again
  heap.push_back(gk_panel(g, a, b, 0, rule, evals));
  double value = heap.front().value;
  double error = heap.front().error;
  double roundoff = heap.front().roundoff;
  auto exact_totals = [&] {
    CompensatedSum v, e, r;
    for (const Panel& p : heap) {
      v += p.value;
      e += p.error;
      r += p.roundoff;
    }
    for (const Panel& p : retired) {
      v += p.value;
      e += p.error;
      r += p.roundoff;
    }
    value = v.value();
    error = e.value();
    roundoff = r.value();
  };
  // Below twice the accumulated roundoff floor no further refinement helps.
  auto tolerance = [&] {
    return std::max({spec.abs_tol, spec.rel_tol * std::abs(value), 2.0 * roundoff});
  };
  std::size_t panels = 1;
  bool converged = false;
  while (true) {
    if (error <= tolerance()) {
      // Incremental totals drift; confirm against a fresh sum.
      exact_totals();
      if (error <= tolerance()) {
        converged = true;
        break;
      }
    }
    if (heap.empty() || panels >= kMaxPanels) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= spec.max_depth || !(mid > worst.a && mid < worst.b)) {
      retired.push_back(worst);
      continue;
    }
    const Panel left = gk_panel(g, worst.a, mid, worst.depth + 1, rule, evals);
    const Panel right = gk_panel(g, mid, worst.b, worst.depth + 1, rule, evals);
    value += (left.value + right.value) - worst.value;
    error += (left.error + right.error) - worst.error;
    roundoff += (left.roundoff + right.roundoff) - worst.roundoff;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++panels;
  }
  if (!converged) exact_totals();
  return {value, error, evals, converged};
}

}  // namespace detail

/// Integral of f over [a, b]. Never throws on non-convergence; check
/// `converged` and `error` on the result.
template <class F>
QuadratureResult integrate_nothrow(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                   Singular singular = Singular::none) {
  spec.validate();
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return {0.0, 0.0, 0, true};
  const double width = b - a;
  auto call = [&f](double t, double gap) -> double {
    if constexpr (std::invocable<F&, double, double>) {
      return f(t, gap);
    } else {
      return f(t);
    }
  };
  switch (singular) {
    case Singular::none:
      return detail::adaptive(
          [&](double t) { return call(t, std::min(t - a, b - t)); }, a, b, spec);
    case Singular::lower:
      return detail::adaptive(
          [&](double u) {
            const double gap = width * u * u;
            return call(a + gap, gap) * 2.0 * width * u;
          },
          0.0, 1.0, spec);
    case Singular::upper:
      return detail::adaptive(
          [&](double u) {
            const double gap = width * u * u;
            return call(b - gap, gap) * 2.0 * width * u;
          },
          0.0, 1.0, spec);
    case Singular::both:
      return detail::adaptive(
          [&](double u) {
            const double s = u * u * (3.0 - 2.0 * u);
            const double jac = 6.0 * u * (1.0 - u) * width;
            const double gap = u <= 0.5 ? width * s : width * (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u);
            const double t = u <= 0.5 ? a + gap : b - gap;
            return call(t, gap) * jac;
          },
          0.0, 1.0, spec);
  }
  return {};
}

/// Integral of f over [a, b]; throws QuadratureError carrying the achieved
/// error estimate when the tolerance cannot be met.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                           Singular singular = Singular::none) {
  QuadratureResult r = integrate_nothrow(std::forward<F>(f), a, b, spec, singular);
  if (!r.converged) throw QuadratureError("integrate: no convergence", r.value, r.error);
  return r;
}

}  // namespace archimedes
