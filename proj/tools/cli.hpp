#pragma once

// The archimedes command-line tool. run() is separate from main() so the
// tests can drive it in-process.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "archimedes/array.hpp"
#include "archimedes/io.hpp"
#include "archimedes/mesh.hpp"
#include "archimedes/random.hpp"
#include "archimedes/verify.hpp"

namespace archimedes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr double kResidualGate = 1e-8;
inline constexpr double kIntegralGate = 1e-6;
inline constexpr double kClassicalIntegralGate = 1e-8;  // n = 3, k = 2
inline constexpr double kTotalVolumeGate = 1e-6;

struct Options {
  int threads = 1;

  int k_min = 2, k_max = 12;
  int n = 3, k = 2;
  double r = 1.0;
  int samples_profile = 257;
  std::string mode = "residual";
  int regions = 20;
  long samples = -1;  // per-mode default
  std::uint64_t seed = 1;
  bool control = false;
  bool enclosed = false;
  int res = 128;
  long count = 1000;
  std::string out;
};

/// Usage problems found after parsing (bad combinations, domain errors).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Writes to --out when given, else to the command's stream.
template <class F>
void emit(const Options& o, std::ostream& out, F&& write) {
  if (o.out.empty() || o.out == "-") {
    write(out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file: " + o.out);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + o.out);
}

inline Json header(const char* command) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

inline int mk_table(const Options& o, std::ostream& out) {
  if (o.k_min < 2 || o.k_max < o.k_min) throw UsageError("mk-table: need 2 <= k-min <= k-max");
  emit(o, out, [&](std::ostream& os) {
    os << "k,mk_quadrature,mk_closed_form,abs_diff\n";
    for (int k = o.k_min; k <= o.k_max; ++k) {
      const double q = mk_quadrature(k).value;
      const double c = mk_closed_form(k);
      os << k << ',' << format_double(q) << ',' << format_double(c) << ',' << format_double(std::abs(q - c)) << '\n';
    }
  });
  return kExitOk;
}

inline int scaling(const Options& o, std::ostream& out) {
  const auto s = make_scaling(o.k);
  const auto curve = profile_curve(s, o.samples_profile);
  emit(o, out, [&](std::ostream& os) { write_profile_csv(os, curve); });
  return kExitOk;
}

inline Json verify_residual(const SphericalArray& h, long samples, bool& passed) {
  const BaseDomain& b = h.base();
  const int d = b.dim();
  Point x(d);
  double worst = 0.0, sum = 0.0;
  Point worst_at;
  long used = 0;
  for (std::uint64_t i = 1; used < samples; ++i) {
    halton(i, x);
    for (int j = 0; j < d; ++j) x[j] = b.bbox_lo()[j] + (b.bbox_hi()[j] - b.bbox_lo()[j]) * x[j];
    if (!b.contains(x) || b.signed_distance(x) <= h.boundary_offset()) continue;
    if (b.singular_set_distance(x) <= b.singular_band()) continue;
    const double r = std::abs(h.app_residual(x));
    if (r >= worst) {
      worst = r;
      worst_at = x;
    }
    sum += r;
    ++used;
  }
  passed = worst <= kResidualGate;
  Json j;
  j["points"] = used;
  j["boundary_offset"] = h.boundary_offset();
  j["singular_band"] = b.singular_band();
  j["max_abs_residual"] = worst;
  j["mean_abs_residual"] = used ? sum / used : 0.0;
  j["worst_point"] = point_json(worst_at);
  j["tolerance"] = kResidualGate;
  return j;
}

inline Json verify_integral(const SphericalArray& h, int regions, std::uint64_t seed, bool& passed) {
  const double tol = (h.n() == 3 && h.k() == 2) ? kClassicalIntegralGate : kIntegralGate;
  const double c = h.sphere_constant() * std::pow(h.r_scale(), h.k() - 1);
  Json rows = Json::array();
  double worst = 0.0;
  for (const Region& u : random_regions(h.base(), regions, seed)) {
    const auto patch = h.patch_volume(u);
    const double base_volume = clipped_volume(h.base(), u);
    const double predicted = c * base_volume;
    const double err = rel_diff(patch.value, predicted);
    worst = std::max(worst, err);
    Json row;
    row["region"] = region_json(u);
    row["base_volume"] = base_volume;
    row["patch_volume"] = quadrature_json(patch);
    row["predicted"] = predicted;
    row["rel_error"] = err;
    rows.push_back(std::move(row));
  }
  const auto total = h.total_volume();
  const double total_err = rel_diff(total.numeric.value, *total.closed_form);
  passed = worst <= tol && total_err <= kTotalVolumeGate;
  Json j;
  j["constant"] = c;
  j["regions"] = std::move(rows);
  j["max_rel_error"] = worst;
  j["tolerance"] = tol;
  j["total"] = {{"numeric", total.numeric.value},
                {"closed_form", *total.closed_form},
                {"rel_diff", total_err},
                {"tolerance", kTotalVolumeGate}};
  return j;
}

inline int verify(const Options& o, std::ostream& out) {
  if (o.mode != "residual" && o.mode != "integral" && o.mode != "statistical") {
    throw UsageError("verify: --mode must be residual, integral or statistical");
  }
  if (o.control && o.mode != "statistical") throw UsageError("verify: --control needs --mode statistical");
  if (o.regions < 1) throw UsageError("verify: --regions must be >= 1");
  const SphericalArray h = o.control ? parabolic_control(o.n, o.k, o.r) : make_archimedean(o.n, o.k, o.r);
  Json j = header("verify");
  j["mode"] = o.mode;
  j["array"] = array_json(h);
  bool passed = false;
  if (o.mode == "residual") {
    const long samples = o.samples > 0 ? o.samples : 10000;
    j["residual"] = verify_residual(h, samples, passed);
  } else if (o.mode == "integral") {
    j["seed"] = o.seed;
    j["integral"] = verify_integral(h, o.regions, o.seed, passed);
  } else {
    const long samples = o.samples > 0 ? o.samples : 1000000;
    const auto rep = app_statistical_test(h, random_regions(h.base(), o.regions, o.seed), samples, o.seed, o.threads);
    j["statistical"] = statistical_json(rep);
    passed = rep.passed();
  }
  j["passed"] = passed;
  emit(o, out, [&](std::ostream& os) { write_json(os, j); });
  return passed ? kExitOk : kExitGateFailed;
}

inline int volume(const Options& o, std::ostream& out) {
  const auto h = make_archimedean(o.n, o.k, o.r);
  const auto total = h.total_volume();
  Json j = header("volume");
  j["array"] = array_json(h);
  j["total"] = {{"numeric", quadrature_json(total.numeric)},
                {"closed_form", *total.closed_form},
                {"rel_diff", rel_diff(total.numeric.value, *total.closed_form)}};
  if (o.k == o.n - 1) j["total"]["equizonal_closed_form"] = equizonal_volume(o.n, o.r);
  if (o.enclosed) {
    const long samples = o.samples >= 0 ? o.samples : 1000000;
    const auto e = h.enclosed_volume(samples, o.seed, o.threads);
    Json en;
    en["quadrature"] = quadrature_json(e.quadrature);
    if (samples > 0) {
      en["monte_carlo"] = {{"value", e.monte_carlo},
                           {"standard_error", e.monte_carlo_error},
                           {"samples", e.samples},
                           {"seed", o.seed}};
    }
    if (e.closed_form) {
      en["closed_form"] = *e.closed_form;
      en["rel_diff"] = rel_diff(e.quadrature.value, *e.closed_form);
    }
    j["enclosed"] = std::move(en);
  }
  emit(o, out, [&](std::ostream& os) { write_json(os, j); });
  return kExitOk;
}

inline int mesh(const Options& o, std::ostream& out) {
  const auto h = make_archimedean(o.n, o.k, o.r);
  Mesh m;
  if (o.n == 3) {
    m = revolve_mesh(h, o.res, o.res);
  } else if (o.n - o.k == 2) {
    m = graph_slice_mesh(h, o.res);
  } else {
    throw UsageError("mesh: needs n = 3 or n - k = 2");
  }
  emit(o, out, [&](std::ostream& os) { write_obj(os, m); });
  return kExitOk;
}

inline int sample(const Options& o, std::ostream& out) {
  if (o.count < 0) throw UsageError("sample: --count must be >= 0");
  const auto h = make_archimedean(o.n, o.k, o.r);
  const auto s = sample_surface(h, o.count, o.seed, o.threads);
  emit(o, out, [&](std::ostream& os) { write_samples_csv(os, s); });
  return kExitOk;
}

// --config: a flat JSON object keyed by long flag names, applied to the
// chosen subcommand. CLI11 only fills flags absent from the command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* app) : app_(app) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json cfg;
    try {
      cfg = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    const auto subs = app_->get_subcommands();
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : cfg.items()) {
      CLI::ConfigItem item;
      item.name = key;
      const bool global = app_->get_option_no_throw("--" + key) != nullptr;
      if (!global && !subs.empty()) item.parents = {subs.front()->get_name()};
      if (value.is_boolean()) {
        item.inputs = {value.get<bool>() ? "true" : "false"};
      } else if (value.is_string()) {
        item.inputs = {value.get<std::string>()};
      } else if (value.is_number_integer() || value.is_number_unsigned()) {
        item.inputs = {value.dump()};
      } else if (value.is_number_float()) {
        item.inputs = {format_double(value.get<double>())};
      } else {
        throw CLI::ConversionError("config value must be a scalar: " + key);
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Archimedean spherical arrays: construction, verification and export", "archimedes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker threads (outputs do not depend on it)")->check(CLI::Range(1, 256));
  app.set_config("--config", "", "JSON file of flag values; command-line flags win");
  app.config_formatter(std::make_shared<detail::JsonConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto add_array = [&](CLI::App* s) {
    s->add_option("--n", o.n, "Ambient dimension")->required();
    s->add_option("--k", o.k, "Codimension of the projection")->required();
    s->add_option("--r", o.r, "Largest fiber radius R");
  };

  auto* mk = app.add_subcommand("mk-table", "Table of M_k by quadrature and closed form (CSV)");
  mk->add_option("--k-min", o.k_min);
  mk->add_option("--k-max", o.k_max);
  mk->add_option("--out", o.out);

  auto* sc = app.add_subcommand("scaling", "Profile of f_k on Chebyshev nodes (CSV)");
  sc->add_option("--k", o.k)->required();
  sc->add_option("--samples", o.samples_profile)->check(CLI::PositiveNumber);
  sc->add_option("--out", o.out);

  auto* ve = app.add_subcommand("verify", "Check the projection property (JSON; exit 1 if a gate fails)");
  add_array(ve);
  ve->add_option("--mode", o.mode)->check(CLI::IsMember({"residual", "integral", "statistical"}));
  ve->add_option("--regions", o.regions);
  ve->add_option("--samples", o.samples);
  ve->add_option("--seed", o.seed);
  ve->add_flag("--control", o.control, "Statistical mode on the parabolic non-APP control (expected to fail)");
  ve->add_option("--out", o.out);

  auto* vo = app.add_subcommand("volume", "Total (and enclosed) volume against closed forms (JSON)");
  add_array(vo);
  vo->add_flag("--enclosed", o.enclosed);
  vo->add_option("--samples", o.samples, "Monte Carlo samples for --enclosed (0 skips)");
  vo->add_option("--seed", o.seed);
  vo->add_option("--out", o.out);

  auto* me = app.add_subcommand("mesh", "OBJ mesh (n = 3: revolution; n - k = 2: graph slice)");
  add_array(me);
  me->add_option("--res", o.res)->check(CLI::Range(2, 1 << 14));
  me->add_option("--out", o.out);

  auto* sa = app.add_subcommand("sample", "Uniform surface samples (CSV)");
  add_array(sa);
  sa->add_option("--count", o.count);
  sa->add_option("--seed", o.seed);
  sa->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mk) return detail::mk_table(o, out);
    if (*sc) return detail::scaling(o, out);
    if (*ve) return detail::verify(o, out);
    if (*vo) return detail::volume(o, out);
    if (*me) return detail::mesh(o, out);
    return detail::sample(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitGateFailed;
  }
}

}  // namespace archimedes::cli
