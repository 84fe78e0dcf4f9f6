#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lcg/dalembert.hpp"
#include "lcg/density.hpp"
#include "lcg/errors.hpp"
#include "lcg/io.hpp"
#include "lcg/kernels.hpp"
#include "lcg/lattice.hpp"
#include "lcg/numerics.hpp"
#include "lcg/models.hpp"
#include "lcg/volume.hpp"
#include "report.hpp"

using namespace lcg;
using lcg::cli::Report;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string fixture;
  std::string lattice;
  std::string input;
  std::string catalog;
  std::string out;
  std::string csv;
  std::string dump;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;
  std::optional<int> grid;
  std::vector<std::string> checks;
  std::size_t rays = 0;
  double smoothing = 0.0;

  // kernel
  std::string kappa;
  double theta = 0.0;
  bool sin = false, cos = false, sigma = false, potential = false, jac = false, root = false;
  double t = 0.5;
  double lambda = 0.0;
  double horizon = 100.0;

  // density, compare, singularity
  std::optional<double> N, H, H0, K, area;
  std::size_t ray = 0;
  double x = 0.0, y = 0.0;
  std::optional<double> v, w;
  double q = 0.5;
  std::string range;
  std::string singularity_case;
  double c = 0.0, eps = 1.0, delta = 1.0;
  std::optional<double> kminus;
  double t_max = 10.0;
};

double parse_number(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse '" + s + "' as a number");
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_number(tok, what));
  }
  return out;
}

// const:<v>, pw:<b1,...>;<v0,...> or file:<path>, each optionally followed by @<end>.
CurvaturePotential parse_kappa(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) return read_json_file(spec.substr(5)).get<CurvaturePotential>();
  std::string body = spec;
  double end = kInf;
  if (const auto at = body.find('@'); at != std::string::npos) {
    end = parse_number(body.substr(at + 1), "--kappa end");
    body = body.substr(0, at);
  }
  if (body.rfind("const:", 0) == 0) {
    return CurvaturePotential::constant(parse_number(body.substr(6), "--kappa"), end);
  }
  if (body.rfind("pw:", 0) == 0) {
    const auto semi = body.find(';');
    if (semi == std::string::npos) throw InputError("--kappa pw: needs breakpoints;values");
    return CurvaturePotential(parse_list(body.substr(3, semi - 3), "--kappa breakpoints"),
                              parse_list(body.substr(semi + 1), "--kappa values"), end);
  }
  throw InputError("--kappa must look like const:<v>, pw:<b,...>;<v,...> or file:<path>");
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto v = parse_list(s, "--range");
  if (v.size() != 2 || !(v[0] < v[1])) throw InputError("--range needs s,t with s < t");
  return {v[0], v[1]};
}

double tolerance(const Options& o, double fallback) {
  if (!o.tol) return fallback;
  if (!(*o.tol >= std::numeric_limits<double>::epsilon())) {
    throw InputError("--tol must be at least machine epsilon");
  }
  return *o.tol;
}

FixtureCatalog catalog(const Options& o) {
  return o.catalog.empty() ? FixtureCatalog::builtin() : FixtureCatalog::load(o.catalog);
}

// Where a disintegration comes from, with the lattice kept for lattice-only quantities.
struct Source {
  std::string kind;
  Fixture fixture;
  Disintegration d;
  std::optional<CausalLattice> lattice;
  LatticeDistance distance;
  std::optional<LatticeExtraction> extraction;
};

Source load_source(const Options& o, Report& report) {
  const int given = !o.fixture.empty() + !o.lattice.empty() + !o.input.empty();
  if (given != 1) throw InputError("give exactly one of --fixture, --lattice, --input");
  Source src;
  if (!o.fixture.empty()) {
    src.kind = "fixture";
    src.fixture = resolve_fixture(catalog(o), o.fixture);
    const std::size_t rays = o.rays ? o.rays : 8;
    const std::size_t intervals = o.grid ? static_cast<std::size_t>(*o.grid) : 2048;
    if (intervals < 4) throw InputError("--grid must be at least 4");
    if (src.fixture.is_cone) {
      src.d = analytic_disintegration(src.fixture.cone, rays, intervals);
      report.results()["model"] = src.fixture.cone;
    } else {
      src.d = analytic_disintegration(src.fixture.warped, rays, intervals);
      report.results()["model"] = src.fixture.warped;
    }
  } else if (!o.lattice.empty()) {
    src.kind = "lattice";
    LatticeSpec spec = load_lattice_spec(o.lattice);
    if (o.grid) spec.resolution = *o.grid;
    src.lattice = build_lattice(spec);
    const auto sigma = select_sigma(*src.lattice, spec.sigma);
    src.distance = lattice_lorentz_distance(*src.lattice, sigma);
    const std::size_t seeds = available_seeds(*src.lattice, sigma, src.distance);
    const std::size_t rays = o.rays ? o.rays : std::min<std::size_t>(seeds, 16);
    src.extraction = lattice_extract_rays(*src.lattice, sigma, src.distance, rays, o.seed);
    src.d = src.extraction->disintegration;
    report.results()["lattice"] = Json{{"spec", spec},
                                       {"events", src.lattice->size()},
                                       {"sigma_events", sigma.size()},
                                       {"available_seeds", seeds},
                                       {"dropped_mass", number_json(src.extraction->dropped_mass)}};
  } else {
    src.kind = "input";
    src.d = load_disintegration(o.input);
  }
  report.results()["source"] = src.kind;
  report.results()["rays"] = src.d.rays.size();
  report.results()["N"] = number_json(src.d.N);
  return src;
}

// Runs one check, turning library errors into a failed verdict.
template <class F>
void guarded(Report& report, const std::string& name, F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    report.add_failed_check(name, e.what());
  }
}

double upper_gap(const DAlembertMeasure& m, const Disintegration& d) {
  double gap = 0.0;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    RayDensity shell;
    const auto& h = d.rays[i].density;
    shell.a = h.a;
    shell.b = h.b;
    shell.open_left = h.open_left;
    shell.open_right = h.open_right;
    for (std::size_t j = 0; j < m.rays[i].param.size(); ++j) {
      const double hi = log_derivative_bounds(shell, d.kappa_of(i), d.N, m.rays[i].param[j]).second;
      if (std::isfinite(hi)) {
        gap = std::max(gap, std::abs(m.rays[i].ac_density[j] - hi) / std::max(1.0, std::abs(hi)));
      }
    }
  }
  return gap;
}

void run_comparison_checks(const Options& o, const Source& src, const DAlembertMeasure& m,
                           Report& report) {
  const auto& d = src.d;
  for (const auto& check : o.checks) {
    if (check == "sec") {
      guarded(report, "sec", [&] {
        ComparisonOptions co;
        co.tol = tolerance(o, 1e-8);
        report.add_check("sec", comparison_check_sec(m, d, co),
                         Json{{"upper_equality_gap", number_json(upper_gap(m, d))}});
      });
    } else if (check == "variable") {
      guarded(report, "variable", [&] {
        if (!o.v || !o.w) throw InputError("--check variable needs --v and --w");
        ComparisonOptions co;
        co.tol = tolerance(o, 1e-8);
        report.add_check("variable", comparison_check_variable(m, d, *o.v, *o.w, co));
      });
    } else if (check == "power") {
      guarded(report, "power", [&] {
        const auto fields = power_dalembert(d, o.q);
        Verdict v;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          for (std::size_t j = 0; j < fields[i].param.size(); ++j) {
            v.record(fields[i].value[j] - d.N, {static_cast<double>(i), fields[i].param[j]});
          }
        }
        v.finalize(tolerance(o, 1e-8) * d.N);
        report.add_check("power", v, Json{{"q", o.q}, {"fields", fields}});
      });
    } else if (check == "unsigned") {
      guarded(report, "unsigned", [&] {
        const auto u = unsigned_dalembert(d, tolerance(o, 1e-8));
        report.add_check("unsigned", u.lower_bound, Json{{"report", u}});
      });
    } else if (check == "barrier") {
      guarded(report, "barrier", [&] {
        const double H0 = o.H0 ? *o.H0 : mean_curvature(d).min_H;
        const auto b = barrier_check(d, H0, tolerance(o, 1e-8));
        report.add_check("barrier", b.verdict,
                         Json{{"H0", number_json(H0)}, {"margin", number_json(b.margin)}});
      });
    } else if (check == "mean-curvature") {
      guarded(report, "mean-curvature", [&] {
        if (src.kind != "fixture" || src.fixture.is_cone) {
          throw InputError("mean-curvature check needs a warped fixture");
        }
        const auto mc = mean_curvature(d);
        const double expected = grw_mean_curvature(src.fixture.warped);
        Verdict v;
        for (std::size_t i = 0; i < mc.H.size(); ++i) {
          if (mc.H[i]) v.record(std::abs(*mc.H[i] - expected), {static_cast<double>(i)});
        }
        v.finalize(tolerance(o, 1e-8));
        report.add_check("mean-curvature", v, Json{{"expected", number_json(expected)}});
      });
    } else {
      throw InputError("unknown check '" + check + "'");
    }
  }
}

void emit_csv(const Options& o, const Source& src, const DAlembertMeasure& m) {
  if (o.csv.empty()) return;
  write_text_file(o.csv, profile_series_csv(src.d, m, src.kind == "lattice"));
}

// ---------------------------------------------------------------------------

void cmd_kernel(const Options& o, Report& report) {
  if (o.kappa.empty()) throw InputError("kernel needs --kappa");
  const auto k = parse_kappa(o.kappa);
  auto& r = report.results();
  r["kappa"] = k;
  r["theta"] = number_json(o.theta);
  if (!(o.sin || o.cos || o.sigma || o.potential || o.jac || o.root)) {
    throw InputError("kernel needs one of --sin --cos --sigma --potential --jacobian --root");
  }
  if (o.sin) r["sin"] = number_json(eval_sin_kappa(k, o.theta));
  if (o.cos) r["cos"] = number_json(eval_cos_kappa(k, o.theta));
  if (o.sigma) {
    const auto s = distortion(k, o.t, o.theta);
    r["sigma"] = s ? number_json(*s) : Json("inf");
    r["t"] = number_json(o.t);
  }
  if (o.potential) {
    r["potential"] = number_json(potential_function(k, o.lambda, o.theta));
    r["lambda"] = number_json(o.lambda);
  }
  if (o.jac) {
    if (!o.N || !o.H) throw InputError("--jacobian needs --N and --H");
    r["jacobian"] = number_json(jacobian(k, *o.N, *o.H, o.theta));
  }
  if (o.root) {
    const auto rr = first_root(k, o.horizon);
    r["first_root"] = rr.root ? number_json(*rr.root) : Json("none");
    r["horizon"] = number_json(rr.horizon);
  }
}

void cmd_density(const Options& o, Report& report) {
  RayDensity h;
  CurvaturePotential k;
  double N = 0.0;
  if (!o.input.empty() || !o.fixture.empty() || !o.lattice.empty()) {
    const Source src = load_source(o, report);
    if (o.ray >= src.d.rays.size()) throw InputError("--ray out of range");
    h = src.d.rays[o.ray].density;
    k = src.d.kappa_of(o.ray);
    N = src.d.N;
  } else {
    throw InputError("density needs --fixture, --lattice or --input");
  }
  if (!o.kappa.empty()) k = parse_kappa(o.kappa);
  if (o.N) N = *o.N;
  h.validate();
  auto& r = report.results();
  r["ray"] = o.ray;
  r["interval"] = Json{{"a", number_json(h.a)}, {"b", number_json(h.b)},
                       {"open_left", h.open_left}, {"open_right", h.open_right}};
  r["N"] = number_json(N);
  const auto checks = o.checks.empty() ? std::vector<std::string>{"mcp", "cd", "logder"} : o.checks;
  for (const auto& c : checks) {
    guarded(report, c, [&] {
      TripleSampler sampler;
      if (o.tol) sampler.tol = tolerance(o, sampler.tol);
      if (c == "mcp") {
        report.add_check(c, is_mcp_density(h, k, N, sampler));
      } else if (c == "cd") {
        report.add_check(c, is_cd_density(h, k, N, sampler));
      } else if (c == "logder") {
        report.add_check(c, log_derivative_bounds_check(h, k, N, tolerance(o, 1e-7)));
      } else if (c == "residual") {
        report.add_check(c, cd_differential_residual(h, k, N, tolerance(o, 1e-6)).verdict);
      } else if (c == "sup") {
        if (!o.K) throw InputError("--check sup needs --K");
        const auto s = a_priori_sup_bound_check(h, *o.K, N);
        report.add_check(c, s.verdict, Json{{"sup_h", number_json(s.sup_h)},
                                            {"bound", number_json(s.bound)}});
      } else if (c == "comparison-ii") {
        const auto s = comparison_II_check(h, k, N, tolerance(o, 1e-9));
        report.add_check(c, s.verdict, Json{{"H_plus", number_json(s.H_plus)},
                                            {"max_abs_gap", number_json(s.max_abs_gap)}});
      } else if (c == "bochner") {
        report.add_check(c, bochner_ray_check(h, k, N, o.x, o.y, tolerance(o, 1e-6)));
      } else if (c == "first-order") {
        report.results()["first_order_constant"] = number_json(first_order_integral_estimate(h));
      } else {
        throw InputError("unknown check '" + c + "'");
      }
    });
  }
}

void cmd_model(const Options& o, Report& report) {
  if (o.fixture.empty()) throw InputError("model needs --fixture");
  const auto fx = resolve_fixture(catalog(o), o.fixture);
  auto& r = report.results();
  if (fx.is_cone) {
    r["model"] = fx.cone;
    r["N"] = number_json(fx.cone.N());
    const auto h = cone_ray_density(fx.cone, o.grid ? *o.grid : 2048);
    r["density"] = Json{{"a", number_json(h.a)}, {"b", number_json(h.b)}};
    return;
  }
  const auto& m = fx.warped;
  r["model"] = m;
  r["N"] = number_json(m.N());
  r["mean_curvature"] = number_json(grw_mean_curvature(m));
  r["ricci_at_slice"] = number_json(m.ricci(m.slice_time));
  const auto h = grw_ray_density(m, o.grid ? *o.grid : 2048);
  r["density"] = Json{{"a", number_json(h.a)},
                      {"b", number_json(h.b)},
                      {"open_left", h.open_left},
                      {"open_right", h.open_right}};
  if (!o.range.empty()) {
    const auto [s, t] = parse_range(o.range);
    r["tube_volume"] = number_json(grw_tube_volume(m, s, t));
  }
  guarded(report, "cd-consistency", [&] {
    TripleSampler sampler;
    sampler.tol = tolerance(o, 1e-6);
    const auto k = grw_curvature_potential(m);
    report.add_check("cd-consistency", is_cd_density(grw_ray_density(m, 512), k, m.N(), sampler));
  });
}

void cmd_lattice(const Options& o, Report& report) {
  if (o.lattice.empty()) throw InputError("lattice needs --lattice");
  const Source src = load_source(o, report);
  auto& r = report.results();
  std::size_t reachable = 0;
  double l_max = 0.0;
  for (std::size_t i = 0; i < src.lattice->size(); ++i) {
    if (src.distance.reachable(i)) {
      ++reachable;
      l_max = std::max(l_max, src.distance.l[i]);
    }
  }
  r["reachable_events"] = reachable;
  r["max_distance"] = number_json(l_max);
  const auto slope = constant_slope_residual(*src.extraction, *src.lattice, src.distance);
  r["slope_residual"] = Json{{"mean", number_json(slope.mean)},
                             {"min", number_json(slope.min)},
                             {"max", number_json(slope.max)},
                             {"samples", slope.samples}};
  std::vector<double> grid;
  const int n = o.grid ? std::max(2, *o.grid / 5) : 10;
  for (int i = 1; i <= n; ++i) grid.push_back(l_max * i / n);
  r["plateau"] = Json{{"t", grid}, {"volume", volume_plateau_probe(*src.lattice, src.distance, grid)}};
}

void cmd_disintegrate(const Options& o, Report& report) {
  const Source src = load_source(o, report);
  auto& r = report.results();
  r["slice_area"] = number_json(src.d.slice_area());
  r["inverse_length"] = inverse_length_integral(src.d);
  if (src.extraction) {
    const auto s = constant_slope_residual(src.d);
    r["parameter_slope"] = Json{{"mean", number_json(s.mean)}, {"max", number_json(s.max)}};
  }
  if (o.dump.empty()) {
    r["disintegration"] = src.d;
  } else {
    write_text_file(o.dump, Json(src.d).dump(2) + "\n");
    r["dump"] = o.dump;
  }
}

void cmd_dalembert(const Options& o, Report& report) {
  const Source src = load_source(o, report);
  DAlembertOptions dopt;
  dopt.smoothing = o.smoothing;
  const auto m = dalembert_measure(src.d, dopt);
  report.results()["measure"] = m;
  report.results()["mean_curvature"] = mean_curvature(src.d);
  run_comparison_checks(o, src, m, report);
  emit_csv(o, src, m);
}

void cmd_compare(const Options& o, Report& report) {
  const Source src = load_source(o, report);
  if (o.checks.empty()) throw InputError("compare needs at least one --check");
  DAlembertOptions dopt;
  dopt.smoothing = o.smoothing;
  const auto m = dalembert_measure(src.d, dopt);
  report.results()["final_atom_total"] = number_json(m.final_atom_total());
  run_comparison_checks(o, src, m, report);
  emit_csv(o, src, m);
}

double measured_volume(const Source& src, double s, double t) {
  if (src.kind == "fixture" && !src.fixture.is_cone) return grw_tube_volume(src.fixture.warped, s, t);
  return disintegrated_volume(src.d, s, t);
}

void cmd_volume(const Options& o, Report& report) {
  const Source src = load_source(o, report);
  if (o.range.empty()) throw InputError("volume needs --range s,t");
  const auto [s, t] = parse_range(o.range);
  auto& r = report.results();
  r["range"] = Json{number_json(s), number_json(t)};
  const double measured = measured_volume(src, s, t);
  r["measured_volume"] = number_json(measured);
  if (src.lattice) {
    r["lattice_tube_volume"] = number_json(lattice_tube_volume(*src.lattice, src.distance, s, t));
  }
  guarded(report, "hk-dominance", [&] {
    const auto hk = hk_bound(src.d, s, t);
    r["hk"] = hk;
    Verdict v;
    v.record(measured - hk.bound, {s, t});
    v.finalize(tolerance(o, 1e-8) * std::max(1.0, std::abs(measured)));
    report.add_check("hk-dominance", v,
                     Json{{"equality_gap", number_json(std::abs(hk.bound - measured))}});
  });
  if (std::isfinite(t)) {
    guarded(report, "area-bound", [&] {
      const auto a = area_bound(src.d, t);
      r["area"] = a;
      Verdict v;
      v.record(a.level_area - a.bound, {t});
      v.finalize(tolerance(o, 1e-8) * std::max(1.0, a.level_area));
      report.add_check("area-bound", v);
    });
  }
  if (o.K) r["unifpos"] = unifpos_volume_bound(src.d, *o.K);
}

void cmd_singularity(const Options& o, Report& report) {
  const std::string& c = o.singularity_case;
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) throw InputError(std::string("singularity needs --") + name);
    return *v;
  };
  SingularityVerdict verdict;
  if (c == "const") {
    verdict = const_singularity(need(o.K, "K"), need(o.N, "N"), need(o.H0, "H0"),
                                need(o.area, "area"));
  } else if (c == "var1") {
    verdict = var_singularity_I(o.c, o.eps, need(o.H0, "H0"), need(o.N, "N"), need(o.area, "area"));
  } else if (c == "var2" || c == "var3") {
    std::optional<WarpedProductModel> model;
    if (!o.fixture.empty()) {
      const auto fx = resolve_fixture(catalog(o), o.fixture);
      if (fx.is_cone) throw InputError(c + " needs a warped fixture");
      model = fx.warped;
    }
    if (!model && !o.kminus) throw InputError(c + " needs --fixture or --kminus");
    const double N = o.N ? *o.N : (model ? model->N() : need(o.N, "N"));
    const double H0 = o.H0 ? *o.H0 : (model ? grw_mean_curvature(*model) : need(o.H0, "H0"));
    const double area =
        o.area ? *o.area
               : (model ? model->fiber_area * std::pow(model->warp.f(model->slice_time),
                                                       model->fiber_dim)
                        : need(o.area, "area"));
    if (c == "var2") {
      const double K = need(o.K, "K");
      std::function<double(double)> tube;
      if (o.kminus) {
        const double km = *o.kminus;
        tube = [km, area](double t) { return km * area * t; };
      } else {
        const WarpedProductModel m = *model;
        tube = [m, K](double t) {
          const double end = std::min(t, m.t_max - m.slice_time);
          if (end <= 0.0) return 0.0;
          return m.fiber_area * integrate(
                                    [&](double l) {
                                      const double tt = m.slice_time + l;
                                      return std::max(0.0, K - m.ricci(tt)) *
                                             std::pow(m.warp.f(tt), m.fiber_dim);
                                    },
                                    0.0, end, 1e-10);
        };
      }
      std::vector<double> grid;
      const int n = o.grid ? *o.grid : 64;
      if (n < 2) throw InputError("--grid must be at least 2");
      for (int i = 1; i <= n; ++i) grid.push_back(o.t_max * i / n);
      verdict = var_singularity_II(K, o.delta, N, H0, tube, area, grid);
    } else {
      Options sub = o;
      if (o.fixture.empty() && o.input.empty() && o.lattice.empty()) {
        throw InputError("var3 needs --fixture, --lattice or --input");
      }
      const Source src = load_source(sub, report);
      std::function<double(std::size_t, double)> km;
      if (o.kminus) {
        const double v = *o.kminus;
        km = [v](std::size_t, double) { return v; };
      } else if (src.kind == "fixture") {
        const WarpedProductModel m = *model;
        km = [m](std::size_t, double x) { return std::max(0.0, -m.ricci(m.slice_time + x)); };
      } else {
        throw InputError("var3 on lattice or file input needs --kminus");
      }
      verdict = var_singularity_III(src.d, km, H0, area);
    }
    report.results()["parameters"] = Json{{"N", number_json(N)}, {"H0", number_json(H0)},
                                          {"area", number_json(area)}};
  } else {
    throw InputError("--case must be const, var1, var2 or var3");
  }
  report.results()["verdict"] = verdict;
  for (const auto& check : o.checks) {
    if (check != "applicable") throw InputError("unknown check '" + check + "'");
    Verdict v;
    v.passed = verdict.applicable;
    v.worst_violation = verdict.applicable ? 0.0 : 1.0;
    report.add_check("applicable", v);
  }
}

// The whole pipeline on one source: measure, curvature, comparisons, bounds.
void cmd_report(const Options& o, Report& report) {
  const Source src = load_source(o, report);
  const auto& d = src.d;
  DAlembertOptions dopt;
  dopt.smoothing = o.smoothing;
  const auto m = dalembert_measure(d, dopt);
  auto& r = report.results();
  r["final_atom_total"] = number_json(m.final_atom_total());
  r["mean_curvature"] = mean_curvature(d);
  r["inverse_length"] = inverse_length_integral(d);
  Options co = o;
  if (co.checks.empty()) {
    bool flat = true;
    for (std::size_t i = 0; i < d.rays.size(); ++i) {
      const auto k = d.kappa_of(i).constant_value();
      flat = flat && k && *k == 0.0;
    }
    if (flat) co.checks.push_back("sec");
    co.checks.push_back("unsigned");
  }
  run_comparison_checks(co, src, m, report);
  if (!o.range.empty()) cmd_volume(o, report);
  emit_csv(o, src, m);
}

void add_common(CLI::App* sub, Options& o, bool source) {
  if (source) {
    sub->add_option("--fixture", o.fixture, "Fixture spec, e.g. grw:exp-decay or cone:n=2");
    sub->add_option("--lattice", o.lattice, "Lattice spec JSON file");
    sub->add_option("--input", o.input, "Disintegration JSON file");
    sub->add_option("--rays", o.rays, "Number of rays (0: default)");
    sub->add_option("--smoothing", o.smoothing, "Half-width of the log-slope fit on sampled rays");
    sub->add_option("--csv", o.csv, "Write the profile series CSV here");
  }
  sub->add_option("--catalog", o.catalog, "Fixture catalog JSON file");
  sub->add_option("--seed", o.seed, "Seed for lattice ray selection");
  sub->add_option("--tol", o.tol, "Tolerance override");
  sub->add_option("--grid", o.grid, "Grid resolution override");
  sub->add_option("--out", o.out, "Report path (default: stdout)");
  sub->add_option("--check", o.checks, "Checks to run");
}

Json echo_inputs(const CLI::App* sub) {
  Json j = Json::object();
  j["command"] = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& res = opt->results();
    const std::string key = opt->get_name().substr(2);
    if (opt->get_expected_max() == 0) j[key] = true;
    else if (res.size() == 1 && opt->get_name() != "--check") j[key] = res.front();
    else j[key] = res;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lorentzian comparison geometry toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* kernel = app.add_subcommand("kernel", "Evaluate comparison kernels");
  add_common(kernel, o, false);
  kernel->add_option("--kappa", o.kappa, "const:<v>, pw:<b,...>;<v,...> or file:<path>, optional @end");
  kernel->add_option("--theta", o.theta, "Argument theta");
  kernel->add_flag("--sin", o.sin, "Generalized sine");
  kernel->add_flag("--cos", o.cos, "Generalized cosine");
  kernel->add_flag("--sigma", o.sigma, "Distortion coefficient at (t, theta)");
  kernel->add_flag("--potential", o.potential, "Potential function with slope lambda");
  kernel->add_flag("--jacobian", o.jac, "Jacobian with (N, H)");
  kernel->add_flag("--root", o.root, "First positive zero of the sine up to --horizon");
  kernel->add_option("--t", o.t, "Interpolation parameter in [0, 1]");
  kernel->add_option("--lambda", o.lambda, "Initial slope of the potential function");
  kernel->add_option("--N", o.N, "Dimension bound");
  kernel->add_option("--H", o.H, "Mean curvature");
  kernel->add_option("--horizon", o.horizon, "Search horizon for roots");

  auto* density = app.add_subcommand("density", "Check one ray density");
  add_common(density, o, true);
  density->add_option("--ray", o.ray, "Ray index within the source");
  density->add_option("--kappa", o.kappa, "Curvature potential, as for kernel");
  density->add_option("--N", o.N, "Dimension bound");
  density->add_option("--K", o.K, "Constant for the sup check");
  density->add_option("--x", o.x, "Left point for the Bochner check");
  density->add_option("--y", o.y, "Right point for the Bochner check");

  auto* model = app.add_subcommand("model", "Describe a fixture spacetime");
  add_common(model, o, false);
  model->add_option("--fixture", o.fixture, "Fixture spec");
  model->add_option("--range", o.range, "s,t");

  auto* lattice = app.add_subcommand("lattice", "Build a causal lattice and its distance");
  add_common(lattice, o, true);

  auto* disint = app.add_subcommand("disintegrate", "Build a disintegration");
  add_common(disint, o, true);
  disint->add_option("--dump", o.dump, "Write the disintegration JSON here");

  for (auto* sub : {app.add_subcommand("dalembert", "Evaluate the d'Alembertian measure"),
                    app.add_subcommand("compare", "Run comparison checks")}) {
    add_common(sub, o, true);
    sub->add_option("--v", o.v, "Left end of the variable comparison");
    sub->add_option("--w", o.w, "Right end of the variable comparison");
    sub->add_option("--q", o.q, "Exponent of the power check");
    sub->add_option("--H0", o.H0, "Barrier mean curvature (default: min H)");
  }

  auto* volume = app.add_subcommand("volume", "Tube volume bounds");
  add_common(volume, o, true);
  volume->add_option("--range", o.range, "s,t");
  volume->add_option("--K", o.K, "Uniform positive curvature bound");

  auto* sing = app.add_subcommand("singularity", "Volume singularity criteria");
  add_common(sing, o, true);
  sing->add_option("--case", o.singularity_case, "const, var1, var2 or var3")->required();
  sing->add_option("--K", o.K, "Curvature bound");
  sing->add_option("--N", o.N, "Dimension bound");
  sing->add_option("--H0", o.H0, "Mean curvature bound of the slice");
  sing->add_option("--area", o.area, "Slice area");
  sing->add_option("--c", o.c, "Constant c in k_- <= c min(eps^-2, l^-2) (var1)");
  sing->add_option("--eps", o.eps, "Scale eps in the same bound (var1)");
  sing->add_option("--delta", o.delta, "Threshold for the integral of k_-");
  sing->add_option("--kminus", o.kminus, "Constant k_- in place of the fixture's");
  sing->add_option("--tmax", o.t_max, "Largest tube height for var2");

  auto* rep = app.add_subcommand("report", "Run the whole pipeline on one source");
  add_common(rep, o, true);
  rep->add_option("--range", o.range, "s,t for the volume checks");
  rep->add_option("--v", o.v, "Left end of the variable comparison");
  rep->add_option("--w", o.w, "Right end of the variable comparison");
  rep->add_option("--H0", o.H0, "Barrier mean curvature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    Report report(name, o.seed);
    report.inputs() = echo_inputs(sub);
    if (o.tol) tolerance(o, 0.0);
    if (name == "kernel") cmd_kernel(o, report);
    else if (name == "density") cmd_density(o, report);
    else if (name == "model") cmd_model(o, report);
    else if (name == "lattice") cmd_lattice(o, report);
    else if (name == "disintegrate") cmd_disintegrate(o, report);
    else if (name == "dalembert") cmd_dalembert(o, report);
    else if (name == "compare") cmd_compare(o, report);
    else if (name == "volume") cmd_volume(o, report);
    else if (name == "singularity") cmd_singularity(o, report);
    else if (name == "report") cmd_report(o, report);
    const std::string text = report.finish();
    if (o.out.empty()) std::cout << text;
    else write_text_file(o.out, text);
    if (!report.all_passed()) {
      std::cerr << "one or more checks failed\n";
      return kExitCheckFailed;
    }
    return 0;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
