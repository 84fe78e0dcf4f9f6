// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include "lcg/dalembert.hpp"
#include "lcg/density.hpp"
#include "lcg/kernels.hpp"
#include "lcg/lattice.hpp"
#include "lcg/models.hpp"
#include "lcg/volume.hpp"
#include "oracles.hpp"

using namespace lcg;
constexpr double pi = std::numbers::pi;

namespace {

int failures = 0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = "first failure: " + what + "; " + detail;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.ok) ++failures;
  std::printf("%s %2d %s: %s\n", o.ok ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
}

const FixtureCatalog& catalog() {
  static const FixtureCatalog c = FixtureCatalog::builtin();
  return c;
}

WarpedProductModel grw(const std::string& spec) { return resolve_fixture(catalog(), spec).warped; }

CurvaturePotential random_potential(oracle::Gen& g, double lo, double hi, double span) {
  const int pieces = g.integer(1, 5);
  std::vector<double> bps, vals;
  double x = 0.0;
  for (int i = 0; i + 1 < pieces; ++i) {
    x += g.uniform(0.1, span / pieces);
    bps.push_back(x);
  }
  for (int i = 0; i < pieces; ++i) vals.push_back(g.uniform(lo, hi));
  return {bps, vals};
}

RayDensity sin_model(double k, double N, double a, double b, std::size_t n) {
  auto h = RayDensity::sample(
      [=](double x) { return std::pow(oracle::sin_k(k / (N - 1), x), N - 1); }, a, b, n);
  if (k > 0 && std::abs(b - pi / std::sqrt(k / (N - 1))) < 1e-12) h.values.back() = 0.0;
  return h;
}

// ---------------------------------------------------------------------------

Outcome closed_form_kernels() {
  Outcome o;
  oracle::Gen g(1);
  double worst = 0.0;
  int points = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
    const auto kp = CurvaturePotential::constant(k);
    const double lim = k > 0 ? 0.95 * pi / std::sqrt(k) : 1.5;
    for (int i = 0; i < 2000; ++i, ++points) {
      const double th = lim * (i + 0.5) / 2000.0;
      const double t = g.uniform(0.0, 1.0), lambda = g.uniform(-1.0, 1.0);
      const double N = g.uniform(1.5, 4.0), H = g.uniform(-1.0, 1.0);
      const double s = oracle::sin_k(k, th), c = oracle::cos_k(k, th);
      const double kn = k / (N - 1);
      const double p = oracle::cos_k(kn, th) + H / (N - 1) * oracle::sin_k(kn, th);
      const double errs[] = {
          std::abs(eval_sin_kappa(kp, th) - s),
          std::abs(eval_cos_kappa(kp, th) - c),
          std::abs(*distortion(kp, t, th) - oracle::sin_k(k, t * th) / s),
          std::abs(potential_function(kp, lambda, th) - (c + lambda * s)),
          std::abs(jacobian(kp, N, H, th) - std::pow(std::max(p, 0.0), N - 1)),
      };
      for (double e : errs) worst = std::max(worst, e);
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-12, "max abs error " + fmt("%.2e", worst));
  o.require(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  o.detail += std::to_string(points) + " points, 5 kernels, max abs error " + fmt("%.2e", worst) +
              ", " + fmt("%.3f s", secs);
  return o;
}

Outcome sturm_domination() {
  Outcome o;
  oracle::Gen g(2);
  DistortionGrid grid;
  for (int i = 1; i <= 10; ++i) grid.t_values.push_back(i / 10.0);
  for (int i = 1; i <= 100; ++i) grid.theta_values.push_back(0.03 * i);
  double worst = -kInf;
  const auto t0 = std::chrono::steady_clock::now();
  for (int pair = 0; pair < 100; ++pair) {
    const auto hi = random_potential(g, -2.0, 2.0, 3.0);
    const auto dip = random_potential(g, 0.0, 1.5, 3.0);
    std::set<double> cuts(hi.breakpoints().begin(), hi.breakpoints().end());
    cuts.insert(dip.breakpoints().begin(), dip.breakpoints().end());
    std::vector<double> bps(cuts.begin(), cuts.end()), vals;
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), bps.begin(), bps.end());
    edges.push_back(edges.back() + 1.0);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double mid = 0.5 * (edges[i] + edges[i + 1]);
      vals.push_back(hi(mid) - dip(mid));
    }
    const CurvaturePotential lo(bps, vals);
    const auto v = sturm_domination_check(lo, hi, grid, 1e-9);
    worst = std::max(worst, v.worst_violation);
    o.require(v.passed, "pair " + std::to_string(pair));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime " + fmt("%.3f s", secs));
  o.detail += "100 pairs x 1000 (t, theta), worst sigma_lo - sigma_hi " + fmt("%.2e", worst) +
              ", " + fmt("%.3f s", secs);
  return o;
}

Outcome density_families() {
  Outcome o;
  double worst_cd = -kInf, worst_res = 0.0;
  struct Case { double k, N, res_a, res_b; };
  for (const Case c : {Case{0.0, 2.0, 1.0, 2.0}, Case{2.0, 3.0, 0.6, 2.5}, Case{-2.0, 3.0, 0.5, 2.0}}) {
    const double b = c.k > 0 ? pi / std::sqrt(c.k / (c.N - 1)) : 2.0;
    const auto kp = CurvaturePotential::constant(c.k);
    const auto v = is_cd_density(sin_model(c.k, c.N, 0.0, b, 1024), kp, c.N);
    worst_cd = std::max(worst_cd, v.worst_violation);
    o.require(v.passed && v.worst_violation <= 1e-8, "CD family k=" + fmt("%g", c.k));
    const auto r = cd_differential_residual(sin_model(c.k, c.N, c.res_a, c.res_b, 8192), kp, c.N);
    for (double x : r.residual) worst_res = std::max(worst_res, std::abs(x));
  }
  o.require(worst_res <= 1e-6, "residual " + fmt("%.2e", worst_res));

  const auto e = RayDensity::sample([](double x) { return std::exp(-10 * x); }, 0.0, 1.0, 1024);
  const auto full = is_mcp_density(e, CurvaturePotential::constant(0.0), 2.0);
  TripleSampler mid;
  mid.t_values = {0.5};
  const auto half = is_mcp_density(e, CurvaturePotential::constant(0.0), 2.0, mid);
  o.require(!full.passed && full.worst_violation >= 0.49, "exp(-10x) full grid");
  o.require(!half.passed && half.worst_violation >= 0.49 &&
                half.witness == std::vector<double>{0.0, 1.0, 0.5},
            "exp(-10x) witness");
  o.detail += "worst CD violation " + fmt("%.2e", worst_cd) + ", max |residual| " +
              fmt("%.2e", worst_res) + ", exp(-10x) violation " +
              fmt("%.4f", half.worst_violation) + " at (0, 1, 0.5)";
  return o;
}

Outcome comparison_saturation() {
  Outcome o;
  const auto cone = analytic_disintegration(MinkowskiConeModel{"c", 2, 1.0}, 4, 2048);
  const auto m = dalembert_measure(cone);
  double gap = 0.0;
  for (const auto& r : m.rays) {
    for (std::size_t j = 0; j < r.param.size(); ++j) {
      gap = std::max(gap, std::abs(r.ac_density[j] - 2.0 / r.param[j]));
    }
    o.require(!r.atom_initial && !r.atom_final, "cone atoms");
  }
  double power_gap = 0.0;
  for (double q : {0.5, -1.0, -3.0}) {
    for (const auto& f : power_dalembert(cone, q)) {
      for (double v : f.value) power_gap = std::max(power_gap, std::abs(v - 3.0));
    }
  }
  const auto e = grw("grw:exp-decay");
  const auto c2 = comparison_II_check(grw_ray_density(e, 4096), grw_curvature_potential(e), 3.0);
  o.require(gap <= 1e-9, "box l_o gap " + fmt("%.2e", gap));
  o.require(power_gap <= 1e-9, "power gap " + fmt("%.2e", power_gap));
  o.require(c2.verdict.passed && c2.max_abs_gap <= 1e-9, "exp-decay Jacobian gap");
  o.detail += "|box l_o - 2/l_o| " + fmt("%.2e", gap) + ", |box_p v_q - N| " +
              fmt("%.2e", power_gap) + ", exp-decay Jacobian gap " + fmt("%.2e", c2.max_abs_gap);
  return o;
}

Outcome ibp_convergence() {
  Outcome o;
  const TestFunction cubic{[](std::size_t, double x) { return x * x * x / 24; },
                           [](std::size_t, double x) { return x * x / 8; }};
  const TestFunction bump{[](std::size_t, double r) { return 0.5 * std::pow(1 - r, 3); },
                          [](std::size_t, double r) { return -1.5 * (1 - r) * (1 - r); }};
  const auto flat = grw("grw:flat");
  const double flat_len = flat.t_max - flat.t_min;
  const MinkowskiConeModel cone{"c", 2, 1.0};
  std::string ratios;
  for (bool is_cone : {false, true}) {
    std::vector<double> res;
    for (double step : {1e-2, 5e-3, 2.5e-3}) {
      const auto n = static_cast<std::size_t>(std::lround((is_cone ? 1.0 : flat_len) / step));
      const auto d = is_cone ? analytic_disintegration(cone, 2, n) : analytic_disintegration(flat, 2, n);
      res.push_back(ibp_residual(d, is_cone ? bump : cubic));
    }
    ratios += is_cone ? " cone" : "flat";
    for (std::size_t i = 1; i < res.size(); ++i) {
      const double q = res[i - 1] / res[i];
      ratios += fmt(" %.3f", q);
      o.require(q >= 3.5 && q <= 4.5, "ratio " + fmt("%.3f", q));
    }
    ratios += fmt(" (finest %.2e);", res.back());
    o.require(res.back() <= 1e-6, "finest residual " + fmt("%.2e", res.back()));
  }
  o.detail += "halving ratios " + ratios;
  return o;
}

LatticeSpec cone_spec(int res) {
  LatticeSpec s;
  s.spatial_dims = 2;
  s.resolution = res;
  s.region = "cone";
  s.sigma = "apex";
  s.horizon = 3;
  s.cone_speed = 0.7;
  s.max_radius = 1.0;
  s.t_max = std::ceil(res / std::sqrt(1 - 0.49)) / res;
  s.x_extent = s.t_max * 0.7;
  return s;
}

Outcome lattice_refinement() {
  Outcome o;
  for (auto [res, tol] : {std::pair{50, 0.15}, {100, 0.08}, {200, 0.05}}) {
    const auto lat = build_lattice(cone_spec(res));
    const auto sigma = select_sigma(lat, "apex");
    const auto d = lattice_lorentz_distance(lat, sigma);
    const auto ex = lattice_extract_rays(lat, sigma, d, available_seeds(lat, sigma, d));
    const auto p = pooled(ex.disintegration);
    const auto m = dalembert_measure(p, {0.05});
    double worst = 0.0;
    for (std::size_t j = 0; j < m.rays[0].param.size(); ++j) {
      const double r = m.rays[0].param[j];
      if (r < 0.2 || r > 0.8) continue;
      worst = std::max(worst, std::abs(m.rays[0].ac_density[j] * r / 2.0 - 1.0));
    }
    o.require(worst <= tol, "resolution " + std::to_string(res));
    o.detail += "res " + std::to_string(res) + fmt(": %.1f%%", 100 * worst) +
                fmt(" (limit %.0f%%); ", 100 * tol);
  }

  oracle::Gen g(6);
  int compared = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int dims = g.integer(1, 2), horizon = g.integer(1, 3), n = g.integer(3, 12);
    std::set<std::vector<int>> pts;
    while (static_cast<int>(pts.size()) < n) {
      std::vector<int> p{g.integer(0, 5)};
      for (int k = 0; k < dims; ++k) p.push_back(g.integer(-2, 2));
      pts.insert(p);
    }
    oracle::BruteForce bf{dims + 1, horizon, 0.25, {pts.begin(), pts.end()}};
    std::vector<int> flat;
    for (const auto& p : bf.ev) flat.insert(flat.end(), p.begin(), p.end());
    const CausalLattice lat(dims, 0.25, horizon, flat);
    const std::vector<std::size_t> sigma{static_cast<std::size_t>(g.integer(0, n - 1))};
    const auto dist = lattice_lorentz_distance(lat, sigma);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const double want = bf.signed_distance(sigma, i);
      if (std::isnan(want)) {
        o.require(!dist.reachable(i), "reachability trial " + std::to_string(trial));
        continue;
      }
      o.require(dist.reachable(i), "reachability trial " + std::to_string(trial));
      worst = std::max(worst, std::abs(dist.l[i] - want));
      ++compared;
    }
  }
  o.require(worst <= 1e-12, "DP mismatch " + fmt("%.2e", worst));
  o.detail += "DP vs exhaustive: " + std::to_string(compared) + " distances on 300 lattices, max " +
              fmt("%.1e", worst);
  return o;
}

Disintegration perturbed(double K, double N, double H, double c, double L, std::size_t n = 2000) {
  Disintegration d;
  d.N = N;
  d.kappa = CurvaturePotential::constant(K);
  Ray r;
  r.weight = 1.0;
  r.density.a = -L;
  r.density.b = L;
  r.density.step = 2 * L / n;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = -L + i * r.density.step;
    r.density.values.push_back(constant_jacobian(K, N, H, x) * std::exp(-c * x * x));
  }
  r.density.values[n / 2] = 1.0;
  r.slice_offset = 0.0;
  d.rays.push_back(r);
  return d;
}

Outcome heintze_karcher() {
  Outcome o;
  double eq_gap = 0.0;
  const std::vector<std::pair<double, double>> ranges{{-1.0, 1.0}, {0.0, 1.2}, {-0.5, 0.3}};
  for (const char* name : {"grw:flat", "grw:exp-decay", "grw:cos", "grw:cosh"}) {
    const auto m = grw(name);
    const auto d = analytic_disintegration(m, 4);
    auto rs = ranges;
    if (std::isinf(m.t_max)) rs.emplace_back(0.0, kInf);
    for (auto [s, t] : rs) {
      eq_gap = std::max(eq_gap, std::abs(hk_bound(d, s, t).bound - grw_tube_volume(m, s, t)));
    }
  }
  o.require(eq_gap <= 1e-8, "analytic equality " + fmt("%.2e", eq_gap));

  oracle::Gen g(17);
  double min_slack = kInf;
  for (int trial = 0; trial < 20; ++trial) {
    const double K = 2.0 * g.integer(-1, 1), N = g.uniform(2.0, 4.0), H = g.uniform(-1, 1);
    double L = 1.5;
    for (double h : {H, -H}) {
      if (const auto z = constant_jacobian_zero(K, N, h)) L = std::min(L, 0.9 * *z);
    }
    const auto d = perturbed(K, N, H, g.uniform(0.5, 2.0), L);
    min_slack = std::min(min_slack, hk_bound(d, -L, L).bound - disintegrated_volume(d, -L, L));
  }
  o.require(min_slack >= 0.0, "perturbed slack " + fmt("%.2e", min_slack));

  // Slice lattices; the measured side is the lattice tube volume when the rays
  // cover every event, and the rays' own volume otherwise.
  int runs = 0;
  double worst_rel = -kInf;
  for (int dims : {1, 2}) {
    for (int res : {20, 40}) {
      for (const char* region : {"box", "cap"}) {
        LatticeSpec s;
        s.spatial_dims = dims;
        s.resolution = res;
        s.t_min = -0.5;
        s.t_max = 0.5;
        s.x_extent = 0.5;
        s.region = region;
        s.cap_height = 0.5;
        s.cap_slope = 0.5;
        const auto lat = build_lattice(s);
        const auto sigma = select_sigma(lat, "t=0");
        const auto dist = lattice_lorentz_distance(lat, sigma);
        const std::size_t seeds = available_seeds(lat, sigma, dist);
        for (std::size_t count : {seeds, std::min<std::size_t>(seeds, 5)}) {
          const auto ex = lattice_extract_rays(lat, sigma, dist, count, 11);
          for (auto [lo, hi] : {std::pair{-0.3, 0.3}, {0.0, 0.45}, {-0.45, 0.1}}) {
            const double bound = hk_bound(ex.disintegration, lo, hi).bound;
            double vol = disintegrated_volume(ex.disintegration, lo, hi);
            if (count == seeds && ex.dropped_mass == 0.0) {
              vol = std::max(vol, lattice_tube_volume(lat, dist, lo, hi));
            }
            worst_rel = std::max(worst_rel, (vol - bound) / std::max(1e-300, vol));
            ++runs;
          }
        }
      }
    }
  }
  o.require(worst_rel <= 1e-12, "lattice excess " + fmt("%.2e", worst_rel));
  o.detail += "equality gap " + fmt("%.2e", eq_gap) + "; perturbed min slack " +
              fmt("%.2e", min_slack) + "; " + std::to_string(runs) +
              " lattice runs, max relative excess " + fmt("%.1e", worst_rel);
  return o;
}

Outcome singularity_thresholds() {
  Outcome o;
  double worst = 0.0;
  for (auto [N, H0] : {std::pair{3.0, -2.0}, {2.0, -0.5}, {4.5, -3.0}}) {
    const auto v = const_singularity(0.0, N, H0, 1.0);
    worst = std::max(worst, std::abs(*v.theta0 - (N - 1) / -H0));
  }
  for (auto [K, N, H0] : {std::tuple{-1.0, 2.0, -2.0}, {-2.0, 3.0, -3.0}, {-0.5, 4.0, -5.0}}) {
    const double x = -H0 / std::sqrt(-K * (N - 1));
    const double want = 0.5 * std::log((x + 1) / (x - 1)) * std::sqrt((N - 1) / -K);
    const auto v = const_singularity(K, N, H0, 1.0);
    o.require(v.case_tag == "const-c", "strict case tag");
    worst = std::max(worst, std::abs(*v.theta0 - want));
  }
  const auto border = const_singularity(-2.0, 3.0, -2.0, 1.7);
  const double bgap = std::abs(*border.volume_bound - 1.7 * 0.5);
  const auto plateau = volume_plateau_probe(grw("grw:exp-decay"), {1.0, 5.0});
  const double pgap = std::abs(plateau[1] - 0.5);
  const auto lim = var_singularity_I(1e-13, 1.0, -2.0, 3.0, 1.0);
  const double vgap = std::abs(*lim.theta0 - *const_singularity(0.0, 3.0, -2.0, 1.0).theta0);
  o.require(worst <= 1e-12, "theta0 " + fmt("%.2e", worst));
  o.require(bgap <= 1e-12, "borderline " + fmt("%.2e", bgap));
  o.require(pgap <= 1e-4, "plateau " + fmt("%.2e", pgap));
  o.require(vgap <= 1e-10, "var I limit " + fmt("%.2e", vgap));
  o.detail += "theta0 error " + fmt("%.1e", worst) + ", borderline error " + fmt("%.1e", bgap) +
              ", plateau gap at t=5 " + fmt("%.2e", pgap) + ", var I limit gap " +
              fmt("%.1e", vgap);
  return o;
}

Outcome mean_curvature_checks() {
  Outcome o;
  double worst = 0.0;
  struct Case { const char* spec; std::function<double(double)> H; };
  const std::vector<Case> cases{
      {"grw:flat", [](double) { return 0.0; }},
      {"grw:exp-decay", [](double) { return -2.0; }},
      {"grw:cos,t0=0.4", [](double t) { return -2.0 * std::tan(t); }},
      {"grw:cosh,t0=-0.7", [](double t) { return 2.0 * std::tanh(t); }},
      {"grw:collapse,t0=0.3,n=3", [](double t) { return -3.0 / (1.0 - t); }},
  };
  for (const auto& c : cases) {
    const auto m = grw(c.spec);
    const auto rep = mean_curvature(analytic_disintegration(m, 3));
    for (const auto& H : rep.H) {
      o.require(H.has_value(), std::string("finite H on ") + c.spec);
      if (H) worst = std::max(worst, std::abs(*H - c.H(m.slice_time)));
    }
  }
  o.require(worst <= 1e-8, "H error " + fmt("%.2e", worst));

  const auto e = grw("grw:exp-decay");
  const double qe = normal_variation_quotient(e, 1.0, 1e-3);
  const double rel = std::abs(qe / (1.0 * -2.0 * 1.0) - 1.0);
  const auto c = grw("grw:cos");
  const double qc = std::abs(normal_variation_quotient(c, 1.0, 1e-3));
  o.require(rel <= 5e-3, "exp-decay variation " + fmt("%.2e", rel));
  o.require(qc <= 1e-3, "cos variation " + fmt("%.2e", qc));

  const auto col = grw("grw:collapse");
  const auto b = barrier_check(analytic_disintegration(col, 3), grw_mean_curvature(col));
  o.require(b.verdict.passed && std::abs(b.margin) <= 1e-8, "barrier margin");
  o.detail += "H error " + fmt("%.1e", worst) + ", variation quotient exp-decay rel " +
              fmt("%.2e", rel) + ", cos abs " + fmt("%.2e", qc) + ", barrier margin " +
              fmt("%.1e", b.margin);
  return o;
}

Outcome bochner() {
  Outcome o;
  oracle::Gen g(10);
  int accepted = 0, tries = 0;
  double worst = kInf;
  while (accepted < 100 && tries < 5000) {
    ++tries;
    const double c1 = g.uniform(-2, 2), c2 = g.uniform(-2, 2);
    const double k = g.uniform(-2, 2), N = g.uniform(1.5, 4.0);
    const auto h = RayDensity::sample([=](double x) { return std::exp(c1 * x + c2 * x * x); },
                                      0.0, 1.0, 512);
    const auto kp = CurvaturePotential::constant(k);
    if (!is_cd_density(h, kp, N).passed) continue;
    ++accepted;
    const int i = g.integer(8, 250), j = g.integer(260, 504);
    const auto v = bochner_ray_check(h, kp, N, i * h.step, j * h.step);
    worst = std::min(worst, -v.worst_violation);
  }
  o.require(accepted == 100, "only " + std::to_string(accepted) + " CD densities");
  o.require(worst >= -1e-6, "random margin " + fmt("%.2e", worst));
  double eq = 0.0;
  for (auto [k, N, b] : {std::tuple{2.0, 3.0, pi}, {-2.0, 3.0, 2.0}, {0.0, 2.0, 2.0}}) {
    const auto m = sin_model(k, N, 0.0, b, 8192);
    const double s = m.step;
    const auto v = bochner_ray_check(m, CurvaturePotential::constant(k), N, 1024 * s, 6000 * s);
    eq = std::max(eq, std::abs(v.worst_violation));
  }
  o.require(eq <= 1e-6, "equality margin " + fmt("%.2e", eq));
  o.detail += std::to_string(accepted) + " CD densities, min margin " + fmt("%.2e", worst) +
              ", equality |margin| " + fmt("%.2e", eq);
  return o;
}

Outcome minkowski_content() {
  Outcome o;
  LatticeSpec s;
  s.resolution = 200;
  s.t_min = 0.0;
  s.t_max = 1.0;
  s.x_extent = 0.5;
  s.region = "cap";
  s.cap_height = 1.0;
  s.cap_slope = 0.5;
  const auto lat = build_lattice(s);
  const auto sigma = select_sigma(lat, "t=0");
  const auto d = lattice_lorentz_distance(lat, sigma);
  const auto ex = lattice_extract_rays(lat, sigma, d, available_seeds(lat, sigma, d));
  const auto A = extracted_final_points(ex);
  const auto rep = minkowski_content_bound_check(lat, ex, A, 0.05, 0.1);
  o.require(!A.empty() && rep.verdict.passed, "collar exceeds atoms by more than 10%");
  o.detail += "collar " + fmt("%.4f", rep.collar) + ", atom total " + fmt("%.4f", rep.atom_total) +
              ", rays ending in A " + std::to_string(rep.rays_in_set);
  return o;
}

}  // namespace

int main() {
  run(1, "closed-form kernel agreement", closed_form_kernels);
  run(2, "Sturm domination", sturm_domination);
  run(3, "density equality families", density_families);
  run(4, "comparison saturation", comparison_saturation);
  run(5, "integration-by-parts convergence", ibp_convergence);
  run(6, "lattice refinement", lattice_refinement);
  run(7, "Heintze-Karcher equality and direction", heintze_karcher);
  run(8, "singularity thresholds", singularity_thresholds);
  run(9, "mean curvature", mean_curvature_checks);
  run(10, "Bochner", bochner);
  run(11, "Minkowski content", minkowski_content);
  return failures == 0 ? 0 : 1;
}
