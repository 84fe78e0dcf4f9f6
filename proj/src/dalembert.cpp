#include "lcg/dalembert.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "lcg/density.hpp"
#include "lcg/errors.hpp"
#include "lcg/numerics.hpp"

namespace lcg {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_positive_interior(const Ray& ray, std::size_t index) {
  const auto& v = ray.density.values;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw SingularDensityError("ray " + std::to_string(index) +
                                 " density vanishes at interior sample " + std::to_string(i));
    }
  }
}

bool kappa_is_zero(const CurvaturePotential& k) {
  const auto c = k.constant_value();
  return c && *c == 0.0;
}

void require_sec(const Disintegration& d) {
  if (!kappa_is_zero(d.kappa)) {
    throw InputError("SEC comparison needs kappa identically 0; use the variable check");
  }
  for (const auto& k : d.ray_kappa) {
    if (!kappa_is_zero(k)) {
      throw InputError("SEC comparison needs kappa identically 0; use the variable check");
    }
  }
}

double endpoint_value(const Ray& ray, bool right) {
  if (ray.profile) return ray.profile->value(right ? ray.density.b : ray.density.a);
  return right ? ray.density.values.back() : ray.density.values.front();
}

// Least-squares slope of log h against x over samples within w of x_i.
std::optional<double> local_slope(const RayDensity& h, std::size_t i, double w) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  const double tol = 1e-9 * h.step;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double u = h.x(j) - h.x(i);
    if (std::abs(u) > w + tol || !(h.values[j] > 0.0)) continue;
    const double y = std::log(h.values[j]);
    sx += u;
    sy += y;
    sxx += u * u;
    sxy += u * y;
    ++m;
  }
  if (m < 3) return std::nullopt;
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

std::vector<double> interior_params(const RayDensity& h) {
  std::vector<double> x;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) x.push_back(h.x(i));
  return x;
}

RayDensity endpoint_shell(double a, double b, bool open_left, bool open_right) {
  RayDensity s;
  s.a = a;
  s.b = b;
  s.open_left = open_left;
  s.open_right = open_right;
  return s;
}

void record_bounds(Verdict& v, double value, double lo, double hi, double x, std::size_t ray) {
  if (std::isfinite(lo)) v.record((lo - value) / std::max(1.0, std::abs(lo)), {double(ray), x});
  if (std::isfinite(hi)) v.record((value - hi) / std::max(1.0, std::abs(hi)), {double(ray), x});
}

double require_offset(const Ray& ray, std::size_t index) {
  if (!ray.slice_offset) {
    throw InputError("ray " + std::to_string(index) + " has no slice offset");
  }
  return *ray.slice_offset;
}

}  // namespace

double DAlembertMeasure::final_atom_total() const {
  std::vector<double> terms;
  for (const auto& r : rays) {
    if (r.atom_final) terms.push_back(r.weight * *r.atom_final);
  }
  return ordered_sum(terms);
}

std::vector<double> ray_log_derivative(const Ray& ray, double smoothing) {
  const RayDensity& h = ray.density;
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    if (ray.profile) {
      out.push_back(ray.profile->log_derivative(h.x(i)));
      continue;
    }
    if (smoothing > h.step) {
      if (const auto s = local_slope(h, i, smoothing)) {
        out.push_back(*s);
        continue;
      }
    }
    const double lo = h.values[i - 1], mid = h.values[i], hi = h.values[i + 1];
    if (lo > 0.0 && hi > 0.0) {
      out.push_back((std::log(hi) - std::log(lo)) / (2.0 * h.step));
    } else {
      // A vanishing neighbour sits at an endpoint; differentiate h instead.
      out.push_back((hi - lo) / (2.0 * h.step * mid));
    }
  }
  return out;
}

DAlembertMeasure dalembert_measure(const Disintegration& d, const DAlembertOptions& opts) {
  d.validate();
  if (opts.smoothing < 0.0) throw InputError("smoothing width must be nonnegative");
  DAlembertMeasure m;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    require_positive_interior(ray, i);
    RayMeasure rm;
    rm.weight = ray.weight;
    rm.param = interior_params(ray.density);
    rm.ac_density = ray_log_derivative(ray, opts.smoothing);
    if (ray.has_initial_point()) {
      const double v = endpoint_value(ray, false);
      if (v != 0.0) rm.atom_initial = v;
    }
    if (ray.has_final_point()) {
      const double v = endpoint_value(ray, true);
      if (v != 0.0) rm.atom_final = -v;
    }
    m.rays.push_back(std::move(rm));
  }
  return m;
}

double apply_to_test_function(const DAlembertMeasure& m, const Disintegration& d,
                              const TestFunction& f) {
  if (m.rays.size() != d.rays.size()) throw InputError("measure does not match disintegration");
  std::vector<double> terms;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const RayDensity& h = ray.density;
    for (const bool right : {false, true}) {
      const bool censored = right ? h.open_right : h.open_left;
      const double x = right ? h.b : h.a;
      if (censored && std::abs(f.f(i, x)) > 1e-12) {
        throw InputError("test function must vanish at the censored end of ray " +
                         std::to_string(i));
      }
    }
    const auto dh = ray.profile ? std::vector<double>{} : derivative(h.values, h.step);
    std::vector<double> g(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
      const double x = h.x(j);
      g[j] = f.f(i, x) * (ray.profile ? ray.profile->derivative(x) : dh[j]);
    }
    double s = trapezoid(g, h.step);
    const RayMeasure& rm = m.rays[i];
    if (rm.atom_final) s += f.f(i, h.b) * *rm.atom_final;
    if (rm.atom_initial) s += f.f(i, h.a) * *rm.atom_initial;
    terms.push_back(ray.weight * s);
  }
  return ordered_sum(terms);
}

double ibp_residual(const Disintegration& d, const TestFunction& f) {
  const auto m = dalembert_measure(d);
  std::vector<double> terms;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const RayDensity& h = d.rays[i].density;
    std::vector<double> g(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) g[j] = f.df(i, h.x(j)) * h.values[j];
    terms.push_back(d.rays[i].weight * trapezoid(g, h.step));
  }
  return std::abs(ordered_sum(terms) + apply_to_test_function(m, d, f));
}

Verdict comparison_check_sec(const DAlembertMeasure& m, const Disintegration& d,
                             const ComparisonOptions& opts) {
  require_sec(d);
  if (m.rays.size() != d.rays.size()) throw InputError("measure does not match disintegration");
  const auto zero = CurvaturePotential::constant(0.0);
  Verdict v;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const RayDensity& h = d.rays[i].density;
    const auto shell = endpoint_shell(h.a, h.b, h.open_left, h.open_right);
    const RayMeasure& rm = m.rays[i];
    for (std::size_t j = 0; j < rm.param.size(); ++j) {
      const double x = rm.param[j];
      if (x < opts.min_param || x > opts.max_param) continue;
      const auto [lo, hi] = log_derivative_bounds(shell, zero, d.N, x);
      record_bounds(v, rm.ac_density[j], lo, hi, x, i);
    }
  }
  v.finalize(opts.tol);
  return v;
}

Verdict comparison_check_variable(const DAlembertMeasure& m, const Disintegration& d, double v,
                                  double w, const ComparisonOptions& opts) {
  if (!(v < w)) throw InputError("variable comparison needs v < w");
  if (m.rays.size() != d.rays.size()) throw InputError("measure does not match disintegration");
  Verdict out;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const RayDensity& h = d.rays[i].density;
    const double tol = 1e-9 * std::max(1.0, std::abs(h.b - h.a));
    if (v < h.a - tol || w > h.b + tol) {
      throw InputError("[v, w] must lie inside ray " + std::to_string(i));
    }
    const auto& kappa = d.kappa_of(i);
    if (w > kappa.domain_end()) throw DomainError("potential does not reach w");
    const auto shell = endpoint_shell(v, w, false, false);
    const RayMeasure& rm = m.rays[i];
    for (std::size_t j = 0; j < rm.param.size(); ++j) {
      const double x = rm.param[j];
      if (x <= v || x >= w || x < opts.min_param || x > opts.max_param) continue;
      const auto [lo, hi] = log_derivative_bounds(shell, kappa, d.N, x);
      record_bounds(out, rm.ac_density[j], lo, hi, x, i);
    }
  }
  out.finalize(opts.tol);
  return out;
}

std::vector<RayField> power_dalembert(const Disintegration& d, double q) {
  if (!(q < 1.0) || q == 0.0 || !std::isfinite(q)) {
    throw InputError("power exponent must be nonzero and below 1");
  }
  d.validate();
  std::vector<RayField> out;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const double off = require_offset(ray, i);
    require_positive_interior(ray, i);
    const auto ac = ray_log_derivative(ray);
    RayField f;
    for (std::size_t j = 0; j < ac.size(); ++j) {
      const double x = ray.density.x(j + 1);
      const double l = x - off;
      if (l == 0.0) continue;
      f.param.push_back(x);
      f.value.push_back(sgn(l) * (1.0 + l * ac[j]));
    }
    out.push_back(std::move(f));
  }
  return out;
}

UnsignedReport unsigned_dalembert(const Disintegration& d, double tol) {
  const auto m = dalembert_measure(d);
  UnsignedReport rep;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const RayDensity& h = ray.density;
    const double off = require_offset(ray, i);
    const RayMeasure& rm = m.rays[i];
    const auto shell = endpoint_shell(h.a, h.b, h.open_left, h.open_right);
    RayField f;
    for (std::size_t j = 0; j < rm.param.size(); ++j) {
      const double x = rm.param[j];
      const double l = x - off;
      if (l == 0.0) continue;
      const double value = sgn(l) * rm.ac_density[j];
      f.param.push_back(x);
      f.value.push_back(value);
      const auto [lo, hi] = log_derivative_bounds(shell, d.kappa_of(i), d.N, x);
      const double bound = l > 0.0 ? lo : -hi;
      if (std::isfinite(bound)) {
        rep.lower_bound.record((bound - value) / std::max(1.0, std::abs(bound)),
                               {double(i), x});
      }
    }
    rep.density.push_back(std::move(f));
    auto flip = [](std::optional<double> atom, double l) -> std::optional<double> {
      if (!atom) return std::nullopt;
      return l < 0.0 ? -*atom : *atom;
    };
    rep.atom_initial.push_back(flip(rm.atom_initial, h.a - off));
    rep.atom_final.push_back(flip(rm.atom_final, h.b - off));
  }
  rep.lower_bound.finalize(tol);
  return rep;
}

MeanCurvatureReport mean_curvature(const Disintegration& d) {
  d.validate();
  MeanCurvatureReport rep;
  std::vector<double> num, den;
  bool first = true;
  for (const Ray& ray : d.rays) {
    const RayDensity& h = ray.density;
    std::optional<double> hp, hm, H;
    bool singular = true;
    if (ray.slice_offset) {
      const double off = *ray.slice_offset;
      const double tol = 1e-9 * h.step;
      const bool at_left = std::abs(off - h.a) <= tol;
      const bool at_right = std::abs(off - h.b) <= tol;
      const auto idx = h.index_of(off);
      if (ray.value_at(off) > 0.0) {
        if (ray.profile) {
          const double g = ray.profile->log_derivative(off);
          if (!at_right) hp = g;
          if (!at_left) hm = -g;
        } else if (idx) {
          const auto os = one_sided_log_derivative(h, *idx);
          if (os.right) hp = *os.right;
          if (os.left) hm = -*os.left;
        }
      }
      if (hp && hm) H = std::max(*hp, -*hm);
      else if (hp) H = hp;
      else if (hm) H = -*hm;
      singular = !H.has_value();
    }
    rep.H_plus.push_back(hp);
    rep.H_minus.push_back(hm);
    rep.H.push_back(H);
    rep.singular.push_back(singular);
    if (H) {
      const double a = ray.weight * ray.value_at(*ray.slice_offset);
      num.push_back(a * *H);
      den.push_back(a);
      rep.min_H = first ? *H : std::min(rep.min_H, *H);
      rep.max_H = first ? *H : std::max(rep.max_H, *H);
      first = false;
      ++rep.finite_rays;
    }
  }
  rep.area = ordered_sum(den);
  if (rep.area > 0.0) rep.mean_H = ordered_sum(num) / rep.area;
  return rep;
}

BarrierReport barrier_check(const Disintegration& d, double H0, double tol) {
  require_sec(d);
  d.validate();
  BarrierReport rep;
  const double n1 = d.N - 1.0;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const double off = require_offset(ray, i);
    require_positive_interior(ray, i);
    const auto ac = ray_log_derivative(ray);
    for (std::size_t j = 0; j < ac.size(); ++j) {
      const double x = ray.density.x(j + 1);
      const double l = x - off;
      if (l == 0.0) continue;
      const double den = n1 + H0 * l;
      if (!(den > 0.0)) {
        throw RangeError("barrier denominator N-1+H0*l is not positive on ray " +
                             std::to_string(i),
                         l);
      }
      const double bound = n1 * H0 / den;
      const double slack = l > 0.0 ? bound - ac[j] : ac[j] - bound;
      rep.margin = std::min(rep.margin, slack);
      rep.verdict.record(-slack / std::max(1.0, std::abs(bound)), {double(i), l});
    }
  }
  rep.verdict.finalize(tol);
  return rep;
}

double normal_variation_quotient(const WarpedProductModel& model, double phi0, double t) {
  model.validate();
  if (!(t > 0.0)) throw InputError("variation parameter must be positive");
  if (!(phi0 >= 0.0) || !std::isfinite(phi0)) {
    throw InputError("variation weight must be nonnegative");
  }
  const double s = t * phi0;
  if (s > model.t_max - model.slice_time) {
    throw InputError("normal variation leaves the model interval");
  }
  if (s == 0.0) return 0.0;
  const auto prof = model.profile();
  const double h0 = prof.value(0.0);
  const double excess =
      model.fiber_area * integrate([&](double r) { return prof.value(r) - h0; }, 0.0, s, 1e-13);
  return 2.0 / (t * t) * excess;
}

std::vector<std::size_t> extracted_final_points(const LatticeExtraction& extraction) {
  std::set<std::size_t> out;
  for (const auto& r : extraction.rays) {
    if (r.final_present) out.insert(r.chain.back());
  }
  return {out.begin(), out.end()};
}

MinkowskiReport minkowski_content_bound_check(const CausalLattice& lattice,
                                              const LatticeExtraction& extraction,
                                              const std::vector<std::size_t>& A, double eps,
                                              double tol) {
  if (A.empty()) throw InputError("cut-point set is empty");
  if (!(eps > 0.0)) throw InputError("collar width must be positive");
  if (extraction.rays.size() != extraction.disintegration.rays.size()) {
    throw InputError("extraction rays do not match its disintegration");
  }
  const auto b = lattice_distance_to_set(lattice, A);
  const double snap = 1e-9 * lattice.step();
  std::vector<double> collar;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (b[i] > snap && b[i] < eps - snap) collar.push_back(lattice.measure_weight(i));
  }
  const std::set<std::size_t> in_a(A.begin(), A.end());
  std::vector<double> atoms;
  MinkowskiReport rep;
  for (std::size_t k = 0; k < extraction.rays.size(); ++k) {
    const auto& r = extraction.rays[k];
    if (!r.final_present || !in_a.count(r.chain.back())) continue;
    const Ray& ray = extraction.disintegration.rays[k];
    atoms.push_back(ray.weight * ray.density.values.back());
    ++rep.rays_in_set;
  }
  rep.collar = ordered_sum(collar) / eps;
  rep.atom_total = ordered_sum(atoms);
  rep.verdict.record(rep.collar - (1.0 + tol) * rep.atom_total, {rep.collar, rep.atom_total});
  rep.verdict.finalize(0.0);
  return rep;
}

InverseLengthReport inverse_length_integral(const Disintegration& d) {
  InverseLengthReport rep;
  std::vector<double> terms;
  for (const Ray& r : d.rays) {
    if (r.has_initial_point() && r.has_final_point()) {
      terms.push_back(r.weight / (r.density.b - r.density.a));
      ++rep.bounded_rays;
    } else {
      ++rep.censored_rays;
    }
  }
  rep.integral = ordered_sum(terms);
  return rep;
}

}  // namespace lcg
