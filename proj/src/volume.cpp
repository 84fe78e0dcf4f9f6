#include "lcg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lcg/dalembert.hpp"
#include "lcg/errors.hpp"
#include "lcg/kernels.hpp"
#include "lcg/numerics.hpp"

namespace lcg {

namespace {

constexpr double kQuadTol = 1e-12;

void require_dimension(double N) {
  if (!(N > 1.0) || !std::isfinite(N)) throw InputError("dimension bound N must exceed 1");
}

void require_area(double area) {
  if (!(area >= 0.0) || !std::isfinite(area)) {
    throw InputError("surface measure must be finite and nonnegative");
  }
}

// Coefficient of e^{ar} in the hyperbolic Jacobian base, snapped to 0 at the
// borderline lambda = -a.
double growth_coefficient(double a, double lambda) {
  const double c = 0.5 * (1.0 + lambda / a);
  return std::abs(c) <= 1e-12 ? 0.0 : c;
}

// Forward-oriented potential from the slice, reaching `reach` along the ray.
CurvaturePotential oriented_potential(const CurvaturePotential& k, double offset, double reach,
                                      bool forward) {
  if (const auto c = k.constant_value()) return CurvaturePotential::constant(*c);
  if (!std::isfinite(reach)) {
    throw DomainError("variable potential needs a finite integration range");
  }
  return forward ? slide_potential(k, offset, offset + reach, SlideDirection::forward)
                 : slide_potential(k, offset - reach, offset, SlideDirection::backward);
}

double jacobian_at(const CurvaturePotential& k, double N, double H, double r) {
  if (const auto c = k.constant_value()) return constant_jacobian(*c, N, H, r);
  return jacobian(k, N, H, r);
}

// int_lo^hi J_{k,N,H}; +inf when the integral diverges.
double jacobian_integral(const CurvaturePotential& k, double N, double H, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  double cap = hi;
  if (const auto c = k.constant_value()) {
    if (const auto z = constant_jacobian_zero(*c, N, H)) cap = std::min(cap, *z);
    if (std::isinf(cap)) {
      const double K = *c;
      const double lambda = H / (N - 1.0);
      const bool decays = K < 0.0 && growth_coefficient(std::sqrt(-K / (N - 1.0)), lambda) == 0.0;
      if (!decays) return kInf;
    }
    if (!(lo < cap)) return 0.0;
    return integrate([&](double r) { return constant_jacobian(*c, N, H, r); }, lo, cap,
                     kQuadTol);
  }
  if (!std::isfinite(cap)) throw DomainError("variable potential needs a finite range");
  const auto scaled = k.scaled(1.0 / (N - 1.0));
  if (const auto z = exact_first_zero(scaled, H / (N - 1.0), 1.0, cap)) cap = std::min(cap, *z);
  if (!(lo < cap)) return 0.0;
  std::vector<double> cuts;
  for (double b : k.breakpoints()) {
    if (b > lo && b < cap) cuts.push_back(b);
  }
  return integrate_split([&](double r) { return jacobian(k, N, H, r); }, lo, cap, cuts,
                         kQuadTol);
}

struct RayReach {
  double future;  // extent past the slice, inf at a censored end
  double past;
};

RayReach reach_of(const Ray& ray, double offset) {
  const RayDensity& h = ray.density;
  return {h.open_right ? kInf : h.b - offset, h.open_left ? kInf : offset - h.a};
}

std::string ray_tag(std::size_t i) { return "ray " + std::to_string(i); }

double integral_of_samples(const RayDensity& h, double lo, double hi) {
  lo = std::max(lo, h.a);
  hi = std::min(hi, h.b);
  if (!(lo < hi)) return 0.0;
  const auto at = [&](double x) { return h.at(std::clamp(x, h.a, h.b)); };
  const std::size_t n = h.size();
  std::vector<double> terms;
  double prev_x = lo, prev_v = at(lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = h.x(i);
    if (x <= lo) continue;
    if (x >= hi) break;
    terms.push_back(0.5 * (x - prev_x) * (prev_v + h.values[i]));
    prev_x = x;
    prev_v = h.values[i];
  }
  terms.push_back(0.5 * (hi - prev_x) * (prev_v + at(hi)));
  return ordered_sum(terms);
}

double log_sinh(double x) { return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2; }

double unit_sine_integral(double k, double N) {
  const double rk = std::sqrt(k);
  return integrate([&](double r) { return std::pow(std::sin(rk * r) / rk, N - 1.0); }, 0.0,
                   std::numbers::pi / rk, kQuadTol);
}

}  // namespace

double constant_jacobian(double K, double N, double H, double theta) {
  require_dimension(N);
  if (theta < 0.0) {
    theta = -theta;
    H = -H;
  }
  if (const auto z = constant_jacobian_zero(K, N, H); z && theta >= *z) return 0.0;
  const double k = K / (N - 1.0);
  const double lambda = H / (N - 1.0);
  double p;
  if (k > 0.0) {
    const double rk = std::sqrt(k);
    p = std::cos(rk * theta) + lambda * std::sin(rk * theta) / rk;
  } else if (k == 0.0) {
    p = 1.0 + lambda * theta;
  } else {
    const double a = std::sqrt(-k);
    const double g = growth_coefficient(a, lambda);
    p = g * std::exp(a * theta) + (1.0 - g) * std::exp(-a * theta);
  }
  return p > 0.0 ? std::pow(p, N - 1.0) : 0.0;
}

std::optional<double> constant_jacobian_zero(double K, double N, double H) {
  require_dimension(N);
  const double k = K / (N - 1.0);
  const double lambda = H / (N - 1.0);
  if (k > 0.0) {
    const double rk = std::sqrt(k);
    return (0.5 * std::numbers::pi + std::atan(lambda / rk)) / rk;
  }
  if (k == 0.0) {
    if (lambda < 0.0) return -1.0 / lambda;
    return std::nullopt;
  }
  const double a = std::sqrt(-k);
  if (growth_coefficient(a, lambda) < 0.0) return std::atanh(-a / lambda) / a;
  return std::nullopt;
}

VolumeBoundReport hk_bound(const Disintegration& d, double s, double t) {
  if (!(s < t)) throw InputError("volume range needs s < t");
  d.validate();
  const auto mc = mean_curvature(d);
  VolumeBoundReport rep;
  std::vector<double> terms, areas;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    if (!ray.slice_offset || mc.singular[i]) {
      rep.excluded_rays.push_back(i);
      rep.warnings.push_back(ray_tag(i) + ": no finite curvature at the slice");
      continue;
    }
    const double o = *ray.slice_offset;
    const auto reach = reach_of(ray, o);
    const double f_lo = std::max(s, 0.0), f_hi = std::min(t, reach.future);
    const double p_lo = std::max(-t, 0.0), p_hi = std::min(-s, reach.past);
    const bool need_future = f_lo < f_hi;
    const bool need_past = p_lo < p_hi;
    if ((need_future && !mc.H_plus[i]) || (need_past && !mc.H_minus[i])) {
      rep.excluded_rays.push_back(i);
      rep.warnings.push_back(ray_tag(i) + ": one-sided curvature missing");
      continue;
    }
    const auto& k = d.kappa_of(i);
    double sum = 0.0;
    if (need_future) {
      sum += jacobian_integral(oriented_potential(k, o, f_hi, true), d.N, *mc.H_plus[i], f_lo,
                               f_hi);
    }
    if (need_past) {
      sum += jacobian_integral(oriented_potential(k, o, p_hi, false), d.N, *mc.H_minus[i], p_lo,
                               p_hi);
    }
    const double a0 = ray.weight * ray.value_at(o);
    terms.push_back(a0 * sum);
    areas.push_back(a0);
    ++rep.used_rays;
  }
  rep.bound = ordered_sum(terms);
  rep.area = ordered_sum(areas);
  return rep;
}

AreaBoundReport area_bound(const Disintegration& d, double t) {
  d.validate();
  const auto mc = mean_curvature(d);
  AreaBoundReport rep;
  std::vector<double> bounds, levels;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const bool future = t >= 0.0;
    const auto& H = future ? mc.H_plus[i] : mc.H_minus[i];
    if (!ray.slice_offset || mc.singular[i] || (t != 0.0 && !H)) {
      rep.excluded_rays.push_back(i);
      rep.warnings.push_back(ray_tag(i) + ": no finite curvature at the slice");
      continue;
    }
    const double o = *ray.slice_offset;
    const RayDensity& h = ray.density;
    const double x = o + t;
    const double w0 = ray.weight * ray.value_at(o);
    double level = 0.0;
    if (x >= h.a && x <= h.b) {
      level = ray.value_at(x);
    } else if ((x > h.b && h.open_right) || (x < h.a && h.open_left)) {
      if (ray.profile) {
        level = ray.profile->value(x);
      } else {
        rep.warnings.push_back(ray_tag(i) + ": level lies past a censored end");
      }
    }
    levels.push_back(ray.weight * level);
    const auto reach = reach_of(ray, o);
    const double r = std::abs(t);
    if (r == 0.0) {
      bounds.push_back(w0);
    } else if (r <= (future ? reach.future : reach.past)) {
      const auto k = oriented_potential(d.kappa_of(i), o, r, future);
      bounds.push_back(w0 * jacobian_at(k, d.N, *H, r));
    }
  }
  rep.bound = ordered_sum(bounds);
  rep.level_area = ordered_sum(levels);
  rep.margin = rep.bound - rep.level_area;
  return rep;
}

VolumeBoundReport unifpos_volume_bound(const Disintegration& d, double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw InputError("uniform curvature bound must be positive");
  d.validate();
  const double k = K / (d.N - 1.0);
  const auto mc = mean_curvature(d);
  VolumeBoundReport rep;
  std::vector<double> terms, areas;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const auto& kap = d.kappa_of(i);
    const double hi = std::min(ray.density.b, kap.domain_end());
    if (kap.infimum(ray.density.a, hi) < K - 1e-12) {
      throw InputError(ray_tag(i) + ": curvature potential drops below K");
    }
    if (!mc.H[i]) {
      rep.excluded_rays.push_back(i);
      rep.warnings.push_back(ray_tag(i) + ": no finite curvature at the slice");
      continue;
    }
    const double lam = *mc.H[i] / (d.N - 1.0);
    const double a0 = ray.weight * ray.value_at(*ray.slice_offset);
    terms.push_back(a0 * std::pow(k + lam * lam, 0.5 * (d.N - 1.0)));
    areas.push_back(a0);
    ++rep.used_rays;
  }
  rep.bound = unit_sine_integral(k, d.N) * ordered_sum(terms);
  rep.area = ordered_sum(areas);
  return rep;
}

double disintegrated_volume(const Disintegration& d, double s, double t) {
  if (!(s < t)) throw InputError("volume range needs s < t");
  std::vector<double> terms;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    if (!ray.slice_offset) throw InputError(ray_tag(i) + " has no slice offset");
    const double o = *ray.slice_offset;
    const RayDensity& h = ray.density;
    double v;
    if (ray.profile) {
      const double lo = h.open_left ? o + s : std::max(o + s, h.a);
      const double hi = h.open_right ? o + t : std::min(o + t, h.b);
      v = lo < hi ? integrate([&](double x) { return ray.profile->value(x); }, lo, hi, kQuadTol)
                  : 0.0;
    } else {
      v = integral_of_samples(h, o + s, o + t);
    }
    terms.push_back(ray.weight * v);
  }
  return ordered_sum(terms);
}

SingularityVerdict const_singularity(double K, double N, double H0, double area) {
  require_dimension(N);
  require_area(area);
  if (!std::isfinite(K) || !std::isfinite(H0)) throw InputError("K and H0 must be finite");
  SingularityVerdict v;
  const double n1 = N - 1.0;
  if (K > 0.0) {
    const double k = K / n1;
    const double lam = H0 / n1;
    v.applicable = true;
    v.case_tag = "const-a";
    v.theta0 = std::numbers::pi / std::sqrt(k);
    v.volume_bound = area * unit_sine_integral(k, N) * std::pow(k + lam * lam, 0.5 * n1);
    return v;
  }
  if (K == 0.0) {
    if (H0 < 0.0) {
      v.applicable = true;
      v.case_tag = "const-b";
      v.theta0 = n1 / -H0;
      v.volume_bound = area * *v.theta0 / N;
    } else {
      v.case_tag = "none";
      v.notes.push_back("K = 0 needs H0 < 0");
    }
    return v;
  }
  const double edge = -std::sqrt(-K * n1);
  v.threshold = edge;
  v.statistic = H0;
  if (std::abs(H0 - edge) <= 1e-12 * std::max(1.0, std::abs(edge))) {
    v.applicable = true;
    v.case_tag = "const-c-borderline";
    v.volume_bound = area / -H0;
    v.notes.push_back("borderline: Jacobian is exp(H0 theta) and never vanishes");
  } else if (H0 < edge) {
    v.applicable = true;
    v.case_tag = "const-c";
    v.theta0 = std::sqrt(n1 / -K) * std::atanh(edge / H0);
    v.volume_bound =
        area * integrate([&](double r) { return constant_jacobian(K, N, H0, r); }, 0.0,
                         *v.theta0, kQuadTol);
  } else {
    v.case_tag = "none";
    v.notes.push_back("K < 0 needs H0 <= -sqrt(-K (N-1))");
  }
  return v;
}

SingularityVerdict var_singularity_I(double c, double eps, double H0, double N, double area) {
  require_dimension(N);
  require_area(area);
  if (!(c > 0.0) || !(eps > 0.0)) throw InputError("c and eps must be positive");
  SingularityVerdict v;
  const double n1 = N - 1.0;
  v.statistic = 2.0 * c / eps + H0 / n1;
  v.threshold = 0.0;
  v.case_tag = "var-I";
  if (!(*v.statistic < 0.0)) {
    v.notes.push_back("needs 2c/eps + H0/(N-1) < 0");
    return v;
  }
  v.applicable = true;
  v.theta0 = 1.0 / std::abs(*v.statistic);
  const double kk = -c / (eps * eps) / n1;
  const double c_uni =
      std::pow(1.0 + c / eps * eval_sin_kappa(CurvaturePotential::constant(kk), eps), n1);
  v.volume_bound = area * c_uni * *v.theta0;
  v.notes.push_back("theta0 taken as the reciprocal of |2c/eps + H0/(N-1)|");
  return v;
}

SingularityVerdict var_singularity_II(double K, double delta, double N, double H0,
                                      const std::function<double(double)>& kminus_tube_integral,
                                      double area, const std::vector<double>& t_grid) {
  require_dimension(N);
  require_area(area);
  if (!(K < 0.0)) throw InputError("theorem II needs a negative lower curvature bound K");
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  if (t_grid.empty()) throw InputError("t grid is empty");
  if (!(area > 0.0)) throw InputError("surface measure must be positive");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw InputError("t grid must be positive and increasing");
    }
  }
  const double n1 = N - 1.0;
  const double a = std::sqrt(-K * n1);
  std::vector<double> ratio;
  for (double t : t_grid) {
    const double tube = kminus_tube_integral(t);
    if (!(tube >= 0.0)) throw InputError("k_- tube integral must be nonnegative");
    const double log_c = n1 * (log_sinh(a * (t + delta)) - log_sinh(a * delta));
    ratio.push_back(tube / area * std::exp(-log_c));
  }
  SingularityVerdict v;
  v.case_tag = "var-II";
  v.statistic = *std::max_element(ratio.begin(), ratio.end());
  v.threshold = -H0 / n1;
  const std::size_t tail = ratio.size() / 2;
  bool decreasing = ratio.size() >= 2;
  for (std::size_t i = tail + 1; i < ratio.size(); ++i) decreasing &= ratio[i] <= ratio[i - 1];
  v.tail_decreasing = decreasing;
  v.notes.push_back("limsup replaced by the maximum over the t grid");
  if (!(*v.statistic < *v.threshold)) return v;
  v.applicable = true;
  v.theta0 = 2.0 / (*v.threshold - *v.statistic);
  v.volume_bound = area * *v.theta0 / N;
  v.notes.push_back("bound holds for a subfamily of positive measure, using its measure <= area");
  return v;
}

SingularityVerdict var_singularity_III(const Disintegration& d,
                                       const std::function<double(std::size_t, double)>& kminus,
                                       double H0, double area) {
  if (!(H0 < 0.0)) throw InputError("theorem III needs H0 < 0");
  if (!(area > 0.0) || !std::isfinite(area)) throw InputError("surface measure must be positive");
  d.validate();
  const double n1 = d.N - 1.0;
  SingularityVerdict v;
  v.case_tag = "var-III";
  v.threshold = -H0 / n1;
  std::vector<double> per_ray, weights, terms;
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    if (!ray.slice_offset) throw InputError(ray_tag(i) + " has no slice offset");
    const double o = *ray.slice_offset;
    const double hi = ray.density.open_right ? kInf : ray.density.b;
    const auto f = [&](double x) {
      const double k = kminus(i, x);
      if (!(k >= 0.0)) throw InputError("k_- must be nonnegative");
      return k;
    };
    double I = 0.0;
    if (o < ray.density.b) I = integrate(f, o, ray.density.b, 1e-10);
    if (std::isinf(hi)) {
      // Divergence test on a far dyadic block before integrating the tail.
      const double far = std::ldexp(std::max(1.0, ray.density.b - o), 20) + ray.density.b;
      const double block = integrate(f, far, 2.0 * far, 1e-8);
      I = block <= 1e-6 * std::max(1.0, I) ? I + integrate(f, ray.density.b, kInf, 1e-10) : kInf;
    }
    if (!std::isfinite(I)) {
      v.notes.push_back(ray_tag(i) + ": k_- is not integrable along the ray");
      return v;
    }
    const double w = ray.weight * ray.value_at(o);
    per_ray.push_back(I);
    weights.push_back(w);
    terms.push_back(w * I);
  }
  v.statistic = ordered_sum(terms) / area;
  if (!(*v.statistic < *v.threshold)) return v;
  v.applicable = true;
  v.theta0 = 2.0 / (*v.threshold - *v.statistic);
  const double cut = *v.threshold - 1.0 / *v.theta0;
  std::vector<double> selected;
  for (std::size_t i = 0; i < per_ray.size(); ++i) {
    if (per_ray[i] < cut) selected.push_back(weights[i]);
  }
  const double total = ordered_sum(weights);
  const double sel = ordered_sum(selected);
  v.selected_fraction = total > 0.0 ? sel / total : 0.0;
  v.volume_bound = sel * *v.theta0 / d.N;
  v.notes.push_back("subfamily: rays with int k_- below " + std::to_string(cut));
  return v;
}

namespace {

void require_grid(const std::vector<double>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0.0) || (i > 0 && !(g[i] > g[i - 1]))) {
      throw InputError("t grid must be nonnegative and increasing");
    }
  }
}

}  // namespace

std::vector<double> volume_plateau_probe(const WarpedProductModel& model,
                                         const std::vector<double>& t_grid) {
  model.validate();
  require_grid(t_grid);
  const double end = model.t_max - model.slice_time;
  std::vector<double> out;
  for (double t : t_grid) {
    const double u = std::min(t, end);
    out.push_back(u > 0.0 ? grw_tube_volume(model, 0.0, u) : 0.0);
  }
  return out;
}

std::vector<double> volume_plateau_probe(const CausalLattice& lattice,
                                         const LatticeDistance& distance,
                                         const std::vector<double>& t_grid) {
  require_grid(t_grid);
  std::vector<double> out;
  for (double t : t_grid) {
    out.push_back(t > 0.0 ? lattice_tube_volume(lattice, distance, 0.0, t) : 0.0);
  }
  return out;
}

}  // namespace lcg
