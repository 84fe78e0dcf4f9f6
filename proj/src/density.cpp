#include "lcg/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcg/errors.hpp"
#include "lcg/numerics.hpp"

namespace lcg {

void RayDensity::validate() const {
  if (values.size() < 2) throw InputError("density needs at least two samples");
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("density step must be positive");
  if (!(a < b)) throw InputError("density interval must satisfy a < b");
  const double end = a + static_cast<double>(values.size() - 1) * step;
  if (std::abs(end - b) > 1e-9 * std::max(1.0, std::abs(b))) {
    throw InputError("density grid does not end at b");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("density samples must be finite and >= 0");
  }
}

double RayDensity::at(double xq) const {
  const double f = (xq - a) / step;
  const double r = std::round(f);
  if (std::abs(f - r) < 1e-9 && r >= 0.0 && r <= static_cast<double>(values.size() - 1)) {
    return values[static_cast<std::size_t>(r)];
  }
  if (f < 0.0 || f > static_cast<double>(values.size() - 1)) {
    throw DomainError("density evaluated outside its interval");
  }
  const auto i = static_cast<std::size_t>(std::floor(f));
  const double w = f - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

std::optional<std::size_t> RayDensity::index_of(double xq) const {
  const double f = (xq - a) / step;
  const double r = std::round(f);
  if (std::abs(f - r) > 1e-6 || r < 0.0 || r > static_cast<double>(values.size() - 1)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(r);
}

std::vector<double> RayDensity::log_values() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::log(values[i]);
  return out;
}

RayDensity RayDensity::sample(const std::function<double(double)>& f, double a, double b,
                              std::size_t intervals, bool open_left, bool open_right) {
  if (intervals < 1) throw InputError("need at least one interval");
  RayDensity h;
  h.a = a;
  h.b = b;
  h.open_left = open_left;
  h.open_right = open_right;
  h.step = (b - a) / static_cast<double>(intervals);
  h.values.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double x = i == intervals ? b : a + static_cast<double>(i) * h.step;
    h.values[i] = f(x);
  }
  return h;
}

std::vector<double> TripleSampler::uniform_t(std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) {
    t[i] = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return t;
}

namespace {

std::vector<std::size_t> decimated(std::size_t n, std::size_t g) {
  std::vector<std::size_t> idx;
  if (g >= n || g < 2) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < g; ++k) {
    idx.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(g - 1))));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

// Value at fractional grid position; exact when the position is a node.
double value_at_index(const RayDensity& h, double f) {
  const double r = std::round(f);
  if (std::abs(f - r) < 1e-9) return h.values[static_cast<std::size_t>(r)];
  const auto i = static_cast<std::size_t>(std::floor(f));
  const double w = f - static_cast<double>(i);
  return (1.0 - w) * h.values[i] + w * h.values[i + 1];
}

void require_cover(const RayDensity& h, const CurvaturePotential& kappa, double N) {
  h.validate();
  if (!(N > 1.0)) throw InputError("dimension bound N must exceed 1");
  if (h.b > kappa.domain_end()) throw InputError("potential does not cover the density interval");
}

// Distortion for the Jacobi field vanishing at `from` and equal to 1 at `to`,
// evaluated at fraction s of the way from `from`.
std::optional<double> oriented_distortion(const CurvaturePotential& kappa, double N, double from,
                                          double to, double s) {
  const auto dir = from < to ? SlideDirection::forward : SlideDirection::backward;
  const auto k = slide_potential(kappa, from, to, dir).scaled(1.0 / (N - 1.0));
  return distortion(k, s, std::abs(to - from));
}

Verdict triple_check(const RayDensity& h, const CurvaturePotential& kappa, double N,
                     const TripleSampler& sampler, bool two_sided) {
  require_cover(h, kappa, N);
  const double e = 1.0 / (N - 1.0);
  const auto idx = decimated(h.size(), sampler.grid_points);
  Verdict v;
  for (std::size_t i0 : idx) {
    for (std::size_t i1 : idx) {
      if (i0 == i1) continue;
      const double x0 = h.x(i0);
      const double x1 = h.x(i1);
      const double r0 = std::pow(h.values[i0], e);
      const double r1 = std::pow(h.values[i1], e);
      for (double t : sampler.t_values) {
        const double f = (1.0 - t) * static_cast<double>(i0) + t * static_cast<double>(i1);
        const double lhs = std::pow(value_at_index(h, f), e);
        double rhs = 0.0;
        // Coefficient of h(x0): field vanishing at x1.
        if (r0 > 0.0) {
          const auto s0 = oriented_distortion(kappa, N, x1, x0, 1.0 - t);
          rhs += s0 ? *s0 * r0 : kInf;
        }
        if (two_sided && r1 > 0.0) {
          const auto s1 = oriented_distortion(kappa, N, x0, x1, t);
          rhs += s1 ? *s1 * r1 : kInf;
        }
        v.record(rhs - lhs, {x0, x1, t});
      }
    }
  }
  v.finalize(sampler.tol);
  return v;
}

double unbounded_slope(double K, double N) {
  if (K < 0.0) return std::sqrt(-K * (N - 1.0));
  if (K == 0.0) return 0.0;
  return kInf;
}

// (N-1) cos/sin of the potential slid from `from` toward `to`.
double cotangent_bound(const CurvaturePotential& kappa, double N, double from, double to) {
  const double len = std::abs(to - from);
  if (len == 0.0) return kInf;
  const auto dir = from < to ? SlideDirection::forward : SlideDirection::backward;
  const auto k = slide_potential(kappa, from, to, dir).scaled(1.0 / (N - 1.0));
  const auto st = propagate_jacobi(k, len);
  if (!(st.u > 0.0)) return -kInf;
  return (N - 1.0) * st.du / st.u;
}

double log_sin_ratio(const CurvaturePotential& kappa, double N, double from, double to,
                     double num, double den) {
  const auto dir = from < to ? SlideDirection::forward : SlideDirection::backward;
  const auto k = slide_potential(kappa, from, to, dir).scaled(1.0 / (N - 1.0));
  const double sn = propagate_jacobi(k, num).u;
  const double sd = propagate_jacobi(k, den).u;
  if (!(sn > 0.0 && sd > 0.0)) return std::nan("");
  return (N - 1.0) * (std::log(sn) - std::log(sd));
}

void require_positive_interior(const RayDensity& h) {
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    if (!(h.values[i] > 0.0)) {
      throw InputError("density must be positive at interior sample " + std::to_string(i));
    }
  }
}

}  // namespace

Verdict is_mcp_density(const RayDensity& h, const CurvaturePotential& kappa, double N,
                       const TripleSampler& sampler) {
  return triple_check(h, kappa, N, sampler, false);
}

Verdict is_cd_density(const RayDensity& h, const CurvaturePotential& kappa, double N,
                      const TripleSampler& sampler) {
  return triple_check(h, kappa, N, sampler, true);
}

std::pair<double, double> log_derivative_bounds(const RayDensity& h,
                                                const CurvaturePotential& kappa, double N,
                                                double x) {
  const double K = kappa.infimum(h.a, h.b);
  double upper = 0.0;
  double lower = 0.0;
  if (h.open_left) {
    upper = unbounded_slope(K, N);
  } else {
    upper = cotangent_bound(kappa, N, h.a, x);
    if (upper == -kInf) upper = kInf;
  }
  if (h.open_right) {
    lower = -unbounded_slope(K, N);
  } else {
    lower = -cotangent_bound(kappa, N, h.b, x);
    if (lower == kInf) lower = -kInf;
  }
  return {lower, upper};
}

Verdict log_derivative_bounds_check(const RayDensity& h, const CurvaturePotential& kappa,
                                    double N, double tol) {
  require_cover(h, kappa, N);
  require_positive_interior(h);
  const auto L = h.log_values();
  const double s = h.step;
  const std::size_t n = h.size();
  const double K = kappa.infimum(h.a, h.b);
  Verdict v;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!(h.values[i - 2] > 0.0 && h.values[i + 2] > 0.0)) continue;
    const double d1 = (L[i + 1] - L[i - 1]) / (2.0 * s);
    const double d2 = (L[i + 2] - L[i - 2]) / (4.0 * s);
    const double slack = std::max(tol, 10.0 * std::abs(d2 - d1) / 3.0);
    const auto [lo, hi] = log_derivative_bounds(h, kappa, N, h.x(i));
    v.record(std::max(lo - d1, d1 - hi) - slack + tol, {h.x(i)});
  }
  const auto idx = decimated(n, 33);
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (std::size_t q = p + 1; q < idx.size(); ++q) {
      const std::size_t i = idx[p];
      const std::size_t j = idx[q];
      if (i == 0 || j + 1 == n) continue;
      const double x = h.x(i);
      const double y = h.x(j);
      const double lr = L[j] - L[i];
      double lower_log = -kInf;
      double upper_log = kInf;
      const double w = K < 0.0 ? std::sqrt(-K / (N - 1.0)) : 0.0;
      if (h.open_right) {
        if (K <= 0.0) lower_log = -w * (N - 1.0) * (y - x);
      } else {
        lower_log = log_sin_ratio(kappa, N, h.b, x, h.b - y, h.b - x);
      }
      if (h.open_left) {
        if (K <= 0.0) upper_log = w * (N - 1.0) * (y - x);
      } else {
        upper_log = log_sin_ratio(kappa, N, h.a, y, y - h.a, x - h.a);
      }
      if (!std::isnan(lower_log)) v.record(lower_log - lr, {x, y});
      if (!std::isnan(upper_log)) v.record(lr - upper_log, {x, y});
    }
  }
  v.finalize(tol);
  return v;
}

SupBoundReport a_priori_sup_bound_check(const RayDensity& h, double K, double N) {
  if (!(K < 0.0)) throw InputError("zeroth order bound requires a negative constant K");
  if (!(N > 1.0)) throw InputError("dimension bound N must exceed 1");
  h.validate();
  const double len = h.b - h.a;
  const auto k = CurvaturePotential::constant(K / (N - 1.0));
  const double I = integrate(
      [&](double r) { return std::pow(*distortion(k, r, len), N - 1.0); }, 0.0, 1.0, 1e-12);
  SupBoundReport rep;
  rep.sup_h = *std::max_element(h.values.begin(), h.values.end());
  rep.bound = trapezoid(h.values, h.step) / (len * I);
  rep.verdict.record(rep.sup_h - rep.bound, {});
  rep.verdict.finalize(1e-9 * std::max(1.0, rep.bound));
  return rep;
}

double first_order_integral_estimate(const RayDensity& h) {
  h.validate();
  const double mass = trapezoid(h.values, h.step);
  if (!(mass > 0.0)) throw InputError("first order estimate needs positive mass");
  double variation = 0.0;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    variation += std::abs(h.values[i + 1] - h.values[i]);
  }
  return (h.b - h.a) * variation / mass;
}

ResidualField cd_differential_residual(const RayDensity& h, const CurvaturePotential& kappa,
                                       double N, double tol) {
  require_cover(h, kappa, N);
  require_positive_interior(h);
  const auto L = h.log_values();
  const double s = h.step;
  ResidualField out;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    if (!(h.values[i - 1] > 0.0 && h.values[i + 1] > 0.0)) continue;
    const double d1 = (L[i + 1] - L[i - 1]) / (2.0 * s);
    const double d2 = (L[i + 1] - 2.0 * L[i] + L[i - 1]) / (s * s);
    const double x = h.x(i);
    const double r = d2 + d1 * d1 / (N - 1.0) + kappa(x);
    out.x.push_back(x);
    out.residual.push_back(r);
    out.verdict.record(r, {x});
  }
  if (out.x.empty()) throw InputError("density too short for second differences");
  out.verdict.finalize(tol);
  return out;
}

Verdict bochner_ray_check(const RayDensity& h, const CurvaturePotential& kappa, double N,
                          double x, double y, double tol) {
  require_cover(h, kappa, N);
  const auto ix = h.index_of(x);
  const auto iy = h.index_of(y);
  if (!ix || !iy || *ix == 0 || *iy + 1 >= h.size() || *ix >= *iy) {
    throw InputError("Bochner check needs interior grid points x < y");
  }
  for (std::size_t i = *ix - 1; i <= *iy + 1; ++i) {
    if (!(h.values[i] > 0.0)) throw InputError("density must be positive between x and y");
  }
  const auto L = h.log_values();
  const double s = h.step;
  std::vector<double> sq;
  for (std::size_t i = *ix; i <= *iy; ++i) {
    const double d = (L[i + 1] - L[i - 1]) / (2.0 * s);
    sq.push_back(d * d);
  }
  const double dx = (L[*ix + 1] - L[*ix - 1]) / (2.0 * s);
  const double dy = (L[*iy + 1] - L[*iy - 1]) / (2.0 * s);
  const double rhs = kappa.integral(h.x(*ix), h.x(*iy)) + trapezoid(sq, s) / (N - 1.0);
  Verdict v;
  v.record(dy - dx + rhs, {h.x(*ix), h.x(*iy)});
  v.finalize(tol);
  return v;
}

OneSidedLogDerivative one_sided_log_derivative(const RayDensity& h, std::size_t i) {
  OneSidedLogDerivative out;
  const std::size_t n = h.size();
  auto pos = [&](std::size_t j) { return j < n && h.values[j] > 0.0; };
  auto lg = [&](std::size_t j) { return std::log(h.values[j]); };
  const double s = h.step;
  if (pos(i) && pos(i + 1) && pos(i + 2)) {
    const double d = (-3.0 * lg(i) + 4.0 * lg(i + 1) - lg(i + 2)) / (2.0 * s);
    out.right = d;
    if (pos(i + 3) && pos(i + 4)) {
      const double d2 = (-3.0 * lg(i) + 4.0 * lg(i + 2) - lg(i + 4)) / (4.0 * s);
      out.right_error = std::abs(d - d2) / 3.0;
    }
  } else if (pos(i) && pos(i + 1) && i + 2 >= n) {
    out.right = (lg(i + 1) - lg(i)) / s;
  }
  if (i >= 2 && pos(i) && pos(i - 1) && pos(i - 2)) {
    const double d = (3.0 * lg(i) - 4.0 * lg(i - 1) + lg(i - 2)) / (2.0 * s);
    out.left = d;
    if (i >= 4 && pos(i - 3) && pos(i - 4)) {
      const double d2 = (3.0 * lg(i) - 4.0 * lg(i - 2) + lg(i - 4)) / (4.0 * s);
      out.left_error = std::abs(d - d2) / 3.0;
    }
  } else if (i == 1 && pos(i) && pos(0)) {
    out.left = (lg(1) - lg(0)) / s;
  }
  return out;
}

ComparisonIIReport comparison_II_check(const RayDensity& h, const CurvaturePotential& kappa,
                                       double N, double tol) {
  require_cover(h, kappa, N);
  if (!(h.a <= 0.0 && h.b > 0.0)) throw InputError("comparison needs a <= 0 < b");
  const auto i0 = h.index_of(0.0);
  if (!i0) throw InputError("0 must be a grid point of the density");
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    if (!(h.values[i] > 0.0)) throw InputError("density must be positive on [a, b)");
  }
  const auto d = one_sided_log_derivative(h, *i0);
  if (!d.right) throw InputError("right log-derivative at 0 is not estimable");
  ComparisonIIReport rep;
  rep.H_plus = *d.right;
  rep.H_plus_error = d.right_error;
  const double H = rep.H_plus + 10.0 * rep.H_plus_error;
  const double h0 = h.values[*i0];
  for (std::size_t i = *i0 + 1; i + 1 < h.size(); ++i) {
    const double x = h.x(i);
    rep.verdict.record(h.values[i] - h0 * jacobian(kappa, N, H, x), {x});
    rep.max_abs_gap =
        std::max(rep.max_abs_gap, std::abs(h.values[i] - h0 * jacobian(kappa, N, rep.H_plus, x)));
  }
  rep.ball_root = exact_first_zero(kappa.scaled(1.0 / (N - 1.0)), H / (N - 1.0), 1.0,
                                   std::min(kappa.domain_end(), 2.0 * h.b + 1.0));
  if (rep.ball_root) rep.verdict.record(h.b - *rep.ball_root, {h.b});
  rep.verdict.finalize(tol * std::max(1.0, h0));
  return rep;
}

}  // namespace lcg
