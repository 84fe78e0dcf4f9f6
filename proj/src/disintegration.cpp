#include "lcg/disintegration.hpp"

#include <algorithm>
#include <cmath>

#include "lcg/errors.hpp"
#include "lcg/numerics.hpp"

namespace lcg {

bool Ray::offset_interior() const {
  return slice_offset && *slice_offset > density.a && *slice_offset < density.b;
}

const CurvaturePotential& Disintegration::kappa_of(std::size_t i) const {
  return ray_kappa.empty() ? kappa : ray_kappa.at(i);
}

void Disintegration::validate() const {
  if (rays.empty()) throw InputError("disintegration has no rays");
  if (!(N > 1.0)) throw InputError("dimension bound N must exceed 1");
  if (!ray_kappa.empty() && ray_kappa.size() != rays.size()) {
    throw InputError("per-ray potentials must match the ray count");
  }
  std::vector<double> w;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const Ray& r = rays[i];
    if (!(r.weight >= 0.0) || !std::isfinite(r.weight)) {
      throw InputError("ray " + std::to_string(i) + " has a negative weight");
    }
    w.push_back(r.weight);
    r.density.validate();
    if (r.slice_offset) {
      const double s = *r.slice_offset;
      const double tol = 1e-9 * std::max(1.0, std::abs(s));
      if (s < r.density.a - tol || s > r.density.b + tol) {
        throw InputError("ray " + std::to_string(i) + " slice offset outside its interval");
      }
      if (r.offset_interior() && !(r.density.at(s) > 0.0)) {
        throw InputError("ray " + std::to_string(i) + " density vanishes at the slice");
      }
    }
  }
  if (std::abs(ordered_sum(w) - 1.0) > 1e-9) throw InputError("ray weights must sum to 1");
}

double Disintegration::slice_area() const {
  std::vector<double> terms;
  for (const Ray& r : rays) {
    if (r.slice_offset) terms.push_back(r.weight * r.value_at(*r.slice_offset));
  }
  return ordered_sum(terms);
}

namespace {

std::vector<double> uniform_weights(std::size_t count) {
  // Equal weights whose pairwise sum is 1 to rounding.
  return std::vector<double>(count, 1.0 / static_cast<double>(count));
}

}  // namespace

Disintegration analytic_disintegration(const WarpedProductModel& model, std::size_t ray_count,
                                       std::size_t intervals, double horizon) {
  if (ray_count < 1) throw InputError("ray_count must be at least 1");
  Disintegration d;
  d.N = model.N();
  d.kappa = grw_curvature_potential(model, 64, horizon);
  RayDensity h = grw_ray_density(model, intervals, horizon);
  for (double& v : h.values) v *= model.fiber_area;
  auto prof = model.profile();
  prof.scale = model.fiber_area;
  const auto w = uniform_weights(ray_count);
  for (std::size_t i = 0; i < ray_count; ++i) d.rays.push_back(Ray{w[i], h, 0.0, prof});
  return d;
}

Disintegration analytic_disintegration(const MinkowskiConeModel& model, std::size_t ray_count,
                                       std::size_t intervals) {
  if (ray_count < 1) throw InputError("ray_count must be at least 1");
  Disintegration d;
  d.N = model.N();
  d.kappa = CurvaturePotential::constant(0.0);
  const RayDensity h = cone_ray_density(model, intervals);
  const auto w = uniform_weights(ray_count);
  for (std::size_t i = 0; i < ray_count; ++i) {
    d.rays.push_back(Ray{w[i], h, 0.0, model.profile()});
  }
  return d;
}

Disintegration pooled(const Disintegration& d) {
  d.validate();
  if (!d.ray_kappa.empty()) throw InputError("pooled rays must share one potential");
  const Ray& first = d.rays.front();
  std::size_t n = first.density.size();
  const Ray* shortest = &first;
  for (const Ray& r : d.rays) {
    const double tol = 1e-9 * first.density.step;
    if (std::abs(r.density.a - first.density.a) > tol ||
        std::abs(r.density.step - first.density.step) > tol ||
        r.density.open_left != first.density.open_left) {
      throw InputError("pooled rays must share start, step and initial flag");
    }
    if (r.density.size() < n) {
      n = r.density.size();
      shortest = &r;
    }
  }
  Ray out;
  out.weight = 1.0;
  out.density = shortest->density;
  out.slice_offset = shortest->slice_offset;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> terms;
    for (const Ray& r : d.rays) terms.push_back(r.weight * r.density.values[i]);
    out.density.values[i] = ordered_sum(terms);
  }
  Disintegration p;
  p.N = d.N;
  p.kappa = d.kappa;
  p.rays.push_back(std::move(out));
  return p;
}

SlopeSummary summarize(const std::vector<double>& values) {
  SlopeSummary s;
  s.samples = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = ordered_sum(values) / static_cast<double>(values.size());
  return s;
}

SlopeSummary constant_slope_residual(const Disintegration& d) {
  std::vector<double> q;
  for (const Ray& r : d.rays) {
    const double origin = r.slice_offset.value_or(r.density.a);
    for (std::size_t i = 0; i + 1 < r.density.size(); ++i) {
      const double l0 = r.density.x(i) - origin;
      const double l1 = r.density.x(i + 1) - origin;
      q.push_back((l1 - l0) / r.density.step);
    }
  }
  return summarize(q);
}

}  // namespace lcg
