#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lcg/density.hpp"
#include "lcg/kernels.hpp"
#include "lcg/models.hpp"

namespace lcg {

// One transport ray. The density's open flags record whether the initial and
// final points exist; slice_offset is the parameter where the ray meets the
// reference set. A closed-form profile, when present, overrides finite
// differences for derivatives.
struct Ray {
  double weight = 0.0;
  RayDensity density;
  std::optional<double> slice_offset;
  std::optional<DensityProfile> profile;

  bool has_initial_point() const { return !density.open_left; }
  bool has_final_point() const { return !density.open_right; }
  bool offset_interior() const;
  // Profile value when present, else the interpolated density.
  double value_at(double x) const { return profile ? profile->value(x) : density.at(x); }

  bool operator==(const Ray&) const = default;
};

struct Disintegration {
  std::vector<Ray> rays;
  double N = 2.0;
  CurvaturePotential kappa;
  // Per-ray potentials; empty means every ray uses `kappa`.
  std::vector<CurvaturePotential> ray_kappa;

  const CurvaturePotential& kappa_of(std::size_t i) const;
  void validate() const;
  // Sum of weight * h(slice_offset) over rays with an offset.
  double slice_area() const;

  bool operator==(const Disintegration&) const = default;
};

Disintegration analytic_disintegration(const WarpedProductModel& model, std::size_t ray_count,
                                       std::size_t intervals = 2048, double horizon = 10.0);
Disintegration analytic_disintegration(const MinkowskiConeModel& model, std::size_t ray_count,
                                       std::size_t intervals = 2048);

// One ray carrying the weighted sum of all densities, cut to the shortest ray.
// Rays must share their start, step and initial-point flag.
Disintegration pooled(const Disintegration& d);

struct SlopeSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

// Difference quotients of the distance along each ray per unit parameter.
// Rays of an analytic disintegration are parametrized by the distance itself.
SlopeSummary constant_slope_residual(const Disintegration& d);

SlopeSummary summarize(const std::vector<double>& values);

}  // namespace lcg
