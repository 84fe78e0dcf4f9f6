#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lcg/density.hpp"
#include "lcg/kernels.hpp"

namespace lcg {

// Positive warping function of a product metric -dt^2 + f(t)^2 g_fiber.
// Closed-form families: flat (f = 1), exp-decay (e^{-param t}), cos, cosh,
// collapse (1 - t/param) and power (t^param). "sampled" interpolates
// uniform samples with a cubic B-spline.
class Warp {
 public:
  Warp() = default;
  Warp(std::string family, double param = 1.0);
  static Warp sampled(double start, double step, std::vector<double> values);

  double f(double t) const;
  double df(double t) const;
  double ddf(double t) const;

  const std::string& family() const { return family_; }
  double param() const { return param_; }
  double sample_start() const { return start_; }
  double sample_step() const { return step_; }
  const std::vector<double>& samples() const { return samples_; }

  bool operator==(const Warp& o) const {
    return family_ == o.family_ && param_ == o.param_ && start_ == o.start_ &&
           step_ == o.step_ && samples_ == o.samples_;
  }

 private:
  std::string family_ = "flat";
  double param_ = 1.0;
  double start_ = 0.0;
  double step_ = 0.0;
  std::vector<double> samples_;
  struct Spline;
  std::shared_ptr<const Spline> spline_;
};

// Closed-form ray density scale * f(shift + theta)^exponent.
struct DensityProfile {
  Warp warp;
  int exponent = 1;
  double shift = 0.0;
  double scale = 1.0;

  double value(double theta) const;
  double log_derivative(double theta) const;
  double derivative(double theta) const;

  bool operator==(const DensityProfile&) const = default;
};

struct WarpedProductModel {
  std::string name;
  double t_min = -1.0;
  double t_max = 1.0;
  Warp warp;
  int fiber_dim = 2;
  double slice_time = 0.0;
  double fiber_area = 1.0;

  void validate() const;
  double N() const { return fiber_dim + 1.0; }
  // Timelike Ricci curvature along the t-lines, -n f''/f.
  double ricci(double t) const;
  DensityProfile profile() const;

  bool operator==(const WarpedProductModel&) const = default;
};

struct MinkowskiConeModel {
  std::string name;
  int spatial_dim = 2;
  double max_radius = 1.0;

  void validate() const;
  double N() const { return spatial_dim + 1.0; }
  DensityProfile profile() const;

  bool operator==(const MinkowskiConeModel&) const = default;
};

double grw_distance(const WarpedProductModel& model, double t);

// Density in the slice-relative parameter theta = t - t0. Infinite time ends
// are truncated at |theta| = horizon and marked open.
RayDensity grw_ray_density(const WarpedProductModel& model, std::size_t intervals = 2048,
                           double horizon = 10.0);

// Piecewise-constant lower approximation of -n f''/f in theta, one piece per
// grid cell; equal neighbouring pieces are merged.
CurvaturePotential grw_curvature_potential(const WarpedProductModel& model,
                                           std::size_t pieces = 64, double horizon = 10.0);

double grw_mean_curvature(const WarpedProductModel& model);

// fiber_area * int_s^t f(t0 + r)^n dr; either offset may be infinite when the
// interval allows it.
double grw_tube_volume(const WarpedProductModel& model, double s, double t);

RayDensity cone_ray_density(const MinkowskiConeModel& model, std::size_t intervals = 2048);

// Named fixtures. Specs look like "grw:exp-decay", "grw:cos,n=3,area=2" or
// "cone:n=2,R=1.5".
struct FixtureCatalog {
  std::map<std::string, WarpedProductModel> warped;
  std::map<std::string, MinkowskiConeModel> cones;

  static FixtureCatalog builtin();
  static FixtureCatalog load(const std::string& path);
};

struct Fixture {
  bool is_cone = false;
  WarpedProductModel warped;
  MinkowskiConeModel cone;
};

Fixture resolve_fixture(const FixtureCatalog& catalog, const std::string& spec);

}  // namespace lcg
