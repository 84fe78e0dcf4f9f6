#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcg/common.hpp"
#include "lcg/disintegration.hpp"
#include "lcg/lattice.hpp"
#include "lcg/models.hpp"

namespace lcg {

struct VolumeBoundReport {
  double bound = 0.0;
  // Sum of weight * h(offset) over the rays that entered the bound.
  double area = 0.0;
  std::size_t used_rays = 0;
  std::vector<std::size_t> excluded_rays;
  std::vector<std::string> warnings;
};

// Sum over rays of weight * h(offset) * int_[s,t] J, with the future part
// using H+ and the past part -H-, and J cut off at present endpoints. Rays
// without finite curvature are excluded with a warning.
VolumeBoundReport hk_bound(const Disintegration& d, double s, double t);

struct AreaBoundReport {
  double bound = 0.0;
  // Sum of weight * h(t), zero beyond the ray ends.
  double level_area = 0.0;
  double margin = 0.0;
  std::vector<std::size_t> excluded_rays;
  std::vector<std::string> warnings;
};

AreaBoundReport area_bound(const Disintegration& d, double t);

// int_0^{pi_k} sin_k^{N-1} times sum of weight * h(offset) [k + (H/(N-1))^2]^{(N-1)/2},
// k = K/(N-1). Needs K > 0 and kappa >= K on every ray.
VolumeBoundReport unifpos_volume_bound(const Disintegration& d, double K);

// Sum over rays of weight * int_{[s,t] within the ray} h. Rays with a closed
// form are integrated exactly, including past censored ends.
double disintegrated_volume(const Disintegration& d, double s, double t);

// [cos_k + lambda sin_k]_+^{N-1} for constant k = K/(N-1), lambda = H/(N-1),
// evaluated without the cancellation of the propagated form.
double constant_jacobian(double K, double N, double H, double theta);

// First zero of the constant-curvature Jacobian in (0, inf), if any.
std::optional<double> constant_jacobian_zero(double K, double N, double H);

struct SingularityVerdict {
  bool applicable = false;
  std::optional<double> theta0;
  // Finite bound on the future volume; empty when this criterion gives none.
  std::optional<double> volume_bound;
  std::string case_tag;
  // Left- and right-hand sides of the hypothesis, when it is a comparison.
  std::optional<double> statistic;
  std::optional<double> threshold;
  // Weight fraction of the selected subfamily (theorems II and III).
  std::optional<double> selected_fraction;
  std::optional<bool> tail_decreasing;
  std::vector<std::string> notes;
};

SingularityVerdict const_singularity(double K, double N, double H0, double area);

SingularityVerdict var_singularity_I(double c, double eps, double H0, double N, double area);

// kminus_tube_integral(t) = int over the tube of height t of k_- dm. The
// limsup is replaced by the maximum over t_grid.
SingularityVerdict var_singularity_II(double K, double delta, double N, double H0,
                                      const std::function<double(double)>& kminus_tube_integral,
                                      double area, const std::vector<double>& t_grid);

// kminus(ray, x) >= 0 along each ray, integrated from the slice to the future end.
SingularityVerdict var_singularity_III(const Disintegration& d,
                                       const std::function<double(std::size_t, double)>& kminus,
                                       double H0, double area);

// Cumulative future tube volumes m[0 <= l <= t] over an increasing grid.
std::vector<double> volume_plateau_probe(const WarpedProductModel& model,
                                         const std::vector<double>& t_grid);
std::vector<double> volume_plateau_probe(const CausalLattice& lattice,
                                         const LatticeDistance& distance,
                                         const std::vector<double>& t_grid);

}  // namespace lcg
