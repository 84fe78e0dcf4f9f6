#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "lcg/common.hpp"
#include "lcg/kernels.hpp"

namespace lcg {

// Conditional density on a ray, sampled at a + i * step for i = 0..n-1 with
// a + (n-1) * step = b. An "open" side means the ray has no endpoint there;
// the end sample is still the continuous extension of h.
struct RayDensity {
  double a = 0.0;
  double b = 1.0;
  bool open_left = false;
  bool open_right = false;
  double step = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return a + static_cast<double>(i) * step; }
  void validate() const;
  // Linear interpolation; exact at grid points.
  double at(double x) const;
  // Grid index of x when x is a grid point up to rounding.
  std::optional<std::size_t> index_of(double x) const;
  std::vector<double> log_values() const;

  bool operator==(const RayDensity&) const = default;

  static RayDensity sample(const std::function<double(double)>& f, double a, double b,
                           std::size_t intervals, bool open_left = false,
                           bool open_right = false);
};

struct TripleSampler {
  std::size_t grid_points = 33;
  std::vector<double> t_values = uniform_t(17);
  double tol = 1e-7;

  static std::vector<double> uniform_t(std::size_t count);
};

Verdict is_mcp_density(const RayDensity& h, const CurvaturePotential& kappa, double N,
                       const TripleSampler& sampler = {});
Verdict is_cd_density(const RayDensity& h, const CurvaturePotential& kappa, double N,
                      const TripleSampler& sampler = {});

// Comparison bounds for (log h)' and for ratios h(y)/h(x). Absent endpoints
// switch to the unbounded-ray forms driven by the infimum of kappa.
Verdict log_derivative_bounds_check(const RayDensity& h, const CurvaturePotential& kappa,
                                    double N, double tol = 1e-7);

// Lower and upper (log h)' comparison bounds at x; infinite when absent.
std::pair<double, double> log_derivative_bounds(const RayDensity& h,
                                                const CurvaturePotential& kappa, double N,
                                                double x);

struct SupBoundReport {
  Verdict verdict;
  double sup_h = 0.0;
  double bound = 0.0;
};
SupBoundReport a_priori_sup_bound_check(const RayDensity& h, double K, double N);

// (b - a) * int |h'| / int h.
double first_order_integral_estimate(const RayDensity& h);

struct ResidualField {
  std::vector<double> x;
  std::vector<double> residual;
  Verdict verdict;
};
ResidualField cd_differential_residual(const RayDensity& h, const CurvaturePotential& kappa,
                                       double N, double tol = 1e-6);

Verdict bochner_ray_check(const RayDensity& h, const CurvaturePotential& kappa, double N,
                          double x, double y, double tol = 1e-6);

struct ComparisonIIReport {
  Verdict verdict;
  double H_plus = 0.0;
  double H_plus_error = 0.0;
  std::optional<double> ball_root;
  double max_abs_gap = 0.0;
};
ComparisonIIReport comparison_II_check(const RayDensity& h, const CurvaturePotential& kappa,
                                       double N, double tol = 1e-9);

// Right and left logarithmic derivatives of h at grid index i from 3-point
// one-sided stencils, with a Richardson error estimate for each. A side with a
// single sample before the grid ends falls back to a first-order difference.
struct OneSidedLogDerivative {
  std::optional<double> right;
  std::optional<double> left;
  double right_error = 0.0;
  double left_error = 0.0;
};
OneSidedLogDerivative one_sided_log_derivative(const RayDensity& h, std::size_t i);

}  // namespace lcg
