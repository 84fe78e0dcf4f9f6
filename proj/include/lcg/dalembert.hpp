#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "lcg/common.hpp"
#include "lcg/disintegration.hpp"
#include "lcg/lattice.hpp"
#include "lcg/models.hpp"

namespace lcg {

// Per-ray pieces of the d'Alembertian of the distance: the absolutely
// continuous density (log h)' at interior samples and endpoint atoms,
// +h(a) at an initial point and -h(b) at a final point.
struct RayMeasure {
  double weight = 0.0;
  std::vector<double> param;
  std::vector<double> ac_density;
  std::optional<double> atom_initial;
  std::optional<double> atom_final;

  bool operator==(const RayMeasure&) const = default;
};

struct DAlembertMeasure {
  std::vector<RayMeasure> rays;

  // Weighted sum of atoms at final points (never positive).
  double final_atom_total() const;
  bool operator==(const DAlembertMeasure&) const = default;
};

struct DAlembertOptions {
  // Half-width of the local least-squares fit of log h; 0 means central
  // differences. Ignored for rays with a closed-form profile.
  double smoothing = 0.0;
};

DAlembertMeasure dalembert_measure(const Disintegration& d, const DAlembertOptions& opts = {});

// (log h)' at the interior samples of one ray.
std::vector<double> ray_log_derivative(const Ray& ray, double smoothing = 0.0);

// Test function given per ray as value and derivative in the ray parameter.
struct TestFunction {
  std::function<double(std::size_t ray, double x)> f;
  std::function<double(std::size_t ray, double x)> df;
};

// Sum over rays of weight * [int f h' - f(b) h(b) + f(a) h(a)], atoms only at
// present endpoints, by the trapezoid rule on each density grid.
double apply_to_test_function(const DAlembertMeasure& m, const Disintegration& d,
                              const TestFunction& f);

// |sum weight * int f' h + apply_to_test_function|.
double ibp_residual(const Disintegration& d, const TestFunction& f);

struct ComparisonOptions {
  // Violations are measured relative to max(1, |bound|).
  double tol = 1e-8;
  double min_param = -kInf;
  double max_param = kInf;
};

// -(N-1)/(b - x) <= (log h)' <= (N-1)/(x - a); absent endpoints use the
// unbounded forms. Requires kappa identically 0.
Verdict comparison_check_sec(const DAlembertMeasure& m, const Disintegration& d,
                             const ComparisonOptions& opts = {});

// Generalized cotangent bounds from the slid potentials with v and w playing
// the roles of the endpoints; checked on (v, w).
Verdict comparison_check_variable(const DAlembertMeasure& m, const Disintegration& d, double v,
                                  double w, const ComparisonOptions& opts = {});

struct RayField {
  std::vector<double> param;
  std::vector<double> value;

  bool operator==(const RayField&) const = default;
};

// sgn(l) [1 + l (log h)'] with l the parameter relative to the slice offset.
// The exponent only has to be admissible; the field does not depend on it.
std::vector<RayField> power_dalembert(const Disintegration& d, double q);

struct UnsignedReport {
  // sgn(l) (log h)' per ray.
  std::vector<RayField> density;
  // Atoms of the unsigned operator: sgn(l) times the signed atom.
  std::vector<std::optional<double>> atom_initial;
  std::vector<std::optional<double>> atom_final;
  Verdict lower_bound;
};

UnsignedReport unsigned_dalembert(const Disintegration& d, double tol = 1e-8);

struct MeanCurvatureReport {
  std::vector<std::optional<double>> H_plus;
  std::vector<std::optional<double>> H_minus;
  std::vector<std::optional<double>> H;
  std::vector<bool> singular;
  // Weighted by w * h(offset) over finite-curvature rays.
  double mean_H = 0.0;
  double min_H = 0.0;
  double max_H = 0.0;
  double area = 0.0;
  std::size_t finite_rays = 0;
};

MeanCurvatureReport mean_curvature(const Disintegration& d);

struct BarrierReport {
  Verdict verdict;
  // Smallest slack of the barrier inequalities over the checked samples.
  double margin = kInf;
};

// Future side (log h)' <= (N-1) H0 / (N-1 + H0 l), past side >=. Requires
// kappa identically 0; throws RangeError where the denominator is not positive.
BarrierReport barrier_check(const Disintegration& d, double H0, double tol = 1e-8);

// (2/t^2) [m(0 <= l <= t phi0) - t phi0 area] from the closed-form density.
double normal_variation_quotient(const WarpedProductModel& model, double phi0, double t);

struct MinkowskiReport {
  Verdict verdict;
  double collar = 0.0;
  double atom_total = 0.0;
  std::size_t rays_in_set = 0;
};

// Past collar m(0 < l_A < eps) / eps against sum of weight * h(b) over rays
// whose final point lies in A.
MinkowskiReport minkowski_content_bound_check(const CausalLattice& lattice,
                                              const LatticeExtraction& extraction,
                                              const std::vector<std::size_t>& A, double eps,
                                              double tol = 0.1);

// Final points of the extracted rays.
std::vector<std::size_t> extracted_final_points(const LatticeExtraction& extraction);

struct InverseLengthReport {
  // Sum of weight / (b - a) over rays with both endpoints present.
  double integral = 0.0;
  std::size_t bounded_rays = 0;
  std::size_t censored_rays = 0;
};

InverseLengthReport inverse_length_integral(const Disintegration& d);

}  // namespace lcg
