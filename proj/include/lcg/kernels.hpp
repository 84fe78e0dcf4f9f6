#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lcg/common.hpp"

namespace lcg {

// Piecewise-constant curvature potential. Piece 0 covers (-inf, b_0), piece i
// covers (b_{i-1}, b_i) and the last piece runs up to domain_end. At a
// breakpoint the potential takes the smaller adjacent value.
class CurvaturePotential {
 public:
  CurvaturePotential();
  CurvaturePotential(std::vector<double> breakpoints, std::vector<double> values,
                     double domain_end = kInf);

  static CurvaturePotential constant(double value, double domain_end = kInf);

  double operator()(double x) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double domain_end() const { return domain_end_; }
  bool unbounded() const { return domain_end_ == kInf; }
  std::size_t piece_count() const { return values_.size(); }

  std::optional<double> constant_value() const;
  double infimum(double lo, double hi) const;
  double supremum(double lo, double hi) const;
  double integral(double lo, double hi) const;

  CurvaturePotential scaled(double factor) const;
  CurvaturePotential shifted(double offset) const;
  CurvaturePotential with_domain_end(double end) const;

  bool operator==(const CurvaturePotential&) const = default;

 private:
  std::size_t piece_index(double x) const;

  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double domain_end_;
};

struct JacobiState {
  double theta = 0.0;
  double u = 0.0;
  double du = 1.0;
};

struct RootReport {
  std::optional<double> root;
  double horizon = 0.0;
  double bracket_width = 0.0;
};

enum class SlideDirection { forward, backward };

// Solution of u'' + kappa u = 0, u(0) = 0, u'(0) = 1, propagated exactly
// across the pieces of kappa; theta >= 0.
JacobiState propagate_jacobi(const CurvaturePotential& kappa, double theta);

double eval_sin_kappa(const CurvaturePotential& kappa, double theta);
double eval_cos_kappa(const CurvaturePotential& kappa, double theta);

// First theta in (0, horizon] where c_u * sin_kappa + c_du * cos_kappa vanishes,
// located piece by piece in closed form.
std::optional<double> exact_first_zero(const CurvaturePotential& kappa, double c_u,
                                       double c_du, double horizon);

RootReport first_root(const CurvaturePotential& kappa, double horizon);

// sin(t theta) / sin(theta); nullopt encodes the infinite value.
std::optional<double> distortion(const CurvaturePotential& kappa, double t, double theta);

CurvaturePotential slide_potential(const CurvaturePotential& kappa, double x0, double x1,
                                   SlideDirection direction);

double potential_function(const CurvaturePotential& kappa, double lambda, double theta);

RootReport ball_root(const CurvaturePotential& kappa, double lambda, double horizon);

double jacobian(const CurvaturePotential& kappa, double N, double H, double theta);

struct DistortionGrid {
  std::vector<double> t_values;
  std::vector<double> theta_values;
};

Verdict sturm_domination_check(const CurvaturePotential& kappa_lo,
                               const CurvaturePotential& kappa_hi,
                               const DistortionGrid& grid, double tol = 1e-9);

// v sampled on [0, b]; b is the first vanishing sample or the last sample.
Verdict riccati_comparison_check(const SampledFunction& v, const CurvaturePotential& kappa,
                                 double d, double tol = 1e-9);

}  // namespace lcg
