#pragma once

#include <functional>
#include <vector>

namespace lcg {

// Adaptive Gauss-Kronrod quadrature; either limit may be infinite.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// Same, but splits [a, b] at the given interior points first.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> cuts, double tol = 1e-12);

// Composite trapezoid rule on uniform samples with spacing h.
double trapezoid(const std::vector<double>& y, double h);
double trapezoid(const std::vector<double>& y, double h, std::size_t from, std::size_t to);

// Second-order finite differences: central inside, 3-point one-sided at ends.
std::vector<double> derivative(const std::vector<double>& y, double h);
std::vector<double> second_derivative(const std::vector<double>& y, double h);

// 3-point one-sided derivative of y at index i (forward uses i, i+1, i+2).
double forward_derivative(const std::vector<double>& y, double h, std::size_t i);
double backward_derivative(const std::vector<double>& y, double h, std::size_t i);

// Pairwise summation in a fixed order.
double ordered_sum(const std::vector<double>& terms);

}  // namespace lcg
