#include "lcg/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "lcg/errors.hpp"

namespace lcg {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> cuts, double tol) {
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double c) { return !(c > a && c < b); }),
             cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  double lo = a;
  for (double c : cuts) {
    total += integrate(f, lo, c, tol);
    lo = c;
  }
  return total + integrate(f, lo, b, tol);
}

double trapezoid(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  return trapezoid(y, h, 0, y.size() - 1);
}

double trapezoid(const std::vector<double>& y, double h, std::size_t from, std::size_t to) {
  if (to <= from) return 0.0;
  double s = 0.5 * (y[from] + y[to]);
  for (std::size_t i = from + 1; i < to; ++i) s += y[i];
  return s * h;
}

double forward_derivative(const std::vector<double>& y, double h, std::size_t i) {
  if (i + 2 >= y.size()) throw InputError("forward stencil leaves the grid");
  return (-3.0 * y[i] + 4.0 * y[i + 1] - y[i + 2]) / (2.0 * h);
}

double backward_derivative(const std::vector<double>& y, double h, std::size_t i) {
  if (i < 2 || i >= y.size()) throw InputError("backward stencil leaves the grid");
  return (3.0 * y[i] - 4.0 * y[i - 1] + y[i - 2]) / (2.0 * h);
}

std::vector<double> derivative(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 3) throw InputError("derivative needs at least 3 samples");
  std::vector<double> d(n);
  d[0] = forward_derivative(y, h, 0);
  d[n - 1] = backward_derivative(y, h, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  return d;
}

std::vector<double> second_derivative(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 4) throw InputError("second derivative needs at least 4 samples");
  std::vector<double> d(n);
  const double h2 = h * h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2;
  d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
  d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
  return d;
}

double ordered_sum(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> buf = terms;
  while (buf.size() > 1) {
    std::vector<double> next;
    next.reserve((buf.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < buf.size(); i += 2) next.push_back(buf[i] + buf[i + 1]);
    if (buf.size() % 2 == 1) next.push_back(buf.back());
    buf.swap(next);
  }
  return buf.front();
}

}  // namespace lcg
