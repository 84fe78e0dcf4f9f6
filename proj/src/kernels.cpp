#include "lcg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lcg/errors.hpp"

namespace lcg {

namespace {

void advance(double k, double len, double& u, double& du) {
  if (len == 0.0) return;
  if (k > 0.0) {
    const double w = std::sqrt(k);
    const double c = std::cos(w * len);
    const double s = std::sin(w * len);
    const double nu = u * c + du * s / w;
    du = -u * w * s + du * c;
    u = nu;
  } else if (k < 0.0) {
    const double w = std::sqrt(-k);
    const double c = std::cosh(w * len);
    const double s = std::sinh(w * len);
    const double nu = u * c + du * s / w;
    du = u * w * s + du * c;
    u = nu;
  } else {
    u += du * len;
  }
}

// First s > 0 with y(s) = 0 for y'' = -k y, y(0) = y0 >= 0, y'(0) = dy0.
std::optional<double> piece_zero(double k, double y0, double dy0) {
  if (k > 0.0) {
    const double w = std::sqrt(k);
    const double phi = std::atan2(y0, dy0 / w);
    return (std::numbers::pi - phi) / w;
  }
  if (y0 == 0.0) return std::nullopt;
  if (k == 0.0) {
    if (dy0 < 0.0) return -y0 / dy0;
    return std::nullopt;
  }
  const double w = std::sqrt(-k);
  if (dy0 < 0.0 && -dy0 > y0 * w) return std::atanh(y0 * w / -dy0) / w;
  return std::nullopt;
}

void check_theta(const CurvaturePotential& kappa, double theta) {
  if (std::isnan(theta)) throw InputError("parameter is NaN");
  if (std::abs(theta) > kappa.domain_end()) {
    throw DomainError("parameter " + std::to_string(theta) + " beyond potential domain end " +
                      std::to_string(kappa.domain_end()));
  }
}

template <class F>
RootReport scan_root(F&& f, double horizon) {
  RootReport report;
  report.horizon = horizon;
  if (!(horizon > 0.0)) throw InputError("root search horizon must be positive");
  const int steps = 1 << 10;
  const double h = horizon / steps;
  double prev = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double x = i == steps ? horizon : i * h;
    if (f(x) <= 0.0) {
      double lo = prev;
      double hi = x;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      report.root = 0.5 * (lo + hi);
      report.bracket_width = hi - lo;
      return report;
    }
    prev = x;
  }
  return report;
}

}  // namespace

CurvaturePotential::CurvaturePotential() : values_{0.0}, domain_end_(kInf) {}

CurvaturePotential::CurvaturePotential(std::vector<double> breakpoints,
                                       std::vector<double> values, double domain_end)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), domain_end_(domain_end) {
  if (values_.size() != breakpoints_.size() + 1) {
    throw InputError("potential needs exactly one value per piece (breakpoints + 1)");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("potential piece values must be finite");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i])) throw InputError("breakpoints must be finite");
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
      throw InputError("breakpoints must be strictly increasing");
    }
  }
  if (std::isnan(domain_end_)) throw InputError("domain end is NaN");
  if (!breakpoints_.empty() && !(breakpoints_.back() < domain_end_)) {
    throw InputError("breakpoints must lie before the domain end");
  }
}

CurvaturePotential CurvaturePotential::constant(double value, double domain_end) {
  return CurvaturePotential({}, {value}, domain_end);
}

std::size_t CurvaturePotential::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

double CurvaturePotential::operator()(double x) const {
  if (x > domain_end_) throw DomainError("potential evaluated beyond its domain end");
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin());
  if (it != breakpoints_.end() && *it == x) return std::min(values_[i], values_[i + 1]);
  return values_[i];
}

std::optional<double> CurvaturePotential::constant_value() const {
  for (double v : values_) {
    if (v != values_.front()) return std::nullopt;
  }
  return values_.front();
}

double CurvaturePotential::infimum(double lo, double hi) const {
  double r = kInf;
  for (std::size_t i = piece_index(lo); i <= std::min(piece_index(hi), values_.size() - 1); ++i) {
    r = std::min(r, values_[i]);
  }
  return r;
}

double CurvaturePotential::supremum(double lo, double hi) const {
  double r = -kInf;
  for (std::size_t i = piece_index(lo); i <= std::min(piece_index(hi), values_.size() - 1); ++i) {
    r = std::max(r, values_[i]);
  }
  return r;
}

double CurvaturePotential::integral(double lo, double hi) const {
  if (hi < lo) return -integral(hi, lo);
  if (hi > domain_end_) throw DomainError("integral beyond the potential domain end");
  double total = 0.0;
  double pos = lo;
  for (std::size_t i = piece_index(lo); pos < hi; ++i) {
    const double end = i < breakpoints_.size() ? std::min(breakpoints_[i], hi) : hi;
    total += values_[i] * (end - pos);
    pos = end;
  }
  return total;
}

CurvaturePotential CurvaturePotential::scaled(double factor) const {
  auto v = values_;
  for (double& x : v) x *= factor;
  return {breakpoints_, std::move(v), domain_end_};
}

CurvaturePotential CurvaturePotential::shifted(double offset) const {
  auto v = values_;
  for (double& x : v) x += offset;
  return {breakpoints_, std::move(v), domain_end_};
}

CurvaturePotential CurvaturePotential::with_domain_end(double end) const {
  std::vector<double> bps;
  std::vector<double> vals{values_.front()};
  for (std::size_t i = 0; i < breakpoints_.size() && breakpoints_[i] < end; ++i) {
    bps.push_back(breakpoints_[i]);
    vals.push_back(values_[i + 1]);
  }
  return {std::move(bps), std::move(vals), end};
}

JacobiState propagate_jacobi(const CurvaturePotential& kappa, double theta) {
  if (theta < 0.0) throw InputError("propagation requires a nonnegative parameter");
  check_theta(kappa, theta);
  JacobiState st{theta, 0.0, 1.0};
  const auto& bps = kappa.breakpoints();
  double pos = 0.0;
  std::size_t i = static_cast<std::size_t>(std::upper_bound(bps.begin(), bps.end(), 0.0) -
                                           bps.begin());
  while (pos < theta) {
    const double end = i < bps.size() ? std::min(bps[i], theta) : theta;
    advance(kappa.values()[i], end - pos, st.u, st.du);
    pos = end;
    ++i;
  }
  return st;
}

double eval_sin_kappa(const CurvaturePotential& kappa, double theta) {
  check_theta(kappa, theta);
  if (theta < 0.0) return -propagate_jacobi(kappa, -theta).u;
  return propagate_jacobi(kappa, theta).u;
}

double eval_cos_kappa(const CurvaturePotential& kappa, double theta) {
  check_theta(kappa, theta);
  return propagate_jacobi(kappa, std::abs(theta)).du;
}

std::optional<double> exact_first_zero(const CurvaturePotential& kappa, double c_u, double c_du,
                                       double horizon) {
  const double cap = std::min(horizon, kappa.domain_end());
  const auto& bps = kappa.breakpoints();
  const auto& vals = kappa.values();
  double u = 0.0;
  double du = 1.0;
  double pos = 0.0;
  std::size_t i = static_cast<std::size_t>(std::upper_bound(bps.begin(), bps.end(), 0.0) -
                                           bps.begin());
  while (pos < cap) {
    const double k = vals[i];
    const double end = i < bps.size() ? std::min(bps[i], cap) : cap;
    const double y = c_u * u + c_du * du;
    const double dy = c_u * du - k * c_du * u;
    if (y < 0.0 || (y == 0.0 && pos > 0.0)) return pos;
    if (y == 0.0 && dy <= 0.0) return pos;
    const auto s = piece_zero(k, y, dy);
    if (s && pos + *s <= end) return pos + *s;
    advance(k, end - pos, u, du);
    pos = end;
    ++i;
  }
  return std::nullopt;
}

RootReport first_root(const CurvaturePotential& kappa, double horizon) {
  const double cap = std::min(horizon, kappa.domain_end());
  return scan_root([&](double x) { return propagate_jacobi(kappa, x).u; }, cap);
}

std::optional<double> distortion(const CurvaturePotential& kappa, double t, double theta) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("distortion fraction must lie in [0,1]");
  if (theta < 0.0) throw InputError("distortion requires a nonnegative parameter");
  if (theta == 0.0) return t;
  const auto zero = exact_first_zero(kappa, 1.0, 0.0, theta);
  if (zero && *zero <= theta) return std::nullopt;
  return propagate_jacobi(kappa, t * theta).u / propagate_jacobi(kappa, theta).u;
}

CurvaturePotential slide_potential(const CurvaturePotential& kappa, double x0, double x1,
                                   SlideDirection direction) {
  if (x0 == x1) throw InputError("slid potential needs distinct endpoints");
  const double lo = std::min(x0, x1);
  const double hi = std::max(x0, x1);
  if (hi > kappa.domain_end()) throw DomainError("slid interval leaves the potential domain");
  const auto& bps = kappa.breakpoints();
  const auto first = std::upper_bound(bps.begin(), bps.end(), lo);
  const auto last = std::lower_bound(bps.begin(), bps.end(), hi);
  const auto i0 = static_cast<std::size_t>(first - bps.begin());
  std::vector<double> nb;
  std::vector<double> nv{kappa.values()[i0]};
  for (auto it = first; it != last; ++it) {
    nb.push_back(*it - lo);
    nv.push_back(kappa.values()[static_cast<std::size_t>(it - bps.begin()) + 1]);
  }
  const double len = hi - lo;
  if (direction == SlideDirection::backward) {
    std::reverse(nv.begin(), nv.end());
    std::reverse(nb.begin(), nb.end());
    for (double& b : nb) b = len - b;
  }
  // Reflection rounding can push a breakpoint onto an end; drop degenerate pieces.
  std::vector<double> cb;
  std::vector<double> cv{nv.front()};
  for (std::size_t j = 0; j < nb.size(); ++j) {
    if (nb[j] <= 0.0) {
      cv.back() = nv[j + 1];
      continue;
    }
    if (nb[j] >= len || (!cb.empty() && nb[j] <= cb.back())) continue;
    cb.push_back(nb[j]);
    cv.push_back(nv[j + 1]);
  }
  return {std::move(cb), std::move(cv), len};
}

double potential_function(const CurvaturePotential& kappa, double lambda, double theta) {
  check_theta(kappa, theta);
  const auto st = propagate_jacobi(kappa, std::abs(theta));
  const double s = theta < 0.0 ? -st.u : st.u;
  return st.du + lambda * s;
}

RootReport ball_root(const CurvaturePotential& kappa, double lambda, double horizon) {
  const double cap = std::min(horizon, kappa.domain_end());
  return scan_root(
      [&](double x) {
        const auto st = propagate_jacobi(kappa, x);
        return st.du + lambda * st.u;
      },
      cap);
}

double jacobian(const CurvaturePotential& kappa, double N, double H, double theta) {
  if (!(N > 1.0)) throw InputError("dimension bound N must exceed 1");
  const auto k = kappa.scaled(1.0 / (N - 1.0));
  const double lambda = (theta < 0.0 ? -H : H) / (N - 1.0);
  const double r = std::abs(theta);
  if (r == 0.0) return 1.0;
  const auto zero = exact_first_zero(k, lambda, 1.0, r);
  if (zero && *zero <= r) return 0.0;
  check_theta(k, r);
  const auto st = propagate_jacobi(k, r);
  const double p = st.du + lambda * st.u;
  return p > 0.0 ? std::pow(p, N - 1.0) : 0.0;
}

Verdict sturm_domination_check(const CurvaturePotential& kappa_lo,
                               const CurvaturePotential& kappa_hi, const DistortionGrid& grid,
                               double tol) {
  double theta_max = 0.0;
  for (double th : grid.theta_values) theta_max = std::max(theta_max, th);
  std::vector<double> probes{0.0, theta_max};
  for (double b : kappa_lo.breakpoints()) probes.push_back(b);
  for (double b : kappa_hi.breakpoints()) probes.push_back(b);
  std::sort(probes.begin(), probes.end());
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    mids.push_back(0.5 * (probes[i] + probes[i + 1]));
  }
  probes.insert(probes.end(), mids.begin(), mids.end());
  for (double x : probes) {
    if (x < 0.0 || x > theta_max) continue;
    if (kappa_lo(x) > kappa_hi(x)) {
      throw InputError("lower potential exceeds upper potential at " + std::to_string(x));
    }
  }
  Verdict v;
  for (double th : grid.theta_values) {
    for (double t : grid.t_values) {
      const auto lo = distortion(kappa_lo, t, th);
      const auto hi = distortion(kappa_hi, t, th);
      if (!hi) continue;
      const double viol = lo ? *lo - *hi : kInf;
      v.record(viol, {t, th});
    }
  }
  v.finalize(tol);
  return v;
}

Verdict riccati_comparison_check(const SampledFunction& v, const CurvaturePotential& kappa,
                                 double d, double tol) {
  const auto& y = v.values;
  if (y.size() < 3 || !(v.step > 0.0)) throw InputError("need at least 3 samples and a step");
  if (std::abs(y[0] - 1.0) > 1e-12) throw InputError("comparison requires v(0) = 1");
  std::size_t last = y.size() - 1;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] < 0.0) throw InputError("v must be nonnegative");
    if (y[i] == 0.0) {
      last = i;
      break;
    }
  }
  double curv = 0.0;
  for (std::size_t i = 1; i + 1 <= last; ++i) {
    curv = std::max(curv, std::abs(y[i + 1] - 2 * y[i] + y[i - 1]) / (v.step * v.step));
  }
  const double slope0 = (y[1] - y[0]) / v.step;
  if (slope0 > -d + 5.0 * curv * v.step + 1e-9) {
    throw InputError("initial slope of v exceeds the comparison slope");
  }
  const double b = static_cast<double>(last) * v.step;
  Verdict out;
  const auto zero = exact_first_zero(kappa, -d, 1.0, b);
  if (zero) out.record(b - *zero, {b});
  for (std::size_t i = 0; i + 1 < last; ++i) {
    const double x = static_cast<double>(i) * v.step;
    const double p0 = potential_function(kappa, -d, x);
    const double p1 = potential_function(kappa, -d, x + v.step);
    if (!(p0 > 0.0 && p1 > 0.0)) continue;
    const double qv = (std::log(y[i + 1]) - std::log(y[i])) / v.step;
    const double qp = (std::log(p1) - std::log(p0)) / v.step;
    out.record(qv - qp, {x});
  }
  out.finalize(tol);
  return out;
}

}  // namespace lcg
