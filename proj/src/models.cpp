#include "lcg/models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "lcg/errors.hpp"
#include "lcg/numerics.hpp"

namespace lcg {

namespace {

const std::vector<std::string> kFamilies = {"flat", "exp-decay", "cos",   "cosh",
                                            "collapse", "power", "sampled"};

}  // namespace

struct Warp::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

Warp::Warp(std::string family, double param) : family_(std::move(family)), param_(param) {
  if (std::find(kFamilies.begin(), kFamilies.end(), family_) == kFamilies.end() ||
      family_ == "sampled") {
    throw InputError("unknown warp family '" + family_ + "'");
  }
  if (!std::isfinite(param_)) throw InputError("warp parameter must be finite");
  if (family_ == "collapse" && !(param_ > 0.0)) {
    throw InputError("collapse time must be positive");
  }
}

Warp Warp::sampled(double start, double step, std::vector<double> values) {
  if (values.size() < 4) throw InputError("sampled warp needs at least four samples");
  if (!(step > 0.0)) throw InputError("sampled warp step must be positive");
  Warp w;
  w.family_ = "sampled";
  w.param_ = 0.0;
  w.start_ = start;
  w.step_ = step;
  w.samples_ = std::move(values);
  w.spline_ = std::make_shared<const Spline>(
      Spline{{w.samples_.begin(), w.samples_.end(), start, step}});
  return w;
}

double Warp::f(double t) const {
  const double p = param_;
  if (family_ == "flat") return 1.0;
  if (family_ == "exp-decay") return std::exp(-p * t);
  if (family_ == "cos") return std::cos(p * t);
  if (family_ == "cosh") return std::cosh(p * t);
  if (family_ == "collapse") return 1.0 - t / p;
  if (family_ == "power") return std::pow(t, p);
  return spline_->s(t);
}

double Warp::df(double t) const {
  const double p = param_;
  if (family_ == "flat") return 0.0;
  if (family_ == "exp-decay") return -p * std::exp(-p * t);
  if (family_ == "cos") return -p * std::sin(p * t);
  if (family_ == "cosh") return p * std::sinh(p * t);
  if (family_ == "collapse") return -1.0 / p;
  if (family_ == "power") return p * std::pow(t, p - 1.0);
  return spline_->s.prime(t);
}

double Warp::ddf(double t) const {
  const double p = param_;
  if (family_ == "flat" || family_ == "collapse") return 0.0;
  if (family_ == "exp-decay") return p * p * std::exp(-p * t);
  if (family_ == "cos") return -p * p * std::cos(p * t);
  if (family_ == "cosh") return p * p * std::cosh(p * t);
  if (family_ == "power") return p * (p - 1.0) * std::pow(t, p - 2.0);
  return spline_->s.double_prime(t);
}

namespace {

// f'/f and f''/f in closed form where the family allows it.
double log_slope(const Warp& w, double t) {
  const double p = w.param();
  const auto& fam = w.family();
  if (fam == "flat") return 0.0;
  if (fam == "exp-decay") return -p;
  if (fam == "cos") return -p * std::tan(p * t);
  if (fam == "cosh") return p * std::tanh(p * t);
  if (fam == "collapse") return -1.0 / (p - t);
  if (fam == "power") return p / t;
  return w.df(t) / w.f(t);
}

double curvature_ratio(const Warp& w, double t) {
  const double p = w.param();
  const auto& fam = w.family();
  if (fam == "flat" || fam == "collapse") return 0.0;
  if (fam == "exp-decay" || fam == "cosh") return p * p;
  if (fam == "cos") return -p * p;
  if (fam == "power") return p * (p - 1.0) / (t * t);
  return w.ddf(t) / w.f(t);
}

}  // namespace

double DensityProfile::value(double theta) const {
  return scale * std::pow(warp.f(shift + theta), exponent);
}

double DensityProfile::log_derivative(double theta) const {
  return exponent * log_slope(warp, shift + theta);
}

double DensityProfile::derivative(double theta) const {
  const double t = shift + theta;
  return scale * exponent * std::pow(warp.f(t), exponent - 1) * warp.df(t);
}

void WarpedProductModel::validate() const {
  if (fiber_dim < 1) throw InputError("fiber dimension must be at least 1");
  if (!(t_min < t_max)) throw InputError("time interval must satisfy t_min < t_max");
  if (!(slice_time > t_min && slice_time < t_max)) {
    throw InputError("slice time must lie inside the time interval");
  }
  if (!(fiber_area > 0.0) || !std::isfinite(fiber_area)) {
    throw InputError("fiber area must be positive and finite");
  }
  const double lo = std::isfinite(t_min) ? t_min : slice_time - 50.0;
  const double hi = std::isfinite(t_max) ? t_max : slice_time + 50.0;
  for (int i = 1; i < 256; ++i) {
    const double t = lo + (hi - lo) * i / 256.0;
    if (!(warp.f(t) > 0.0)) throw InputError("warp must be positive inside the time interval");
  }
}

double WarpedProductModel::ricci(double t) const {
  return -fiber_dim * curvature_ratio(warp, t);
}

DensityProfile WarpedProductModel::profile() const {
  return DensityProfile{warp, fiber_dim, slice_time, 1.0};
}

void MinkowskiConeModel::validate() const {
  if (spatial_dim < 1) throw InputError("cone spatial dimension must be at least 1");
  if (!(max_radius > 0.0) || !std::isfinite(max_radius)) {
    throw InputError("cone radius must be positive and finite");
  }
}

DensityProfile MinkowskiConeModel::profile() const {
  return DensityProfile{Warp("power", 1.0), spatial_dim, 0.0, 1.0};
}

double grw_distance(const WarpedProductModel& model, double t) {
  if (!(t >= model.t_min && t <= model.t_max)) {
    throw InputError("time outside the model interval");
  }
  return t - model.slice_time;
}

namespace {

std::pair<double, double> theta_range(const WarpedProductModel& m, double horizon) {
  const double lo = std::isfinite(m.t_min) ? m.t_min - m.slice_time : -horizon;
  const double hi = std::isfinite(m.t_max) ? m.t_max - m.slice_time : horizon;
  return {lo, hi};
}

}  // namespace

RayDensity grw_ray_density(const WarpedProductModel& model, std::size_t intervals,
                           double horizon) {
  model.validate();
  if (intervals < 2) throw InputError("need at least two density intervals");
  auto [lo, hi] = theta_range(model, horizon);
  // Put the slice on the grid by moving a truncated end.
  if (lo < 0.0 && hi > 0.0 && std::isfinite(model.t_min) != std::isfinite(model.t_max)) {
    const double n = static_cast<double>(intervals);
    const double left = std::clamp(std::round(n * -lo / (hi - lo)), 1.0, n - 1.0);
    const double step = std::isfinite(model.t_min) ? -lo / left : hi / (n - left);
    if (std::isfinite(model.t_min)) hi = lo + n * step;
    else lo = hi - n * step;
  }
  const auto prof = model.profile();
  auto h = RayDensity::sample([&](double th) { return prof.value(th); }, lo, hi, intervals,
                              !std::isfinite(model.t_min), !std::isfinite(model.t_max));
  // Snap rounding residue at a vanishing warp to an exact zero.
  const double top = *std::max_element(h.values.begin(), h.values.end());
  for (double* end : {&h.values.front(), &h.values.back()}) {
    if (*end < 1e-14 * top) *end = 0.0;
  }
  return h;
}

CurvaturePotential grw_curvature_potential(const WarpedProductModel& model, std::size_t pieces,
                                           double horizon) {
  model.validate();
  if (pieces < 1) throw InputError("need at least one curvature piece");
  const auto [lo, hi] = theta_range(model, horizon);
  const double w = (hi - lo) / static_cast<double>(pieces);
  std::vector<double> breaks;
  std::vector<double> vals;
  for (std::size_t p = 0; p < pieces; ++p) {
    double inf = kInf;
    for (int j = 0; j <= 8; ++j) {
      // Stay off the ends, where the warp may vanish.
      const double frac = (j == 0 ? 1e-9 : j == 8 ? 1.0 - 1e-9 : j / 8.0);
      const double th = lo + w * (static_cast<double>(p) + frac);
      inf = std::min(inf, model.ricci(model.slice_time + th));
    }
    if (!vals.empty() && vals.back() == inf) continue;
    if (!vals.empty()) breaks.push_back(lo + w * static_cast<double>(p));
    vals.push_back(inf);
  }
  const double end = std::isfinite(model.t_max) ? hi : kInf;
  return CurvaturePotential(breaks, vals, end);
}

double grw_mean_curvature(const WarpedProductModel& model) {
  model.validate();
  return model.fiber_dim * log_slope(model.warp, model.slice_time);
}

double grw_tube_volume(const WarpedProductModel& model, double s, double t) {
  model.validate();
  const double lo = model.t_min - model.slice_time;
  const double hi = model.t_max - model.slice_time;
  if (!(s < t)) throw InputError("tube volume needs s < t");
  if (s < lo || t > hi) throw InputError("tube offsets outside the model interval");
  const auto prof = model.profile();
  return model.fiber_area * integrate([&](double r) { return prof.value(r); }, s, t, 1e-12);
}

RayDensity cone_ray_density(const MinkowskiConeModel& model, std::size_t intervals) {
  model.validate();
  const int n = model.spatial_dim;
  return RayDensity::sample([n](double r) { return std::pow(r, n); }, 0.0, model.max_radius,
                            intervals, false, true);
}

FixtureCatalog FixtureCatalog::builtin() {
  constexpr double half_pi = std::numbers::pi / 2.0;
  FixtureCatalog c;
  c.warped["grw:flat"] = {"grw:flat", -2.0, 2.0, Warp("flat"), 2, 0.0, 1.0};
  c.warped["grw:exp-decay"] = {"grw:exp-decay", -1.0, kInf, Warp("exp-decay", 1.0), 2, 0.0, 1.0};
  c.warped["grw:cos"] = {"grw:cos", -half_pi, half_pi, Warp("cos", 1.0), 2, 0.0, 1.0};
  c.warped["grw:cosh"] = {"grw:cosh", -1.5, 1.5, Warp("cosh", 1.0), 2, 0.0, 1.0};
  c.warped["grw:collapse"] = {"grw:collapse", -1.0, 1.0, Warp("collapse", 1.0), 2, 0.0, 1.0};
  c.cones["cone:default"] = {"cone:default", 2, 1.0};
  return c;
}

namespace {

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw InputError("fixture override " + key + " has non-numeric value '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v)) throw InputError("fixture override " + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Fixture resolve_fixture(const FixtureCatalog& catalog, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw InputError("fixture spec '" + spec + "' must look like kind:name[,key=value...]");
  }
  const std::string kind = spec.substr(0, colon);
  std::string name;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::stringstream rest(spec.substr(colon + 1));
  std::string token;
  while (std::getline(rest, token, ',')) {
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      if (!name.empty()) throw InputError("fixture spec names two fixtures: '" + spec + "'");
      name = token;
    } else {
      overrides.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
  }
  if (name.empty()) name = "default";
  const std::string key = kind + ":" + name;

  Fixture out;
  if (kind == "grw") {
    const auto it = catalog.warped.find(key);
    if (it == catalog.warped.end()) throw InputError("unknown fixture '" + key + "'");
    out.warped = it->second;
    auto& m = out.warped;
    for (const auto& [k, v] : overrides) {
      if (k == "n") m.fiber_dim = parse_int(k, v);
      else if (k == "area") m.fiber_area = parse_number(k, v);
      else if (k == "t0") m.slice_time = parse_number(k, v);
      else if (k == "tmin") m.t_min = parse_number(k, v);
      else if (k == "tmax") m.t_max = parse_number(k, v);
      else if (k == "param") m.warp = Warp(m.warp.family(), parse_number(k, v));
      else throw InputError("unknown warped-fixture override '" + k + "'");
    }
    m.validate();
  } else if (kind == "cone") {
    const auto it = catalog.cones.find(key);
    if (it == catalog.cones.end()) throw InputError("unknown fixture '" + key + "'");
    out.is_cone = true;
    out.cone = it->second;
    for (const auto& [k, v] : overrides) {
      if (k == "n") out.cone.spatial_dim = parse_int(k, v);
      else if (k == "R") out.cone.max_radius = parse_number(k, v);
      else throw InputError("unknown cone-fixture override '" + k + "'");
    }
    out.cone.validate();
  } else {
    throw InputError("unknown fixture kind '" + kind + "'");
  }
  return out;
}

}  // namespace lcg
