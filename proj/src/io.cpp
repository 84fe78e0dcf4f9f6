#include "lcg/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lcg/density.hpp"
#include "lcg/errors.hpp"

namespace lcg {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing key '" + key + "'");
  return *it;
}

std::string at_key(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

double num(const Json& j, const char* key, const std::string& where) {
  return number_from_json(field(j, key, where), at_key(where, key));
}

double num_or(const Json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

template <class T>
T typed(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(at_key(where, key) + ": wrong type");
  }
}

int integer(const Json& j, const char* key, const std::string& where) {
  const double v = num(j, key, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw InputError(at_key(where, key) + ": expected an integer");
  }
  return static_cast<int>(v);
}

std::vector<double> numbers(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_array()) throw InputError(at_key(where, key) + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number_from_json(v[i], at_key(where, key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json numbers_json(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_json(x));
  return a;
}

Json optional_json(const std::optional<double>& x) {
  return x ? number_json(*x) : Json(nullptr);
}

Json optionals_json(const std::vector<std::optional<double>>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(optional_json(x));
  return a;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x == 0.0 ? 0.0 : x;
}

double number_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InputError(where + ": expected a number");
}

void to_json(Json& j, const CurvaturePotential& k) {
  j = Json{{"breakpoints", numbers_json(k.breakpoints())},
           {"values", numbers_json(k.values())},
           {"domain_end", number_json(k.domain_end())}};
}

void from_json(const Json& j, CurvaturePotential& k) {
  const std::string w = "potential";
  k = CurvaturePotential(numbers(j, "breakpoints", w), numbers(j, "values", w),
                         j.contains("domain_end") ? num(j, "domain_end", w) : kInf);
}

void to_json(Json& j, const RayDensity& h) {
  j = Json{{"a", number_json(h.a)},         {"b", number_json(h.b)},
           {"open_left", h.open_left},      {"open_right", h.open_right},
           {"step", number_json(h.step)},   {"values", numbers_json(h.values)}};
}

void from_json(const Json& j, RayDensity& h) {
  const std::string w = "density";
  h.a = num(j, "a", w);
  h.b = num(j, "b", w);
  h.open_left = typed<bool>(j, "open_left", w);
  h.open_right = typed<bool>(j, "open_right", w);
  h.step = num(j, "step", w);
  h.values = numbers(j, "values", w);
}

void to_json(Json& j, const Warp& w) {
  if (w.family() == "sampled") {
    j = Json{{"family", "sampled"},
             {"start", number_json(w.sample_start())},
             {"step", number_json(w.sample_step())},
             {"samples", numbers_json(w.samples())}};
  } else {
    j = Json{{"family", w.family()}, {"param", number_json(w.param())}};
  }
}

void from_json(const Json& j, Warp& w) {
  const std::string where = "warp";
  const auto family = typed<std::string>(j, "family", where);
  if (family == "sampled") {
    w = Warp::sampled(num(j, "start", where), num(j, "step", where),
                      numbers(j, "samples", where));
  } else {
    w = Warp(family, num_or(j, "param", 1.0, where));
  }
}

void to_json(Json& j, const DensityProfile& p) {
  j = Json{{"warp", p.warp},
           {"exponent", p.exponent},
           {"shift", number_json(p.shift)},
           {"scale", number_json(p.scale)}};
}

void from_json(const Json& j, DensityProfile& p) {
  const std::string w = "profile";
  p.warp = field(j, "warp", w).get<Warp>();
  p.exponent = integer(j, "exponent", w);
  p.shift = num(j, "shift", w);
  p.scale = num(j, "scale", w);
}

void to_json(Json& j, const Ray& r) {
  j = Json{{"weight", number_json(r.weight)},
           {"slice_offset", optional_json(r.slice_offset)},
           {"density", r.density}};
  if (r.profile) j["profile"] = *r.profile;
}

void from_json(const Json& j, Ray& r) {
  const std::string w = "ray";
  r.weight = num(j, "weight", w);
  const Json& off = field(j, "slice_offset", w);
  r.slice_offset = off.is_null() ? std::nullopt
                                 : std::optional<double>(number_from_json(off, "ray.slice_offset"));
  r.density = field(j, "density", w).get<RayDensity>();
  r.profile.reset();
  if (j.contains("profile") && !j["profile"].is_null()) r.profile = j["profile"].get<DensityProfile>();
}

void to_json(Json& j, const Disintegration& d) {
  j = Json{{"N", number_json(d.N)}, {"kappa", d.kappa}};
  if (!d.ray_kappa.empty()) j["ray_kappa"] = d.ray_kappa;
  j["rays"] = d.rays;
}

void from_json(const Json& j, Disintegration& d) {
  const std::string w = "disintegration";
  d.N = num(j, "N", w);
  d.kappa = field(j, "kappa", w).get<CurvaturePotential>();
  d.ray_kappa.clear();
  if (j.contains("ray_kappa")) d.ray_kappa = j["ray_kappa"].get<std::vector<CurvaturePotential>>();
  const Json& rays = field(j, "rays", w);
  if (!rays.is_array()) throw InputError("disintegration.rays: expected an array");
  d.rays.clear();
  for (const auto& r : rays) d.rays.push_back(r.get<Ray>());
}

void to_json(Json& j, const WarpedProductModel& m) {
  j = Json{{"name", m.name},
           {"t_min", number_json(m.t_min)},
           {"t_max", number_json(m.t_max)},
           {"warp", m.warp},
           {"fiber_dim", m.fiber_dim},
           {"slice_time", number_json(m.slice_time)},
           {"fiber_area", number_json(m.fiber_area)}};
}

void from_json(const Json& j, WarpedProductModel& m) {
  const std::string w = "model";
  m.name = typed<std::string>(j, "name", w);
  m.t_min = num(j, "t_min", w);
  m.t_max = num(j, "t_max", w);
  m.warp = field(j, "warp", w).get<Warp>();
  m.fiber_dim = integer(j, "fiber_dim", w);
  m.slice_time = num_or(j, "slice_time", 0.0, w);
  m.fiber_area = num_or(j, "fiber_area", 1.0, w);
  m.validate();
}

void to_json(Json& j, const MinkowskiConeModel& m) {
  j = Json{{"name", m.name},
           {"spatial_dim", m.spatial_dim},
           {"max_radius", number_json(m.max_radius)}};
}

void from_json(const Json& j, MinkowskiConeModel& m) {
  const std::string w = "cone";
  m.name = typed<std::string>(j, "name", w);
  m.spatial_dim = integer(j, "spatial_dim", w);
  m.max_radius = num(j, "max_radius", w);
  m.validate();
}

void to_json(Json& j, const LatticeSpec& s) {
  j = Json{{"dims", s.spatial_dims},
           {"resolution", s.resolution},
           {"t_min", number_json(s.t_min)},
           {"t_max", number_json(s.t_max)},
           {"extent", number_json(s.x_extent)},
           {"horizon", s.horizon},
           {"region", s.region},
           {"cone_speed", number_json(s.cone_speed)},
           {"max_radius", number_json(s.max_radius)},
           {"cap_height", number_json(s.cap_height)},
           {"cap_slope", number_json(s.cap_slope)},
           {"sigma", s.sigma}};
}

void from_json(const Json& j, LatticeSpec& s) {
  const std::string w = "lattice";
  LatticeSpec d;
  s.spatial_dims = integer(j, "dims", w);
  s.x_extent = num(j, "extent", w);
  s.horizon = integer(j, "horizon", w);
  s.sigma = typed<std::string>(j, "sigma", w);
  s.resolution = j.contains("resolution") ? integer(j, "resolution", w) : d.resolution;
  s.t_min = num_or(j, "t_min", d.t_min, w);
  s.t_max = num_or(j, "t_max", d.t_max, w);
  s.region = j.contains("region") ? typed<std::string>(j, "region", w) : d.region;
  s.cone_speed = num_or(j, "cone_speed", d.cone_speed, w);
  s.max_radius = num_or(j, "max_radius", d.max_radius, w);
  s.cap_height = num_or(j, "cap_height", d.cap_height, w);
  s.cap_slope = num_or(j, "cap_slope", d.cap_slope, w);
}

void to_json(Json& j, const Verdict& v) {
  j = Json{{"passed", v.passed},
           {"worst_violation", number_json(v.worst_violation)},
           {"witness", numbers_json(v.witness)}};
  if (!v.note.empty()) j["note"] = v.note;
}

void to_json(Json& j, const DAlembertMeasure& m) {
  Json rays = Json::array();
  for (const auto& r : m.rays) {
    rays.push_back(Json{{"weight", number_json(r.weight)},
                        {"param", numbers_json(r.param)},
                        {"ac_density", numbers_json(r.ac_density)},
                        {"atoms", Json{{"initial", optional_json(r.atom_initial)},
                                       {"final", optional_json(r.atom_final)}}}});
  }
  j = Json{{"final_atom_total", number_json(m.final_atom_total())}, {"rays", rays}};
}

void to_json(Json& j, const RayField& f) {
  j = Json{{"param", numbers_json(f.param)}, {"value", numbers_json(f.value)}};
}

void to_json(Json& j, const UnsignedReport& r) {
  j = Json{{"lower_bound", r.lower_bound},
           {"atom_initial", optionals_json(r.atom_initial)},
           {"atom_final", optionals_json(r.atom_final)},
           {"density", r.density}};
}

void to_json(Json& j, const MeanCurvatureReport& r) {
  j = Json{{"mean_H", number_json(r.mean_H)},
           {"min_H", number_json(r.min_H)},
           {"max_H", number_json(r.max_H)},
           {"area", number_json(r.area)},
           {"finite_rays", r.finite_rays},
           {"H_plus", optionals_json(r.H_plus)},
           {"H_minus", optionals_json(r.H_minus)},
           {"H", optionals_json(r.H)},
           {"singular", r.singular}};
}

void to_json(Json& j, const BarrierReport& r) {
  j = Json{{"verdict", r.verdict}, {"margin", number_json(r.margin)}};
}

void to_json(Json& j, const MinkowskiReport& r) {
  j = Json{{"verdict", r.verdict},
           {"collar", number_json(r.collar)},
           {"atom_total", number_json(r.atom_total)},
           {"rays_in_set", r.rays_in_set}};
}

void to_json(Json& j, const InverseLengthReport& r) {
  j = Json{{"integral", number_json(r.integral)},
           {"bounded_rays", r.bounded_rays},
           {"censored_rays", r.censored_rays}};
}

void to_json(Json& j, const VolumeBoundReport& r) {
  j = Json{{"bound", number_json(r.bound)},
           {"area", number_json(r.area)},
           {"used_rays", r.used_rays},
           {"excluded_rays", r.excluded_rays},
           {"warnings", r.warnings}};
}

void to_json(Json& j, const AreaBoundReport& r) {
  j = Json{{"bound", number_json(r.bound)},
           {"level_area", number_json(r.level_area)},
           {"margin", number_json(r.margin)},
           {"excluded_rays", r.excluded_rays},
           {"warnings", r.warnings}};
}

void to_json(Json& j, const SingularityVerdict& v) {
  j = Json{{"applicable", v.applicable},
           {"case_tag", v.case_tag},
           {"theta0", v.theta0 ? number_json(*v.theta0) : Json("none")},
           {"volume_bound", v.volume_bound ? number_json(*v.volume_bound)
                                           : Json("unbounded by this criterion")}};
  if (v.statistic) j["statistic"] = number_json(*v.statistic);
  if (v.threshold) j["threshold"] = number_json(*v.threshold);
  if (v.selected_fraction) j["selected_fraction"] = number_json(*v.selected_fraction);
  if (v.tail_decreasing) j["tail_decreasing"] = *v.tail_decreasing;
  j["notes"] = v.notes;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": parse error at byte " + std::to_string(e.byte));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

Disintegration load_disintegration(const std::string& path) {
  const Json j = read_json_file(path);
  const Json& body = j.contains("disintegration") ? j["disintegration"] : j;
  Disintegration d;
  try {
    d = body.get<Disintegration>();
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  d.validate();
  return d;
}

LatticeSpec load_lattice_spec(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return j.get<LatticeSpec>();
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Json catalog_json(const FixtureCatalog& catalog) {
  Json w = Json::array(), c = Json::array();
  for (const auto& [name, m] : catalog.warped) w.push_back(m);
  for (const auto& [name, m] : catalog.cones) c.push_back(m);
  return Json{{"warped", w}, {"cones", c}};
}

FixtureCatalog FixtureCatalog::load(const std::string& path) {
  const Json j = read_json_file(path);
  FixtureCatalog cat;
  try {
    if (j.contains("warped")) {
      for (const auto& e : j["warped"]) {
        auto m = e.get<WarpedProductModel>();
        if (m.name.rfind("grw:", 0) != 0) throw InputError("warped fixture names start with grw:");
        cat.warped[m.name] = m;
      }
    }
    if (j.contains("cones")) {
      for (const auto& e : j["cones"]) {
        auto m = e.get<MinkowskiConeModel>();
        if (m.name.rfind("cone:", 0) != 0) throw InputError("cone fixture names start with cone:");
        cat.cones[m.name] = m;
      }
    }
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (cat.warped.empty() && cat.cones.empty()) throw InputError(path + ": catalog has no fixtures");
  return cat;
}

std::string profile_series_csv(const Disintegration& d, const DAlembertMeasure& m,
                               bool with_residual) {
  if (m.rays.size() != d.rays.size()) throw InputError("measure does not match disintegration");
  const auto mc = mean_curvature(d);
  std::ostringstream os;
  os << "ray_id,param,h,log_h_prime,bound_lower,bound_upper,jacobian";
  if (with_residual) os << ",residual";
  os << "\n";
  for (std::size_t i = 0; i < d.rays.size(); ++i) {
    const Ray& ray = d.rays[i];
    const RayDensity& h = ray.density;
    RayDensity shell;
    shell.a = h.a;
    shell.b = h.b;
    shell.open_left = h.open_left;
    shell.open_right = h.open_right;
    const auto& rm = m.rays[i];
    for (std::size_t j = 0; j < rm.param.size(); ++j) {
      const double x = rm.param[j];
      const auto [lo, hi] = log_derivative_bounds(shell, d.kappa_of(i), d.N, x);
      double jac = std::numeric_limits<double>::quiet_NaN();
      if (ray.slice_offset) {
        const double l = x - *ray.slice_offset;
        const auto& H = l >= 0.0 ? mc.H_plus[i] : mc.H_minus[i];
        const auto k = d.kappa_of(i).constant_value();
        if (H && k) {
          jac = constant_jacobian(*k, d.N, l >= 0.0 ? *H : -*H, l);
        }
      }
      os << i << ',' << csv_number(x) << ',' << csv_number(ray.value_at(x)) << ','
         << csv_number(rm.ac_density[j]) << ',' << csv_number(lo) << ',' << csv_number(hi) << ','
         << csv_number(jac);
      if (with_residual) {
        os << ',' << csv_number(std::max({0.0, lo - rm.ac_density[j], rm.ac_density[j] - hi}));
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace lcg
