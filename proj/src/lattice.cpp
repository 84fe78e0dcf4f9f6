#include "lcg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "lcg/errors.hpp"

namespace lcg {

namespace {

int gcd_all(const std::vector<int>& v) {
  int g = 0;
  for (int x : v) g = std::gcd(g, std::abs(x));
  return g;
}

}  // namespace

double chart_proper_time(const int* x, const int* y, int arity, double step) {
  const double dt = y[0] - x[0];
  double dx2 = 0.0;
  for (int k = 1; k < arity; ++k) {
    const double d = y[k] - x[k];
    dx2 += d * d;
  }
  if (dt < 0.0 || dt * dt < dx2) return std::nan("");
  return step * std::sqrt(dt * dt - dx2);
}

CausalLattice::CausalLattice(int spatial_dims, double step, int horizon, std::vector<int> coords,
                             std::vector<double> weights)
    : dims_(spatial_dims), step_(step), horizon_(horizon) {
  if (spatial_dims < 1 || spatial_dims + 1 > kMaxArity) {
    throw InputError("lattice spatial dimension must be 1, 2 or 3");
  }
  if (!(step > 0.0)) throw InputError("lattice step must be positive");
  if (horizon < 1) throw InputError("lattice horizon must be at least 1");
  const int ar = arity();
  if (coords.empty() || coords.size() % static_cast<std::size_t>(ar) != 0) {
    throw InputError("lattice coordinates must hold arity integers per event");
  }
  const std::size_t n = coords.size() / static_cast<std::size_t>(ar);
  if (weights.empty()) weights.assign(n, std::pow(step, ar));
  if (weights.size() != n) throw InputError("one measure weight per event is required");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("measure weights must be >= 0");
  }

  auto less = [&](std::size_t i, std::size_t j) {
    return std::lexicographical_compare(coords.begin() + i * ar, coords.begin() + (i + 1) * ar,
                                        coords.begin() + j * ar, coords.begin() + (j + 1) * ar);
  };
  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i) sorted = less(i - 1, i);
  if (!sorted) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), less);
    std::vector<int> c2(coords.size());
    std::vector<double> w2(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(coords.begin() + perm[i] * ar, coords.begin() + (perm[i] + 1) * ar,
                c2.begin() + i * ar);
      w2[i] = weights[perm[i]];
    }
    coords = std::move(c2);
    weights = std::move(w2);
    for (std::size_t i = 1; i < n; ++i) {
      if (!less(i - 1, i)) throw InputError("lattice contains duplicate events");
    }
  }
  coords_ = std::move(coords);
  weights_ = std::move(weights);

  lo_.assign(ar, 0);
  hi_.assign(ar, 0);
  for (int k = 0; k < ar; ++k) {
    lo_[k] = hi_[k] = coords_[k];
    for (std::size_t i = 0; i < n; ++i) {
      lo_[k] = std::min(lo_[k], coords_[i * ar + k]);
      hi_[k] = std::max(hi_[k], coords_[i * ar + k]);
    }
  }
  t_lo_ = lo_[0];
  t_hi_ = hi_[0];

  double row_count = 1.0;
  for (int k = 0; k + 1 < ar; ++k) row_count *= hi_[k] - lo_[k] + 1.0;
  if (row_count > 5e7) throw InputError("lattice bounding box is too large");
  rows_.assign(static_cast<std::size_t>(row_count), Row{});
  for (std::size_t i = 0; i < n; ++i) {
    const int* c = this->coords(i);
    std::size_t key = 0;
    for (int k = 0; k + 1 < ar; ++k) {
      key = key * static_cast<std::size_t>(hi_[k] - lo_[k] + 1) +
            static_cast<std::size_t>(c[k] - lo_[k]);
    }
    Row& r = rows_[key];
    if (r.count == 0) {
      r.begin = i;
      r.first = c[ar - 1];
    } else if (c[ar - 1] != r.first + static_cast<int>(r.count)) {
      r.contiguous = false;
    }
    ++r.count;
  }

  for (int dt = 1; dt <= horizon; ++dt) {
    std::vector<int> d(ar, -dt);
    d[0] = dt;
    while (true) {
      int dx2 = 0;
      for (int k = 1; k < ar; ++k) dx2 += d[k] * d[k];
      if (dx2 <= dt * dt) {
        stencil_.push_back(StencilStep{d, step * std::sqrt(double(dt * dt - dx2)),
                                       gcd_all(d) == 1});
      }
      int k = ar - 1;
      while (k >= 1 && d[k] == dt) d[k--] = -dt;
      if (k < 1) break;
      ++d[k];
    }
  }
}

std::ptrdiff_t CausalLattice::find(const int* c) const {
  const int ar = arity();
  std::size_t key = 0;
  for (int k = 0; k + 1 < ar; ++k) {
    if (c[k] < lo_[k] || c[k] > hi_[k]) return -1;
    key = key * static_cast<std::size_t>(hi_[k] - lo_[k] + 1) +
          static_cast<std::size_t>(c[k] - lo_[k]);
  }
  const Row& r = rows_[key];
  if (r.count == 0) return -1;
  const int x = c[ar - 1];
  if (r.contiguous) {
    const long off = static_cast<long>(x) - r.first;
    if (off < 0 || off >= static_cast<long>(r.count)) return -1;
    return static_cast<std::ptrdiff_t>(r.begin) + off;
  }
  std::size_t lo = r.begin, hi = r.begin + r.count;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int v = coords_[mid * ar + ar - 1];
    if (v == x) return static_cast<std::ptrdiff_t>(mid);
    if (v < x) lo = mid + 1;
    else hi = mid;
  }
  return -1;
}

namespace {

int grid_index(double value, int resolution, const char* what) {
  const double scaled = value * resolution;
  const double r = std::round(scaled);
  if (std::abs(scaled - r) > 1e-6) {
    throw InputError(std::string(what) + " must be a multiple of the lattice step");
  }
  return static_cast<int>(r);
}

}  // namespace

CausalLattice build_lattice(const LatticeSpec& spec) {
  if (spec.resolution < 1) throw InputError("lattice resolution must be positive");
  if (spec.spatial_dims < 1 || spec.spatial_dims > 3) {
    throw InputError("lattice spatial dimension must be 1, 2 or 3");
  }
  if (!(spec.t_min < spec.t_max)) throw InputError("lattice time range must be nonempty");
  if (spec.region != "box" && spec.region != "cone" && spec.region != "cap") {
    throw InputError("unknown lattice region '" + spec.region + "'");
  }
  if (spec.region == "cone" && !(spec.cone_speed > 0.0 && spec.cone_speed <= 1.0)) {
    throw InputError("cone speed must lie in (0, 1]");
  }
  if (spec.region == "cone" && !(spec.max_radius > 0.0)) {
    throw InputError("cone radius must be positive");
  }
  if (spec.region == "cap" && !(std::abs(spec.cap_slope) < 1.0)) {
    throw InputError("cap slope must be below 1 to keep the cap spacelike");
  }
  const int res = spec.resolution;
  const double h = 1.0 / res;
  const int t0 = grid_index(spec.t_min, res, "t_min");
  const int t1 = grid_index(spec.t_max, res, "t_max");
  const int X = static_cast<int>(std::floor(spec.x_extent * res + 1e-9));
  if (X < 0) throw InputError("lattice spatial extent must be nonnegative");
  const int d = spec.spatial_dims;

  std::vector<int> coords;
  std::vector<int> x(d, -X);
  for (int t = t0; t <= t1; ++t) {
    std::fill(x.begin(), x.end(), -X);
    while (true) {
      long r2 = 0;
      for (int v : x) r2 += static_cast<long>(v) * v;
      bool keep = true;
      if (spec.region == "cone") {
        const double dt = t - t0;
        const double lim = spec.cone_speed * dt;
        keep = double(r2) <= lim * lim * (1.0 + 1e-12) &&
               (dt * dt - double(r2)) * h * h <= spec.max_radius * spec.max_radius * (1.0 + 1e-12);
      } else if (spec.region == "cap") {
        keep = t * h <= spec.cap_height - spec.cap_slope * std::sqrt(double(r2)) * h + 1e-9 * h;
      }
      if (keep) {
        coords.push_back(t);
        coords.insert(coords.end(), x.begin(), x.end());
      }
      int k = d - 1;
      while (k >= 0 && x[k] == X) x[k--] = -X;
      if (k < 0) break;
      ++x[k];
    }
  }
  if (coords.empty()) throw InputError("lattice region contains no events");
  CausalLattice lat(d, h, spec.horizon, std::move(coords));
  lat.set_censored_boundary(spec.region == "cone");
  return lat;
}

std::vector<std::size_t> select_sigma(const CausalLattice& lattice, const std::string& expr) {
  std::vector<std::size_t> out;
  const int ar = lattice.arity();
  if (expr == "apex") {
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const int* c = lattice.coords(i);
      if (c[0] != lattice.min_time_index()) break;
      bool origin = true;
      for (int k = 1; k < ar; ++k) origin = origin && c[k] == 0;
      if (origin) out.push_back(i);
    }
    if (out.empty()) throw InputError("lattice has no apex event at the spatial origin");
    return out;
  }
  if (expr.rfind("t=", 0) == 0) {
    double t = 0.0;
    std::size_t used = 0;
    try {
      t = std::stod(expr.substr(2), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != expr.size() - 2) {
      throw InputError("cannot parse sigma expression '" + expr + "'");
    }
    const double scaled = t / lattice.step();
    const int it = static_cast<int>(std::lround(scaled));
    if (std::abs(scaled - it) > 1e-6) {
      throw InputError("sigma time must be a multiple of the lattice step");
    }
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      if (lattice.coords(i)[0] == it) out.push_back(i);
    }
    if (out.empty()) throw InputError("sigma slice contains no events");
    return out;
  }
  throw InputError("unknown sigma expression '" + expr + "' (use t=<value> or apex)");
}

bool LatticeDistance::reachable(std::size_t i) const { return !std::isnan(l[i]); }

namespace {

void check_achronal(const CausalLattice& lat, const std::vector<std::size_t>& sigma) {
  const int ar = lat.arity();
  bool same_time = true;
  for (std::size_t s : sigma) {
    if (s >= lat.size()) throw InputError("sigma index out of range");
    same_time = same_time && lat.coords(s)[0] == lat.coords(sigma.front())[0];
  }
  if (same_time) return;
  for (std::size_t a = 0; a < sigma.size(); ++a) {
    for (std::size_t b = a + 1; b < sigma.size(); ++b) {
      const int* x = lat.coords(sigma[a]);
      const int* y = lat.coords(sigma[b]);
      const long dt = y[0] - x[0];
      long dx2 = 0;
      for (int k = 1; k < ar; ++k) dx2 += static_cast<long>(y[k] - x[k]) * (y[k] - x[k]);
      if (dt != 0 && dt * dt > dx2) {
        throw InputError("sigma is not achronal: events " + std::to_string(sigma[a]) + " and " +
                         std::to_string(sigma[b]) + " are chronologically related");
      }
    }
  }
}

}  // namespace

std::vector<double> lattice_distance_to_set(const CausalLattice& lattice,
                                            const std::vector<std::size_t>& targets) {
  const std::size_t n = lattice.size();
  std::vector<double> b(n, -kInf);
  std::vector<char> is_target(n, 0);
  int latest = lattice.min_time_index();
  for (std::size_t s : targets) {
    if (s >= n) throw InputError("target index out of range");
    b[s] = 0.0;
    is_target[s] = 1;
    latest = std::max(latest, lattice.coords(s)[0]);
  }
  for (std::size_t i = n; i-- > 0;) {
    if (is_target[i] || lattice.coords(i)[0] > latest) continue;
    double best = -kInf;
    lattice.for_each_successor(i, [&](std::size_t j, const StencilStep& s) {
      if (b[j] > -kInf) best = std::max(best, b[j] + s.tau);
    });
    b[i] = best;
  }
  return b;
}

LatticeDistance lattice_lorentz_distance(const CausalLattice& lattice,
                                         const std::vector<std::size_t>& sigma) {
  if (sigma.empty()) throw InputError("sigma selects no events");
  check_achronal(lattice, sigma);
  const std::size_t n = lattice.size();
  std::vector<double> f(n, -kInf);
  std::vector<char> in_sigma(n, 0);
  int earliest = lattice.max_time_index();
  for (std::size_t s : sigma) {
    f[s] = 0.0;
    in_sigma[s] = 1;
    earliest = std::min(earliest, lattice.coords(s)[0]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (in_sigma[i] || lattice.coords(i)[0] < earliest) continue;
    double best = -kInf;
    lattice.for_each_predecessor(i, [&](std::size_t j, const StencilStep& s) {
      if (f[j] > -kInf) best = std::max(best, f[j] + s.tau);
    });
    f[i] = best;
  }
  const auto b = lattice_distance_to_set(lattice, sigma);
  LatticeDistance out;
  out.l.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] > -kInf) out.l[i] = f[i];
    else if (b[i] > -kInf) out.l[i] = -b[i];
    else out.l[i] = std::nan("");
  }
  return out;
}

namespace {

struct Seed {
  std::size_t event;
  std::size_t origin;
  std::array<double, CausalLattice::kMaxArity> dir{};
};

std::vector<Seed> collect_seeds(const CausalLattice& lat, const std::vector<std::size_t>& sigma,
                                const LatticeDistance& dist) {
  std::vector<Seed> seeds;
  const double tol = 1e-9 * lat.step();
  if (sigma.size() > 1) {
    auto sorted = sigma;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t s : sorted) {
      Seed sd{s, s, {}};
      sd.dir[0] = 1.0;
      seeds.push_back(sd);
    }
    return seeds;
  }
  const std::size_t apex = sigma.front();
  lat.for_each_successor(apex, [&](std::size_t j, const StencilStep& s) {
    if (!s.primitive || !(s.tau > 0.0)) return;
    if (!(dist.l[j] >= dist.l[apex] + s.tau - tol)) return;
    Seed sd{j, apex, {}};
    for (int k = 0; k < lat.arity(); ++k) sd.dir[k] = s.delta[k];
    seeds.push_back(sd);
  });
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.event < b.event; });
  return seeds;
}

double line_distance2(const CausalLattice& lat, std::size_t e, const Seed& sd) {
  const int ar = lat.arity();
  const int* p = lat.coords(e);
  const int* o = lat.coords(sd.origin);
  double dd = 0.0, pd = 0.0, pp = 0.0;
  for (int k = 0; k < ar; ++k) {
    const double v = p[k] - o[k];
    dd += sd.dir[k] * sd.dir[k];
    pd += v * sd.dir[k];
    pp += v * v;
  }
  return pp - pd * pd / dd;
}

std::vector<std::size_t> walk(const CausalLattice& lat, const LatticeDistance& dist,
                              const Seed& sd, std::size_t start, bool forward) {
  const double tol = 1e-9 * lat.step();
  std::vector<std::size_t> out;
  std::size_t x = start;
  while (true) {
    std::ptrdiff_t best = -1;
    double best_d = kInf;
    auto consider = [&](std::size_t j, const StencilStep& s) {
      if (!(s.tau > 0.0) || !dist.reachable(j)) return;
      const double gain = forward ? dist.l[j] - dist.l[x] : dist.l[x] - dist.l[j];
      if (!(gain >= s.tau - tol)) return;
      const double d = line_distance2(lat, j, sd);
      if (d < best_d - 1e-12 ||
          (std::abs(d - best_d) <= 1e-12 && static_cast<std::ptrdiff_t>(j) < best)) {
        best = static_cast<std::ptrdiff_t>(j);
        best_d = d;
      }
    };
    if (forward) lat.for_each_successor(x, consider);
    else lat.for_each_predecessor(x, consider);
    if (best < 0) break;
    x = static_cast<std::size_t>(best);
    out.push_back(x);
  }
  return out;
}

double segment_distance2(const int* p, const std::array<double, 4>& a,
                         const std::array<double, 4>& ab, double ab2, int ar) {
  double t = 0.0;
  if (ab2 > 0.0) {
    for (int k = 0; k < ar; ++k) t += (p[k] - a[k]) * ab[k];
    t = std::max(t / ab2, 0.0);
  }
  double d2 = 0.0;
  for (int k = 0; k < ar; ++k) {
    const double v = p[k] - (a[k] + t * ab[k]);
    d2 += v * v;
  }
  return d2;
}

}  // namespace

std::size_t available_seeds(const CausalLattice& lattice, const std::vector<std::size_t>& sigma,
                            const LatticeDistance& distance) {
  return collect_seeds(lattice, sigma, distance).size();
}

LatticeExtraction lattice_extract_rays(const CausalLattice& lattice,
                                       const std::vector<std::size_t>& sigma,
                                       const LatticeDistance& distance, std::size_t count,
                                       std::uint64_t seed) {
  if (sigma.empty()) throw InputError("sigma selects no events");
  if (distance.l.size() != lattice.size()) {
    throw InputError("distance field does not match the lattice");
  }
  const auto seeds = collect_seeds(lattice, sigma, distance);
  if (count < 1 || count > seeds.size()) {
    throw InputError("ray count " + std::to_string(count) + " exceeds the " +
                     std::to_string(seeds.size()) + " available seeds");
  }
  std::vector<Seed> chosen;
  if (count == seeds.size()) {
    chosen = seeds;
  } else {
    std::mt19937_64 rng(seed);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t k = 0; k < count; ++k) {
      const auto idx = static_cast<std::size_t>((static_cast<double>(k) + u) *
                                                static_cast<double>(seeds.size()) /
                                                static_cast<double>(count));
      chosen.push_back(seeds[std::min(idx, seeds.size() - 1)]);
    }
  }

  const int ar = lattice.arity();
  const int t_lo = lattice.min_time_index();
  const int t_hi = lattice.max_time_index();
  LatticeExtraction ex;
  for (const Seed& sd : chosen) {
    LatticeRay ray;
    auto back = walk(lattice, distance, sd, sd.event, false);
    std::reverse(back.begin(), back.end());
    ray.chain = back;
    ray.chain.push_back(sd.event);
    const auto fwd = walk(lattice, distance, sd, sd.event, true);
    ray.chain.insert(ray.chain.end(), fwd.begin(), fwd.end());
    ray.sigma_event = sd.origin;
    const int first_t = lattice.coords(ray.chain.front())[0];
    const int last_t = lattice.coords(ray.chain.back())[0];
    ray.final_present = !lattice.censored_boundary() && last_t < t_hi;
    ray.initial_present =
        first_t > t_lo || (sigma.size() == 1 && ray.chain.front() == sigma.front());
    ex.rays.push_back(std::move(ray));
  }

  // Nearest-ray assignment by chart distance to the half-line from the chain's
  // first event through its last.
  const std::size_t n = lattice.size();
  const std::size_t R = ex.rays.size();
  std::vector<std::array<double, 4>> A(R), AB(R);
  std::vector<double> AB2(R);
  bool vertical = true;
  for (std::size_t r = 0; r < R; ++r) {
    const int* a = lattice.coords(ex.rays[r].chain.front());
    const int* b = lattice.coords(ex.rays[r].chain.back());
    AB2[r] = 0.0;
    for (int k = 0; k < ar; ++k) {
      A[r][k] = a[k];
      AB[r][k] = b[k] - a[k];
      AB2[r] += AB[r][k] * AB[r][k];
      if (k > 0 && a[k] != b[k]) vertical = false;
    }
  }
  std::map<std::vector<int>, std::int32_t> columns;
  if (vertical) {
    for (std::size_t r = 0; r < R; ++r) {
      const int* a = lattice.coords(ex.rays[r].chain.front());
      columns.emplace(std::vector<int>(a + 1, a + ar), static_cast<std::int32_t>(r));
    }
  }
  ex.owner.assign(n, -1);
  std::vector<int> key(ar - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!distance.reachable(i)) continue;
    const int* p = lattice.coords(i);
    if (vertical) {
      std::copy(p + 1, p + ar, key.begin());
      const auto it = columns.find(key);
      if (it != columns.end()) {
        ex.owner[i] = it->second;
        continue;
      }
    }
    double best = kInf;
    for (std::size_t r = 0; r < R; ++r) {
      const double d2 = segment_distance2(p, A[r], AB[r], AB2[r], ar);
      if (d2 < best) {
        best = d2;
        ex.owner[i] = static_cast<std::int32_t>(r);
      }
    }
  }

  // Bin owned mass along each ray in windows of two lattice steps.
  const double w = 2.0 * lattice.step();
  ex.bin_width = w;
  const double tol = 1e-9 * w;
  std::vector<std::vector<std::pair<double, double>>> owned(R);
  for (std::size_t i = 0; i < n; ++i) {
    if (ex.owner[i] >= 0) owned[ex.owner[i]].emplace_back(distance.l[i], lattice.measure_weight(i));
  }
  struct Binned {
    RayDensity density;
    bool has_offset;
  };
  std::vector<Binned> kept;
  std::vector<std::size_t> kept_index;
  for (std::size_t r = 0; r < R; ++r) {
    const LatticeRay& ray = ex.rays[r];
    const double a = distance.l[ray.chain.front()];
    const double b = distance.l[ray.chain.back()];
    enum { centered, forward, backward } mode = forward;
    if (a < -tol && b > tol) mode = centered;
    else if (ray.final_present) mode = backward;
    long kmin = 0, kmax = 0;
    if (mode == centered) {
      kmin = static_cast<long>(std::ceil(a / w + 0.5 - 1e-9));
      kmax = static_cast<long>(std::floor(b / w - 0.5 + 1e-9));
    } else {
      kmax = static_cast<long>(std::floor((b - a) / w - 0.5 + 1e-9));
    }
    auto bin_of = [&](double l) -> long {
      if (mode == centered) return static_cast<long>(std::floor(l / w + 0.5 + 1e-9));
      if (mode == forward) return static_cast<long>(std::floor((l - a) / w + 0.5 + 1e-9));
      return static_cast<long>(std::floor((b - l) / w + 0.5 + 1e-9));
    };
    if (kmax - kmin + 1 < 3) {
      for (const auto& [l, m] : owned[r]) ex.dropped_mass += m;
      continue;
    }
    std::vector<double> mass(static_cast<std::size_t>(kmax - kmin + 1), 0.0);
    for (const auto& [l, m] : owned[r]) {
      const long k = bin_of(l);
      if (l < a - tol || l > b + tol || k < kmin || k > kmax) {
        ex.dropped_mass += m;
        continue;
      }
      mass[static_cast<std::size_t>(k - kmin)] += m;
    }
    std::vector<double> vals(mass.size());
    for (std::size_t j = 0; j < mass.size(); ++j) {
      const bool half = mode != centered && j == 0;
      vals[j] = mass[j] / (half ? 0.5 * w : w);
    }
    RayDensity h;
    h.step = w;
    h.open_left = !ray.initial_present;
    h.open_right = !ray.final_present;
    if (mode == backward) {
      std::reverse(vals.begin(), vals.end());
      h.b = b;
      h.a = b - static_cast<double>(kmax) * w;
    } else if (mode == forward) {
      h.a = a;
      h.b = a + static_cast<double>(kmax) * w;
    } else {
      h.a = static_cast<double>(kmin) * w;
      h.b = static_cast<double>(kmax) * w;
    }
    h.values = std::move(vals);
    const bool has_offset = h.a <= tol && h.b >= -tol;
    kept.push_back(Binned{std::move(h), has_offset});
    kept_index.push_back(r);
  }
  if (kept.empty()) throw InputError("no extracted ray is long enough to bin");

  std::vector<LatticeRay> kept_rays;
  std::vector<std::int32_t> remap(R, -1);
  for (std::size_t j = 0; j < kept_index.size(); ++j) {
    remap[kept_index[j]] = static_cast<std::int32_t>(j);
    kept_rays.push_back(ex.rays[kept_index[j]]);
  }
  for (auto& o : ex.owner) {
    if (o >= 0) o = remap[o];
  }
  ex.rays = std::move(kept_rays);

  const double K = static_cast<double>(kept.size());
  Disintegration& d = ex.disintegration;
  d.N = lattice.spatial_dims() + 1.0;
  d.kappa = CurvaturePotential::constant(0.0);
  for (auto& bn : kept) {
    for (double& v : bn.density.values) v *= K;
    Ray ray;
    ray.weight = 1.0 / K;
    if (bn.has_offset) ray.slice_offset = std::clamp(0.0, bn.density.a, bn.density.b);
    ray.density = std::move(bn.density);
    d.rays.push_back(std::move(ray));
  }
  return ex;
}

SlopeSummary constant_slope_residual(const LatticeExtraction& extraction,
                                     const CausalLattice& lattice,
                                     const LatticeDistance& distance, std::size_t window) {
  if (window < 1) throw InputError("slope window must be at least one step");
  std::vector<double> q;
  for (const auto& ray : extraction.rays) {
    for (std::size_t i = 0; i + window < ray.chain.size(); i += window) {
      const std::size_t x = ray.chain[i], y = ray.chain[i + window];
      const double tau =
          chart_proper_time(lattice.coords(x), lattice.coords(y), lattice.arity(), lattice.step());
      if (tau > 0.0) q.push_back((distance.l[y] - distance.l[x]) / tau);
    }
  }
  return summarize(q);
}

double lattice_tube_volume(const CausalLattice& lattice, const LatticeDistance& distance,
                           double s, double t) {
  if (!(s < t)) throw InputError("tube volume needs s < t");
  // Distances are sums of step lengths; snap comparisons to the grid.
  const double tol = 1e-9 * lattice.step();
  double sum = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const double l = distance.l[i];
    if (l >= s - tol && l < t - tol) sum += lattice.measure_weight(i);
  }
  return sum;
}

}  // namespace lcg
