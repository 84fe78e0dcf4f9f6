#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lcg/disintegration.hpp"

namespace lcg {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Integer offset (dt, dx...) to a causally related neighbour and its proper time.
struct StencilStep {
  std::vector<int> delta;
  double tau = 0.0;
  bool primitive = false;
};

// Events on an integer grid in a Minkowski chart, scaled by `step`.
// Coordinate 0 is time. Edges are implicit: every causal offset with
// 1 <= dt <= horizon that lands on another event.
class CausalLattice {
 public:
  static constexpr int kMaxArity = 4;

  // `coords` holds (spatial_dims + 1) integers per event. Empty weights mean
  // each event carries the cell volume step^(spatial_dims + 1).
  CausalLattice(int spatial_dims, double step, int horizon, std::vector<int> coords,
                std::vector<double> weights = {});

  std::size_t size() const { return weights_.size(); }
  int spatial_dims() const { return dims_; }
  int arity() const { return dims_ + 1; }
  double step() const { return step_; }
  int horizon() const { return horizon_; }
  const int* coords(std::size_t i) const { return coords_.data() + i * arity(); }
  double time(std::size_t i) const { return coords(i)[0] * step_; }
  double measure_weight(std::size_t i) const { return weights_[i]; }
  int min_time_index() const { return t_lo_; }
  int max_time_index() const { return t_hi_; }
  const std::vector<StencilStep>& stencil() const { return stencil_; }
  // When set, every ray termination is a truncation and no final point is
  // flagged; otherwise terminations below the last time row are final points.
  bool censored_boundary() const { return censored_; }
  void set_censored_boundary(bool v) { censored_ = v; }

  // Index of the event at integer coordinates c, if present.
  std::ptrdiff_t find(const int* c) const;

  template <class F>
  void for_each_successor(std::size_t i, F&& f) const {
    const int* c = coords(i);
    std::array<int, kMaxArity> y{};
    for (const auto& s : stencil_) {
      for (int k = 0; k < arity(); ++k) y[k] = c[k] + s.delta[k];
      const auto j = find(y.data());
      if (j >= 0) f(static_cast<std::size_t>(j), s);
    }
  }

  template <class F>
  void for_each_predecessor(std::size_t i, F&& f) const {
    const int* c = coords(i);
    std::array<int, kMaxArity> y{};
    for (const auto& s : stencil_) {
      for (int k = 0; k < arity(); ++k) y[k] = c[k] - s.delta[k];
      const auto j = find(y.data());
      if (j >= 0) f(static_cast<std::size_t>(j), s);
    }
  }

 private:
  struct Row {
    std::size_t begin = 0;
    std::size_t count = 0;
    int first = 0;
    bool contiguous = true;
  };

  int dims_;
  double step_;
  int horizon_;
  std::vector<int> coords_;
  std::vector<double> weights_;
  std::vector<StencilStep> stencil_;
  std::vector<int> lo_;
  std::vector<int> hi_;
  std::vector<Row> rows_;
  int t_lo_ = 0;
  int t_hi_ = 0;
  bool censored_ = false;
};

// Proper time between chart points given in grid units; NaN if not causal.
double chart_proper_time(const int* x, const int* y, int arity, double step);

struct LatticeSpec {
  int spatial_dims = 1;
  int resolution = 50;
  double t_min = 0.0;
  double t_max = 1.0;
  double x_extent = 1.0;
  int horizon = 3;
  // box | cone | cap. The cone keeps |x| <= cone_speed (t - t_min) and proper
  // time from the apex at most max_radius; the cap keeps
  // t <= cap_height - cap_slope |x|.
  std::string region = "box";
  double cone_speed = 1.0;
  double max_radius = kInf;
  double cap_height = 1.0;
  double cap_slope = 0.0;
  // "t=<value>" or "apex"
  std::string sigma = "t=0";

  bool operator==(const LatticeSpec&) const = default;
};

CausalLattice build_lattice(const LatticeSpec& spec);
std::vector<std::size_t> select_sigma(const CausalLattice& lattice, const std::string& expr);

// Signed longest-chain distance to sigma: positive on its causal future,
// negative on its past, NaN where unreachable.
struct LatticeDistance {
  std::vector<double> l;
  bool reachable(std::size_t i) const;
};

LatticeDistance lattice_lorentz_distance(const CausalLattice& lattice,
                                         const std::vector<std::size_t>& sigma);

// Longest chain from each event into `targets` (0 on targets, -inf if none).
std::vector<double> lattice_distance_to_set(const CausalLattice& lattice,
                                            const std::vector<std::size_t>& targets);

struct LatticeRay {
  std::vector<std::size_t> chain;
  std::size_t sigma_event = 0;
  bool initial_present = false;
  bool final_present = false;
};

struct LatticeExtraction {
  Disintegration disintegration;
  std::vector<LatticeRay> rays;
  // Owning ray per event, -1 when unassigned.
  std::vector<std::int32_t> owner;
  double bin_width = 0.0;
  double dropped_mass = 0.0;
};

LatticeExtraction lattice_extract_rays(const CausalLattice& lattice,
                                       const std::vector<std::size_t>& sigma,
                                       const LatticeDistance& distance, std::size_t count,
                                       std::uint64_t seed = kDefaultSeed);

// Number of seeds lattice_extract_rays can draw from.
std::size_t available_seeds(const CausalLattice& lattice, const std::vector<std::size_t>& sigma,
                            const LatticeDistance& distance);

// Quotients of distance increments over chart proper time along each chain,
// over windows of `window` chain steps.
SlopeSummary constant_slope_residual(const LatticeExtraction& extraction,
                                     const CausalLattice& lattice,
                                     const LatticeDistance& distance, std::size_t window = 4);

// Measure of events with s <= l < t.
double lattice_tube_volume(const CausalLattice& lattice, const LatticeDistance& distance,
                           double s, double t);

}  // namespace lcg
