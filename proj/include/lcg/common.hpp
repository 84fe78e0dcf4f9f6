#pragma once

#include <limits>
#include <string>
#include <vector>

namespace lcg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Outcome of an inequality check. worst_violation is the largest amount by
// which the checked inequality failed (negative when it held with slack).
struct Verdict {
  bool passed = true;
  double worst_violation = -kInf;
  std::vector<double> witness;
  std::string note;

  void record(double violation, std::vector<double> where) {
    if (violation > worst_violation) {
      worst_violation = violation;
      witness = std::move(where);
    }
  }
  void finalize(double tol) { passed = !(worst_violation > tol); }
};

// Uniformly sampled function on [0, step * (values.size() - 1)].
struct SampledFunction {
  double step = 0.0;
  std::vector<double> values;
};

}  // namespace lcg
