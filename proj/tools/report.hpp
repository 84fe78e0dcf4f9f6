#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "lcg/common.hpp"
#include "lcg/io.hpp"

namespace lcg::cli {

// One JSON document per run. Everything but "timing" is a function of the
// command line and input files.
class Report {
 public:
  Report(std::string kind, std::uint64_t seed);

  Json& inputs() { return doc_["inputs"]; }
  Json& results() { return doc_["results"]; }

  void add_check(const std::string& name, const Verdict& v, Json extra = Json::object());
  void add_failed_check(const std::string& name, const std::string& error);

  bool all_passed() const { return all_passed_; }
  std::string finish();

 private:
  Json doc_;
  bool all_passed_ = true;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lcg::cli
