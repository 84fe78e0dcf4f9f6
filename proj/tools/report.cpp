#include "report.hpp"

namespace lcg::cli {

Report::Report(std::string kind, std::uint64_t seed) : start_(std::chrono::steady_clock::now()) {
  doc_["kind"] = std::move(kind);
  doc_["version"] = LCG_VERSION;
  doc_["seed"] = seed;
  doc_["inputs"] = Json::object();
  doc_["results"] = Json::object();
  doc_["checks"] = Json::array();
}

void Report::add_check(const std::string& name, const Verdict& v, Json extra) {
  Json c{{"name", name}};
  const Json verdict = v;
  for (const auto& [k, val] : verdict.items()) c[k] = val;
  for (const auto& [k, val] : extra.items()) c[k] = val;
  doc_["checks"].push_back(std::move(c));
  all_passed_ = all_passed_ && v.passed;
}

void Report::add_failed_check(const std::string& name, const std::string& error) {
  doc_["checks"].push_back(Json{{"name", name}, {"passed", false}, {"error", error}});
  all_passed_ = false;
}

std::string Report::finish() {
  doc_["status"] = all_passed_ ? "pass" : "fail";
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_);
  doc_["timing"] = Json{{"elapsed_ms", ms.count()}};
  return doc_.dump(2) + "\n";
}

}  // namespace lcg::cli
