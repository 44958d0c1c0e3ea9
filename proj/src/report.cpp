#include "famdyn/report.hpp"

#include <fstream>

namespace famdyn {

AnalysisReport make_report(const std::string& property, std::uint64_t seed) {
  AnalysisReport r;
  r.property = property;
  r.seed = seed;
  return r;
}

ojson AnalysisReport::to_json() const {
  ojson j = ojson::object();
  j["property"] = property;
  j["verdict"] = verdict;
  j["params"] = params;
  j["witnesses"] = witnesses;
  j["notes"] = notes;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  return j;
}

std::string AnalysisReport::str() const { return to_json().dump(2) + "\n"; }

void AnalysisReport::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << str();
}

std::string error_json(const Error& e) {
  ojson j = ojson::object();
  j["error"] = errc_name(e.code);
  j["message"] = e.what();
  if (e.offset >= 0) j["offset"] = e.offset;
  return j.dump() + "\n";
}

ojson json_point(const XC& z) { return format_point(z); }

}  // namespace famdyn
