#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "famdyn/sphere.hpp"
#include "json.hpp"

namespace famdyn {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Uniform result record for every analysis. Serialized with a fixed key
/// order — property, verdict, params, witnesses, notes, tool_version, seed —
/// so identical runs produce byte-identical output.
struct AnalysisReport {
  std::string property;
  std::string verdict;
  ojson params = ojson::object();
  ojson witnesses = ojson::array();
  std::vector<std::string> notes;
  std::uint64_t seed = 0;

  ojson to_json() const;
  std::string str() const;  // indented dump, trailing newline
  void write(const std::string& path) const;
};

AnalysisReport make_report(const std::string& property, std::uint64_t seed);

/// Error rendering used by the CLI: {"error","message","offset"}.
std::string error_json(const Error& e);

ojson json_point(const XC& z);  // point as its canonical string form

}  // namespace famdyn
