#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace linemap::cli {

enum class Comparison {
  kAtMost,   // value <= tolerance
  kAtLeast,  // value >= tolerance
  kWithin,   // lower <= value <= tolerance
};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::kAtMost;
  double lower = 0.0;  // kWithin only
  bool pass = false;
  std::string note;
};

Check at_most(std::string name, double value, double tolerance, std::string note = {});
Check at_least(std::string name, double value, double tolerance, std::string note = {});
Check within(std::string name, double value, double lower, double upper, std::string note = {});
// A pass/fail fact with no numeric bound (value 1 for true, 0 for false).
Check holds(std::string name, bool ok, std::string note = {});

struct Report {
  std::string scenario;
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();
  double wall_time_seconds = 0.0;

  bool pass() const;
  nlohmann::json to_json(bool include_wall_time = false) const;
};

// Sorted keys, two-space indent, floats with 17 significant digits and
// non-finite numbers as null. Identical input gives identical bytes.
std::string dump_json(const nlohmann::json& value);

std::string emit_json(const Report& report, bool include_wall_time = false);
std::string emit_text(const Report& report);

}  // namespace linemap::cli
