#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "linemap/linalg.hpp"
#include "linemap/polynomial.hpp"

namespace linemap::cli {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"flat-map-verify", "riccati-family", "embed-check",
                                                 "calabi-curvature", "reduction-check"};
  return names;
}

struct ScenarioConfig {
  std::string scenario;
  std::optional<int> n;
  std::uint64_t seed = 1;
  std::optional<int> steps;
  std::map<std::string, double> tolerances;
  nlohmann::json parameters = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Parses and validates a config document. Config errors carry the line and
// column for syntax problems and the key path for schema problems.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Typed readers for `parameters`; `key` is used in error messages.
Matrix read_matrix(const nlohmann::json& value, const std::string& key, long rows, long cols);
Vector read_vector(const nlohmann::json& value, const std::string& key, long size);
std::vector<int> read_signature(const nlohmann::json& value, const std::string& key, long size);
// A list of coefficient matrices, lowest degree first, degree <= 8.
MatrixPolynomial read_polynomial(const nlohmann::json& value, const std::string& key, long rows, long cols);

// Rejects keys of `object` outside `allowed`.
void require_keys(const nlohmann::json& object, const std::string& where, const std::vector<std::string>& allowed);

}  // namespace linemap::cli
