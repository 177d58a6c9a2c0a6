#include "linemap/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "linemap/error.hpp"

namespace linemap::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::kConfig, message); }

double read_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key + ": expected a number");
  return v.get<double>();
}

long read_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key + ": expected an integer");
  return v.get<long>();
}

}  // namespace

void require_keys(const json& object, const std::string& where, const std::vector<std::string>& allowed) {
  if (!object.is_object()) fail(where + ": expected an object");
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      std::string list;
      for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(where + ": unknown key '" + it.key() + "' (allowed: " + list + ")");
    }
  }
}

json ScenarioConfig::to_json() const {
  json out = json::object();
  out["scenario"] = scenario;
  if (n) out["n"] = *n;
  out["seed"] = seed;
  if (steps) out["steps"] = *steps;
  json tol = json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  out["tolerances"] = tol;
  out["parameters"] = parameters;
  return out;
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  require_keys(doc, "config", {"scenario", "n", "seed", "steps", "tolerances", "parameters"});

  ScenarioConfig cfg;
  if (!doc.contains("scenario") || !doc["scenario"].is_string()) fail("scenario: required string");
  cfg.scenario = doc["scenario"].get<std::string>();
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), cfg.scenario) == names.end()) {
    fail("scenario: unknown name '" + cfg.scenario + "'");
  }
  if (doc.contains("n")) {
    const long n = read_integer(doc["n"], "n");
    if (n < 1 || n > 64) fail("n: must be between 1 and 64");
    cfg.n = static_cast<int>(n);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long>() >= 0)) {
      fail("seed: expected a non-negative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("steps")) {
    const long steps = read_integer(doc["steps"], "steps");
    if (steps < 2 || steps > 10'000'000) fail("steps: must be between 2 and 10000000");
    cfg.steps = static_cast<int>(steps);
  }
  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    if (!tol.is_object()) fail("tolerances: expected an object");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      const double v = read_number(it.value(), "tolerances." + it.key());
      if (!(v >= 0.0)) fail("tolerances." + it.key() + ": must be non-negative");
      cfg.tolerances[it.key()] = v;
    }
  }
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) fail("parameters: expected an object");
    cfg.parameters = doc["parameters"];
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, path + ": " + std::string(e.what()).substr(std::string("config error: ").size()));
  }
}

Matrix read_matrix(const json& value, const std::string& key, long rows, long cols) {
  if (!value.is_array() || static_cast<long>(value.size()) != rows) {
    fail(key + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix (list of rows)");
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long>(row.size()) != cols) {
      fail(key + "[" + std::to_string(i) + "]: expected a row of " + std::to_string(cols) + " numbers");
    }
    for (long j = 0; j < cols; ++j) {
      m(i, j) = read_number(row[static_cast<std::size_t>(j)], key + "[" + std::to_string(i) + "][" +
                                                                  std::to_string(j) + "]");
    }
  }
  return m;
}

Vector read_vector(const json& value, const std::string& key, long size) {
  if (!value.is_array() || static_cast<long>(value.size()) != size) {
    fail(key + ": expected a list of " + std::to_string(size) + " numbers");
  }
  Vector v(size);
  for (long i = 0; i < size; ++i) {
    v(i) = read_number(value[static_cast<std::size_t>(i)], key + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<int> read_signature(const json& value, const std::string& key, long size) {
  if (!value.is_array() || static_cast<long>(value.size()) != size) {
    fail(key + ": expected a list of " + std::to_string(size) + " entries of +1/-1");
  }
  std::vector<int> sig;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const long s = read_integer(value[i], key + "[" + std::to_string(i) + "]");
    if (s != 1 && s != -1) fail(key + "[" + std::to_string(i) + "]: must be +1 or -1");
    sig.push_back(static_cast<int>(s));
  }
  return sig;
}

MatrixPolynomial read_polynomial(const json& value, const std::string& key, long rows, long cols) {
  if (!value.is_array() || value.empty()) fail(key + ": expected a non-empty list of coefficient matrices");
  if (static_cast<int>(value.size()) - 1 > MatrixPolynomial::kMaxConfigDegree) {
    fail(key + ": degree above " + std::to_string(MatrixPolynomial::kMaxConfigDegree));
  }
  std::vector<Matrix> coeffs;
  for (std::size_t k = 0; k < value.size(); ++k) {
    coeffs.push_back(read_matrix(value[k], key + "[" + std::to_string(k) + "]", rows, cols));
  }
  return MatrixPolynomial(std::move(coeffs));
}

}  // namespace linemap::cli
