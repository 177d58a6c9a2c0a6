#include "linemap/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace linemap::cli {

using nlohmann::json;

Check at_most(std::string name, double value, double tolerance, std::string note) {
  Check c{std::move(name), value, tolerance, Comparison::kAtMost, 0.0, value <= tolerance, std::move(note)};
  return c;
}

Check at_least(std::string name, double value, double tolerance, std::string note) {
  Check c{std::move(name), value, tolerance, Comparison::kAtLeast, 0.0, value >= tolerance, std::move(note)};
  return c;
}

Check within(std::string name, double value, double lower, double upper, std::string note) {
  Check c{std::move(name), value, upper, Comparison::kWithin, lower, lower <= value && value <= upper,
          std::move(note)};
  return c;
}

Check holds(std::string name, bool ok, std::string note) {
  return at_least(std::move(name), ok ? 1.0 : 0.0, 1.0, std::move(note));
}

bool Report::pass() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

const char* comparison_name(Comparison c) {
  switch (c) {
    case Comparison::kAtMost: return "<=";
    case Comparison::kAtLeast: return ">=";
    case Comparison::kWithin: return "within";
  }
  return "?";
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(const json& v, std::ostringstream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      // nlohmann::json objects are std::map backed, so iteration is sorted
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << json(it.key()).dump() << ": ";
        write(it.value(), out, indent + 2);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out << ",\n";
        out << pad;
        write(v[i], out, indent + 2);
      }
      out << "\n" << close_pad << "]";
      return;
    }
    case json::value_t::number_float:
      out << format_double(v.get<double>());
      return;
    default:
      out << v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& value) {
  std::ostringstream out;
  write(value, out, 0);
  out << "\n";
  return out.str();
}

json Report::to_json(bool include_wall_time) const {
  json out = json::object();
  out["scenario"] = scenario;
  out["config"] = config;
  json list = json::array();
  for (const Check& c : checks) {
    json item = json::object();
    item["name"] = c.name;
    item["value"] = c.value;
    item["tolerance"] = c.tolerance;
    item["comparison"] = comparison_name(c.comparison);
    if (c.comparison == Comparison::kWithin) item["lower"] = c.lower;
    item["pass"] = c.pass;
    if (!c.note.empty()) item["note"] = c.note;
    list.push_back(item);
  }
  out["checks"] = list;
  out["details"] = details;
  out["pass"] = pass();
  if (include_wall_time) out["wall_time_seconds"] = wall_time_seconds;
  return out;
}

std::string emit_json(const Report& report, bool include_wall_time) {
  return dump_json(report.to_json(include_wall_time));
}

static std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string emit_text(const Report& report) {
  std::ostringstream out;
  char line[256];
  out << "scenario: " << report.scenario << "\n";
  for (const Check& c : report.checks) {
    std::string bound;
    if (c.comparison == Comparison::kWithin) {
      bound = "[" + short_double(c.lower) + ", " + short_double(c.tolerance) + "]";
    } else {
      bound = std::string(comparison_name(c.comparison)) + " " + short_double(c.tolerance);
    }
    std::snprintf(line, sizeof line, "  %-4s %-44s %-24.6g %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  bound.c_str());
    out << line;
    if (!c.note.empty()) out << "       " << c.note << "\n";
  }
  std::snprintf(line, sizeof line, "overall: %s (%zu checks, %.3f s)\n", report.pass() ? "PASS" : "FAIL",
                report.checks.size(), report.wall_time_seconds);
  out << line;
  return out.str();
}

}  // namespace linemap::cli
