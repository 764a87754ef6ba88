#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gqw {

struct CheckResult {
  std::string id;
  std::string anchor;  // the statement being checked
  bool passed = false;
  double residual = 0.0;
  int n_samples = 0;
  std::string note;
  double elapsed_ms = 0.0;
};

struct Report {
  std::string suite;
  std::vector<CheckResult> checks;
  double elapsed_ms = 0.0;

  [[nodiscard]] bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  [[nodiscard]] int failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed ? 0 : 1;
    return n;
  }

  void append(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    elapsed_ms += other.elapsed_ms;
  }
};

/// Timing fields are opt-in so that reports are byte-identical across runs.
inline nlohmann::ordered_json to_json(const Report& r, bool timing = false) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["anchor"] = c.anchor;
    j["status"] = c.passed ? "pass" : "fail";
    if (std::isfinite(c.residual))
      j["residual"] = c.residual;
    else
      j["residual"] = nullptr;
    j["n_samples"] = c.n_samples;
    if (!c.note.empty()) j["note"] = c.note;
    if (timing) j["elapsed_ms"] = c.elapsed_ms;
    checks.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["suite"] = r.suite;
  out["checks"] = std::move(checks);
  if (timing) out["elapsed_ms"] = r.elapsed_ms;
  return out;
}

inline std::string to_text(const Report& r, bool timing = false) {
  std::ostringstream out;
  for (const auto& c : r.checks) {
    char residual[32];
    std::snprintf(residual, sizeof residual, "%.3e", c.residual);
    out << (c.passed ? "PASS " : "FAIL ") << c.id << "  residual=" << residual << "  n=" << c.n_samples;
    if (timing) out << "  " << static_cast<long>(std::lround(c.elapsed_ms)) << "ms";
    out << "\n     " << c.anchor << '\n';
    if (!c.note.empty()) out << "     " << c.note << '\n';
  }
  out << r.suite << ": " << (r.checks.size() - static_cast<std::size_t>(r.failures())) << '/' << r.checks.size()
      << " checks passed";
  if (timing) out << " in " << static_cast<long>(std::lround(r.elapsed_ms)) << "ms";
  out << '\n';
  return out.str();
}

}  // namespace gqw
