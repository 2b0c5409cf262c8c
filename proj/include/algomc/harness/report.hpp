#pragma once

#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "algomc/harness/config.hpp"

#ifndef ALGOMC_VERSION
#define ALGOMC_VERSION "0.0.0"
#endif

namespace algomc::harness {

inline constexpr const char* kVersion = ALGOMC_VERSION;

// How a metric's reference value was obtained.
enum class Provenance { kExact, kOracle, kMonteCarlo, kEstimate, kInfo };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kExact: return "exact";
    case Provenance::kOracle: return "oracle";
    case Provenance::kMonteCarlo: return "monte-carlo";
    case Provenance::kEstimate: return "estimate";
    case Provenance::kInfo: return "info";
  }
  return "?";
}

struct Metric {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "~=", "==", or "" for informational values
  std::optional<double> reference;
  std::optional<double> tolerance;
  bool pass = true;
  Provenance provenance = Provenance::kInfo;
};

struct RunReport {
  std::string experiment;
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
  std::vector<Metric> metrics;
  std::map<std::string, std::string> notes;
  double wall_clock_seconds = 0.0;

  bool passed() const {
    for (const auto& m : metrics) {
      if (!m.pass) return false;
    }
    return true;
  }

  void info(const std::string& name, double value) { metrics.push_back({name, value, "", {}, {}, true, Provenance::kInfo}); }

  void at_most(const std::string& name, double value, double bound, Provenance p, double tol = 0.0) {
    metrics.push_back({name, value, "<=", bound, tol, value <= bound + tol, p});
  }
  void at_least(const std::string& name, double value, double bound, Provenance p, double tol = 0.0) {
    metrics.push_back({name, value, ">=", bound, tol, value >= bound - tol, p});
  }
  void near(const std::string& name, double value, double target, double tol, Provenance p) {
    metrics.push_back({name, value, "~=", target, tol, std::abs(value - target) <= tol, p});
  }
  void holds(const std::string& name, bool ok, Provenance p) {
    metrics.push_back({name, ok ? 1.0 : 0.0, "==", 1.0, 0.0, ok, p});
  }
  void note(const std::string& key, const std::string& value) { notes[key] = value; }

  nlohmann::json to_json(bool with_wall_clock = true) const {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : metrics) {
      nlohmann::json j{{"name", m.name}, {"value", m.value}, {"pass", m.pass}, {"provenance", to_string(m.provenance)}};
      if (!m.relation.empty()) j["relation"] = m.relation;
      if (m.reference) j["reference"] = *m.reference;
      if (m.tolerance) j["tolerance"] = *m.tolerance;
      ms.push_back(std::move(j));
    }
    nlohmann::json out{{"experiment", experiment},
                       {"version", version},
                       {"config", {{"seed", seed}, {"params", params}}},
                       {"metrics", ms},
                       {"notes", notes},
                       {"passed", passed()}};
    if (with_wall_clock) out["wall_clock_seconds"] = wall_clock_seconds;
    return out;
  }

  void write_csv(std::ostream& os) const {
    os << "# experiment=" << experiment << " version=" << version << " seed=" << seed << '\n';
    os << "name,value,relation,reference,tolerance,pass,provenance\n" << std::setprecision(17);
    for (const auto& m : metrics) {
      os << m.name << ',' << m.value << ',' << m.relation << ',';
      if (m.reference) os << *m.reference;
      os << ',';
      if (m.tolerance) os << *m.tolerance;
      os << ',' << (m.pass ? "true" : "false") << ',' << to_string(m.provenance) << '\n';
    }
  }
};

}  // namespace algomc::harness
