#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc::harness {

// Bad command line, unknown experiment or parameter, or a value of the wrong
// type. The CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ParamType { kInt, kReal, kString, kPath };

inline const char* to_string(ParamType t) {
  switch (t) {
    case ParamType::kInt: return "integer";
    case ParamType::kReal: return "real";
    case ParamType::kString: return "string";
    case ParamType::kPath: return "path";
  }
  return "?";
}

struct ParamSpec {
  std::string name;
  ParamType type;
  std::string default_value;
  std::string help;
};

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;  // raw overrides
  std::uint64_t seed = 0;
  std::string out;  // empty = stdout
  std::string format = "json";
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat "key = value" lines; '#' and ';' start comments. The key "seed" sets
// the master seed, every other key is an experiment parameter.
inline void load_ini(std::istream& in, ExperimentConfig& cfg, const std::string& source = "config") {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (key == "seed") {
      try {
        cfg.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": seed expects an unsigned integer");
      }
    } else {
      cfg.params[key] = value;
    }
  }
}

inline void load_ini_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_ini(in, cfg, path);
}

// "k=v" from the command line.
inline void apply_override(const std::string& kv, ExperimentConfig& cfg) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'");
  cfg.params[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
}

// Typed view of the parameters of one experiment, defaults filled in.
class Params {
 public:
  Params(const std::vector<ParamSpec>& specs, const std::map<std::string, std::string>& raw) {
    for (const auto& s : specs) {
      specs_[s.name] = s;
      values_[s.name] = s.default_value;
    }
    for (const auto& [k, v] : raw) {
      const auto it = specs_.find(k);
      if (it == specs_.end()) {
        std::string known;
        for (const auto& s : specs) known += (known.empty() ? "" : ", ") + s.name;
        throw ConfigError("unknown parameter '" + k + "' (known: " + (known.empty() ? "none" : known) + ")");
      }
      values_[k] = v;
    }
    for (const auto& [k, v] : values_) validate(specs_.at(k), v);
  }

  long long integer(const std::string& k) const { return std::stoll(values_.at(k)); }
  double real(const std::string& k) const { return std::stod(values_.at(k)); }
  const std::string& str(const std::string& k) const { return values_.at(k); }
  const std::map<std::string, std::string>& resolved() const noexcept { return values_; }

  std::vector<long long> integer_list(const std::string& k) const {
    std::vector<long long> out;
    std::stringstream ss(values_.at(k));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoll(trim(cell), &used));
        if (used != trim(cell).size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("parameter '" + k + "' expects a comma-separated list of integers, got '" + values_.at(k) + "'");
      }
    }
    if (out.empty()) throw ConfigError("parameter '" + k + "' must not be empty");
    return out;
  }

 private:
  static void validate(const ParamSpec& s, const std::string& v) {
    try {
      std::size_t used = 0;
      switch (s.type) {
        case ParamType::kInt:
          std::stoll(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          break;
        case ParamType::kReal:
          std::stod(v, &used);
          if (used != v.size()) throw std::invalid_argument(v);
          break;
        case ParamType::kString:
        case ParamType::kPath:
          break;
      }
    } catch (const std::exception&) {
      throw ConfigError("parameter '" + s.name + "' expects " + to_string(s.type) + ", got '" + v + "'");
    }
  }

  std::map<std::string, ParamSpec> specs_;
  std::map<std::string, std::string> values_;
};

inline std::uint64_t seed_stream(std::uint64_t master, const std::string& label) { return derive_seed(master, label); }

}  // namespace algomc::harness
