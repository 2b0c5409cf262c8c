#pragma once

// Text formats: graphs, distributions and models as JSON; samples as one bit
// string per line; densities and trajectories as CSV.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "algomc/bits.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/string_models.hpp"
#include "algomc/symmetry.hpp"

namespace algomc::io {

using nlohmann::json;

inline json to_json(const Dag& g) {
  json edges = json::array();
  for (const auto& [p, c] : g.edges()) edges.push_back({p, c});
  return {{"nodes", g.nodes()}, {"edges", edges}};
}

// Canonical text: nodes sorted, edges sorted, two-space indentation.
inline std::string dump_graph(const Dag& g) { return to_json(g).dump(2) + "\n"; }

inline Dag dag_from_json(const json& j) {
  try {
    std::vector<std::string> nodes = j.at("nodes").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("graph JSON: each edge must be [parent, child]");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return Dag(nodes, edges);
  } catch (const json::exception& ex) {
    throw FormatError(std::string("graph JSON: ") + ex.what());
  }
}

inline json to_json(const DiscreteDistribution& p) {
  return {{"arity", p.arity()}, {"names", p.names()}, {"probs", p.probs()}};
}

inline DiscreteDistribution distribution_from_json(const json& j) {
  try {
    auto arity = j.at("arity").get<std::vector<std::size_t>>();
    auto probs = j.at("probs").get<std::vector<double>>();
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    return DiscreteDistribution(std::move(arity), std::move(probs), std::move(names));
  } catch (const json::exception& ex) {
    throw FormatError(std::string("distribution JSON: ") + ex.what());
  }
}

// One row per joint outcome: the variable values, then the probability.
inline void write_distribution_csv(std::ostream& os, const DiscreteDistribution& p) {
  for (const auto& n : p.names()) os << n << ',';
  os << "p\n" << std::setprecision(17);
  for (std::size_t flat = 0; flat < p.probs().size(); ++flat) {
    for (std::size_t v = 0; v < p.num_vars(); ++v) os << p.digit(flat, v) << ',';
    os << p.probs()[flat] << '\n';
  }
}

inline json to_json(const StochasticMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline StochasticMatrix matrix_from_json(const json& j) {
  try {
    return StochasticMatrix::from_rows(j.get<std::vector<std::vector<double>>>());
  } catch (const json::exception& ex) {
    throw FormatError(std::string("matrix JSON: ") + ex.what());
  }
}

// {"c": "0110", "d": "1010", "P0": 0.1, "P1": 0.9, "A0": [[..],[..]], "A1": ...}
// P_i is given by P_i(1); A_k as rows (output) by columns (input).
struct ModelSpec {
  ProductModel product;
  TransitionModel transition;
};

inline json to_json(const ModelSpec& m) {
  return {{"c", m.product.c.str()},        {"d", m.transition.d.str()},
          {"P0", m.product.p_one[0]},      {"P1", m.product.p_one[1]},
          {"A0", to_json(m.transition.a[0])}, {"A1", to_json(m.transition.a[1])}};
}

inline ModelSpec model_from_json(const json& j) {
  try {
    ModelSpec m;
    m.product = ProductModel(BitString::parse(j.at("c").get<std::string>()), j.at("P0").get<double>(),
                             j.at("P1").get<double>());
    m.transition = TransitionModel(BitString::parse(j.at("d").get<std::string>()), matrix_from_json(j.at("A0")),
                                   matrix_from_json(j.at("A1")));
    if (m.product.n() != m.transition.n()) throw FormatError("model JSON: c and d lengths differ");
    return m;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("model JSON: ") + ex.what());
  }
}

inline std::vector<BitString> read_bitstrings(std::istream& is) {
  std::vector<BitString> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    try {
      out.push_back(BitString::parse(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline void write_bitstrings(std::ostream& os, const std::vector<BitString>& samples) {
  for (const auto& s : samples) os << s.str() << '\n';
}

inline Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_density_csv(std::ostream& os, const GridDensity& d) {
  os << "x,p\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) os << d.x(i) << ',' << d.p[i] << '\n';
}

inline GridDensity read_density_csv(std::istream& is) {
  std::string line;
  std::vector<double> xs, ps;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("x,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("density CSV: expected 'x,p' rows");
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      ps.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError("density CSV: bad number in '" + line + "'");
    }
  }
  if (xs.size() < 2) throw FormatError("density CSV: need at least two rows");
  const double h = xs[1] - xs[0];
  for (std::size_t i = 2; i < xs.size(); ++i) {
    if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) throw FormatError("density CSV: grid not uniform");
  }
  return GridDensity(xs[0], h, std::move(ps));
}

inline json to_json(const FiniteGroupAction& g) { return {{"size", g.size()}, {"elements", g.elements()}}; }

inline FiniteGroupAction group_from_json(const json& j) {
  try {
    return FiniteGroupAction(j.at("size").get<std::size_t>(), j.at("elements").get<std::vector<Permutation>>());
  } catch (const json::exception& ex) {
    throw FormatError(std::string("group JSON: ") + ex.what());
  }
}

// One trajectory per row, positions separated by commas.
inline void write_trajectories_csv(std::ostream& os, const std::vector<std::vector<int>>& trajectories) {
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << '\n';
  }
}

inline std::vector<std::vector<int>> read_trajectories_csv(std::istream& is) {
  std::vector<std::vector<int>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stoi(cell));
      } catch (const std::exception&) {
        throw FormatError("trajectory CSV: bad integer '" + cell + "'");
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace algomc::io
