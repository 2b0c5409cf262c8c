#pragma once

// Hand-rolled generators and brute-force reference implementations shared by
// the test binaries. Nothing here calls the library routine it is used to
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "algomc/bits.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/rng.hpp"

namespace algomc::testing {

inline std::string label_of(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

// Every DAG on n labelled nodes; each unordered pair is absent, forward or
// backward, and cyclic orientations are discarded by a reachability check.
inline void for_each_small_dag(std::size_t n, const std::function<void(const Dag&)>& f) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(label_of(i));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    std::vector<Edge> edges;
    std::size_t c = code;
    for (const auto& [i, j] : pairs) {
      const auto s = c % 3;
      c /= 3;
      if (s == 1) {
        adj[i][j] = true;
        edges.emplace_back(nodes[i], nodes[j]);
      } else if (s == 2) {
        adj[j][i] = true;
        edges.emplace_back(nodes[j], nodes[i]);
      }
    }
    // Floyd-Warshall closure; a cycle shows up on the diagonal.
    auto reach = adj;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    bool cyclic = false;
    for (std::size_t i = 0; i < n; ++i) cyclic = cyclic || reach[i][i];
    if (!cyclic) f(Dag(nodes, edges));
  }
}

inline Dag random_dag(std::size_t n, double density, Philox4x32& rng) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(label_of(i));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(density)) edges.emplace_back(nodes[order[i]], nodes[order[j]]);
  return Dag(nodes, edges);
}

// Descendant sets (including the node itself) by transitive closure over the
// edge list.
inline std::vector<std::set<std::string>> closure_descendants(const Dag& g) {
  const auto n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [p, c] : g.edges()) reach[g.index_of(p)][g.index_of(c)] = true;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<std::set<std::string>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) out[i].insert(g.label(j));
  return out;
}

// Literal path criterion: S and T are d-separated by R iff every simple
// undirected path between them has a non-collider in R or a collider with
// neither itself nor any descendant in R.
inline bool d_separated_by_paths(const Dag& g, const NodeSet& s, const NodeSet& t, const NodeSet& r) {
  const auto n = g.size();
  const auto desc = closure_descendants(g);
  std::vector<std::vector<std::size_t>> nbr(n);
  for (const auto& [p, c] : g.edges()) {
    nbr[g.index_of(p)].push_back(g.index_of(c));
    nbr[g.index_of(c)].push_back(g.index_of(p));
  }
  auto blocked = [&](const std::vector<std::size_t>& path) {
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
      const auto& a = g.label(path[k - 1]);
      const auto& m = g.label(path[k]);
      const auto& b = g.label(path[k + 1]);
      const bool collider = g.has_edge(a, m) && g.has_edge(b, m);
      if (collider) {
        const bool opened = std::any_of(desc[path[k]].begin(), desc[path[k]].end(),
                                        [&](const std::string& d) { return r.count(d) != 0; });
        if (!opened) return true;
      } else if (r.count(m)) {
        return true;
      }
    }
    return false;
  };
  std::vector<std::size_t> path;
  std::vector<bool> on_path(n, false);
  bool connected = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    if (connected) return;
    if (path.size() > 1 && t.count(g.label(v))) {
      if (!blocked(path)) connected = true;
      return;
    }
    for (auto w : nbr[v]) {
      if (on_path[w]) continue;
      on_path[w] = true;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      on_path[w] = false;
    }
  };
  for (const auto& src : s) {
    const auto v = g.index_of(src);
    path = {v};
    std::fill(on_path.begin(), on_path.end(), false);
    on_path[v] = true;
    dfs(v);
    if (connected) return false;
  }
  return true;
}

// Unshielded colliders by scanning every (a, b, c) triple directly.
inline std::set<VStructure> v_structures_by_scan(const Dag& g) {
  std::set<VStructure> out;
  const auto& ns = g.nodes();
  for (const auto& a : ns)
    for (const auto& b : ns)
      for (const auto& c : ns) {
        if (!(a < b) || a == c || b == c) continue;
        if (g.has_edge(a, c) && g.has_edge(b, c) && !g.has_edge(a, b) && !g.has_edge(b, a)) out.insert({a, c, b});
      }
  return out;
}

inline std::vector<double> random_simplex(std::size_t k, Philox4x32& rng, double floor = 0.0) {
  std::vector<double> p(k);
  double s = 0;
  for (auto& x : p) s += x = floor + rng.uniform01();
  for (auto& x : p) x /= s;
  return p;
}

inline double entropy_direct(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log2(x);
  return h;
}

inline BitString random_bits(std::size_t n, Philox4x32& rng) {
  BitString b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.bernoulli(0.5) ? 1 : 0;
  return b;
}

}  // namespace algomc::testing
