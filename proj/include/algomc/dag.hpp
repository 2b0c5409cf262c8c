#pragma once

// Directed acyclic graphs over string-labelled nodes, d-separation and
// Markov equivalence.

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "algomc/error.hpp"

namespace algomc {

using NodeSet = std::set<std::string>;
using Edge = std::pair<std::string, std::string>;  // (parent, child)
using UndirectedEdge = std::pair<std::string, std::string>;  // first < second
using VStructure = std::tuple<std::string, std::string, std::string>;  // (a, c, b), a < b

class Dag {
 public:
  Dag() = default;

  Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
      throw PreconditionError("Dag: duplicate node label");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i;
    parents_.assign(nodes_.size(), {});
    children_.assign(nodes_.size(), {});
    for (const auto& [from, to] : edges) {
      const auto u = index_of(from);
      const auto v = index_of(to);
      if (u == v) throw PreconditionError("Dag: self-loop on '" + from + "'");
      if (!edges_.insert({from, to}).second) {
        throw PreconditionError("Dag: duplicate edge " + from + "->" + to);
      }
      parents_[v].push_back(u);
      children_[u].push_back(v);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
    topo_ = compute_topological_order();
  }

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool has_node(const std::string& v) const { return index_.count(v) != 0; }

  std::size_t index_of(const std::string& v) const {
    const auto it = index_.find(v);
    if (it == index_.end()) throw UnknownNodeError(v);
    return it->second;
  }

  const std::string& label(std::size_t i) const { return nodes_.at(i); }

  bool has_edge(const std::string& from, const std::string& to) const {
    return edges_.count({from, to}) != 0;
  }

  bool adjacent(const std::string& a, const std::string& b) const {
    return has_edge(a, b) || has_edge(b, a);
  }

  const std::vector<std::size_t>& parent_indices(std::size_t v) const { return parents_.at(v); }
  const std::vector<std::size_t>& child_indices(std::size_t v) const { return children_.at(v); }

  // Node indices in an order where every parent precedes its children; ties
  // broken by label.
  const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

  // Indices of nodes reachable from `start` by directed paths, `start` included.
  std::vector<bool> reachable_from(std::size_t start) const {
    std::vector<bool> seen(size(), false);
    std::vector<std::size_t> todo{start};
    seen[start] = true;
    while (!todo.empty()) {
      const auto u = todo.back();
      todo.pop_back();
      for (auto c : children_[u]) {
        if (!seen[c]) {
          seen[c] = true;
          todo.push_back(c);
        }
      }
    }
    return seen;
  }

  bool operator==(const Dag& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<std::size_t> compute_topological_order() const {
    std::vector<std::size_t> indegree(size());
    for (std::size_t v = 0; v < size(); ++v) indegree[v] = parents_[v].size();
    std::set<std::size_t> ready;
    for (std::size_t v = 0; v < size(); ++v) {
      if (indegree[v] == 0) ready.insert(v);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      const auto u = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(u);
      for (auto c : children_[u]) {
        if (--indegree[c] == 0) ready.insert(c);
      }
    }
    if (order.size() != size()) throw PreconditionError("Dag: graph contains a directed cycle");
    return order;
  }

  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> index_;
  std::set<Edge> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

namespace detail {

inline NodeSet labels_of(const Dag& g, const std::vector<bool>& mask) {
  NodeSet out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.insert(g.label(i));
  }
  return out;
}

inline std::vector<bool> mask_of(const Dag& g, const NodeSet& set) {
  std::vector<bool> mask(g.size(), false);
  for (const auto& v : set) mask[g.index_of(v)] = true;
  return mask;
}

}  // namespace detail

inline NodeSet parents(const Dag& g, const std::string& v) {
  NodeSet out;
  for (auto p : g.parent_indices(g.index_of(v))) out.insert(g.label(p));
  return out;
}

inline NodeSet children(const Dag& g, const std::string& v) {
  NodeSet out;
  for (auto c : g.child_indices(g.index_of(v))) out.insert(g.label(c));
  return out;
}

// Proper descendants of v.
inline NodeSet descendants(const Dag& g, const std::string& v) {
  auto mask = g.reachable_from(g.index_of(v));
  mask[g.index_of(v)] = false;
  return detail::labels_of(g, mask);
}

// Every node other than v that v cannot reach by a directed path.
inline NodeSet non_descendants(const Dag& g, const std::string& v) {
  const auto self = g.index_of(v);
  auto mask = g.reachable_from(self);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = !mask[i];
  return detail::labels_of(g, mask);
}

// Nodes with a directed path into some member of `set`, the set included.
inline NodeSet ancestors(const Dag& g, const NodeSet& set) {
  std::vector<bool> mask = detail::mask_of(g, set);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) todo.push_back(i);
  }
  while (!todo.empty()) {
    const auto u = todo.back();
    todo.pop_back();
    for (auto p : g.parent_indices(u)) {
      if (!mask[p]) {
        mask[p] = true;
        todo.push_back(p);
      }
    }
  }
  return detail::labels_of(g, mask);
}

// Nodes connected to some member of `sources` by a trail that is active given
// `given` (Bayes-ball reachability). Sources themselves are included.
inline NodeSet active_reachable(const Dag& g, const NodeSet& sources, const NodeSet& given) {
  const auto in_given = detail::mask_of(g, given);
  const auto anc = detail::mask_of(g, ancestors(g, given));

  enum Dir : int { kUp = 0, kDown = 1 };  // up: arrived from a child; down: from a parent
  std::vector<std::array<bool, 2>> visited(g.size(), {false, false});
  std::vector<bool> reached(g.size(), false);
  std::deque<std::pair<std::size_t, Dir>> todo;
  for (const auto& s : sources) todo.emplace_back(g.index_of(s), kUp);

  while (!todo.empty()) {
    const auto [y, dir] = todo.front();
    todo.pop_front();
    if (visited[y][dir]) continue;
    visited[y][dir] = true;
    if (!in_given[y]) reached[y] = true;

    if (dir == kUp && !in_given[y]) {
      for (auto p : g.parent_indices(y)) todo.emplace_back(p, kUp);
      for (auto c : g.child_indices(y)) todo.emplace_back(c, kDown);
    } else if (dir == kDown) {
      if (!in_given[y]) {
        for (auto c : g.child_indices(y)) todo.emplace_back(c, kDown);
      }
      if (anc[y]) {
        for (auto p : g.parent_indices(y)) todo.emplace_back(p, kUp);
      }
    }
  }
  return detail::labels_of(g, reached);
}

namespace detail {

inline void check_subset(const Dag& g, const NodeSet& set) {
  for (const auto& v : set) g.index_of(v);
}

inline bool disjoint(const NodeSet& a, const NodeSet& b) {
  return std::none_of(a.begin(), a.end(), [&](const std::string& v) { return b.count(v) != 0; });
}

}  // namespace detail

// True iff every trail between S and T is blocked by R.
inline bool d_separated(const Dag& g, const NodeSet& s, const NodeSet& t, const NodeSet& r) {
  if (s.empty() || t.empty()) throw PreconditionError("d_separated: S and T must be nonempty");
  detail::check_subset(g, s);
  detail::check_subset(g, t);
  detail::check_subset(g, r);
  if (!detail::disjoint(s, t) || !detail::disjoint(s, r) || !detail::disjoint(t, r)) {
    throw PreconditionError("d_separated: S, T, R must be pairwise disjoint");
  }
  const auto reach = active_reachable(g, s, r);
  return detail::disjoint(reach, t);
}

// Same relation via the moralized ancestral graph: S and T are d-separated
// by R iff R separates them in the moral graph of An(S ∪ T ∪ R).
inline bool d_separated_moral(const Dag& g, const NodeSet& s, const NodeSet& t, const NodeSet& r) {
  if (s.empty() || t.empty()) throw PreconditionError("d_separated_moral: S and T must be nonempty");
  NodeSet all = s;
  all.insert(t.begin(), t.end());
  all.insert(r.begin(), r.end());
  const auto keep = detail::mask_of(g, ancestors(g, all));
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& pa = g.parent_indices(v);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      adj[pa[i]][v] = adj[v][pa[i]] = true;
      for (std::size_t j = i + 1; j < pa.size(); ++j) adj[pa[i]][pa[j]] = adj[pa[j]][pa[i]] = true;
    }
  }
  const auto blocked = detail::mask_of(g, r);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> todo;
  for (const auto& v : s) {
    seen[g.index_of(v)] = true;
    todo.push_back(g.index_of(v));
  }
  while (!todo.empty()) {
    const auto v = todo.back();
    todo.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      if (adj[v][w] && keep[w] && !blocked[w] && !seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
    }
  }
  return std::none_of(t.begin(), t.end(), [&](const std::string& v) { return seen[g.index_of(v)]; });
}

inline std::set<UndirectedEdge> skeleton(const Dag& g) {
  std::set<UndirectedEdge> out;
  for (const auto& [a, b] : g.edges()) out.insert(a < b ? UndirectedEdge{a, b} : UndirectedEdge{b, a});
  return out;
}

inline std::set<VStructure> v_structures(const Dag& g) {
  std::set<VStructure> out;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto& pa = g.parent_indices(c);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) {
        const auto& a = g.label(pa[i]);
        const auto& b = g.label(pa[j]);
        if (!g.adjacent(a, b)) out.emplace(std::min(a, b), g.label(c), std::max(a, b));
      }
    }
  }
  return out;
}

// Calls f(S, T, R) for every ordered triple of pairwise disjoint node sets
// with S and T nonempty. 4^n assignments; intended for n <= 6.
template <class F>
void for_each_disjoint_triple(const Dag& g, F&& f) {
  const std::size_t n = g.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    NodeSet s, t, r;
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= 4) {
      switch (c % 4) {
        case 1: s.insert(g.label(i)); break;
        case 2: t.insert(g.label(i)); break;
        case 3: r.insert(g.label(i)); break;
        default: break;
      }
    }
    if (!s.empty() && !t.empty()) f(s, t, r);
  }
}

inline bool markov_equivalent(const Dag& g1, const Dag& g2) {
  if (g1.nodes() != g2.nodes()) throw PreconditionError("markov_equivalent: node sets differ");
  return skeleton(g1) == skeleton(g2) && v_structures(g1) == v_structures(g2);
}

}  // namespace algomc
