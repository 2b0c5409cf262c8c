#pragma once

// Time asymmetry of a random walk on the integers: forward and backward
// conditionals, the stationary case, and the resolved ensemble of several
// trajectories.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "algomc/bits.hpp"
#include "algomc/complexity.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

struct RandomWalkModel {
  double q = 0.5;  // probability of a step to the right
  int z = 0;       // start site
  int j_max = 20;  // horizon; sites are kept in [z - j_max, z + j_max]

  RandomWalkModel() = default;
  RandomWalkModel(double q_, int z_, int j_max_) : q(q_), z(z_), j_max(j_max_) {
    if (!(q > 0.0 && q < 1.0)) throw PreconditionError("RandomWalkModel: q must lie in (0,1)");
    if (j_max < 0) throw PreconditionError("RandomWalkModel: horizon must be non-negative");
  }

  int first_site() const { return z - j_max; }
  std::size_t sites() const { return static_cast<std::size_t>(2 * j_max + 1); }
};

struct SiteDistribution {
  int first_site = 0;
  std::vector<double> probs;

  double at(int site) const {
    const long k = static_cast<long>(site) - first_site;
    if (k < 0 || k >= static_cast<long>(probs.size())) return 0.0;
    return probs[static_cast<std::size_t>(k)];
  }
};

// Square kernel over the site window, entry (row, col) = P(row | col).
struct SiteKernel {
  int first_site = 0;
  std::size_t n = 0;
  std::vector<double> values;  // row-major
  std::vector<bool> reachable_column;

  double at(int row_site, int col_site) const {
    const long r = static_cast<long>(row_site) - first_site, c = static_cast<long>(col_site) - first_site;
    if (r < 0 || c < 0 || r >= static_cast<long>(n) || c >= static_cast<long>(n)) return 0.0;
    return values[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)];
  }
  double& ref(int row_site, int col_site) {
    return values[static_cast<std::size_t>(row_site - first_site) * n + static_cast<std::size_t>(col_site - first_site)];
  }
};

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(X_j = x) = C(j, k) q^k (1-q)^(j-k) with k = (j + x - z) / 2.
inline SiteDistribution walk_marginal(const RandomWalkModel& m, int j) {
  if (j < 0 || j > m.j_max) throw PreconditionError("walk_marginal: j outside [0, j_max]");
  SiteDistribution d{m.first_site(), std::vector<double>(m.sites(), 0.0)};
  for (int k = 0; k <= j; ++k) {
    const int x = m.z + 2 * k - j;
    const double lp = log_binomial(j, k) + k * std::log(m.q) + (j - k) * std::log1p(-m.q);
    d.probs[static_cast<std::size_t>(x - d.first_site)] = std::exp(lp);
  }
  return d;
}

// P(X_{j+1} | X_j). At the window edge the outward step is held in place,
// which only touches sites first reachable at time j_max.
inline SiteKernel forward_kernel(const RandomWalkModel& m) {
  SiteKernel k{m.first_site(), m.sites(), std::vector<double>(m.sites() * m.sites(), 0.0),
               std::vector<bool>(m.sites(), true)};
  const int lo = m.first_site(), hi = m.first_site() + static_cast<int>(m.sites()) - 1;
  for (int x = lo; x <= hi; ++x) {
    k.ref(std::min(x + 1, hi), x) += m.q;
    k.ref(std::max(x - 1, lo), x) += 1.0 - m.q;
  }
  return k;
}

inline SiteDistribution apply(const SiteKernel& k, const SiteDistribution& p) {
  SiteDistribution out{k.first_site, std::vector<double>(k.n, 0.0)};
  for (std::size_t r = 0; r < k.n; ++r)
    for (std::size_t c = 0; c < k.n; ++c) out.probs[r] += k.values[r * k.n + c] * p.probs[c];
  return out;
}

namespace detail {

inline bool reachable(const RandomWalkModel& m, int j, int x) {
  const int d = x - m.z;
  return std::abs(d) <= j && ((j + d) % 2 + 2) % 2 == 0;
}

}  // namespace detail

// P(X_j | X_{j+1}) in closed form; q does not enter. Columns for sites not
// reachable at time j+1 are left zero and flagged.
inline SiteKernel backward_conditional(const RandomWalkModel& m, int j) {
  if (j < 0 || j >= m.j_max) throw PreconditionError("backward_conditional: j outside [0, j_max)");
  SiteKernel k{m.first_site(), m.sites(), std::vector<double>(m.sites() * m.sites(), 0.0),
               std::vector<bool>(m.sites(), false)};
  const double denom = j + 1.0;
  for (int y = k.first_site; y < k.first_site + static_cast<int>(k.n); ++y) {
    if (!detail::reachable(m, j + 1, y)) continue;
    k.reachable_column[static_cast<std::size_t>(y - k.first_site)] = true;
    // came from the left: x_j = x_{j+1} - 1
    const int xl = y - 1;
    if (detail::reachable(m, j, xl)) k.ref(xl, y) = ((j + xl - m.z) / 2 + 1) / denom;
    // came from the right: x_j = x_{j+1} + 1
    const int xr = y + 1;
    if (detail::reachable(m, j, xr)) k.ref(xr, y) = ((j - xr + m.z) / 2 + 1) / denom;
  }
  return k;
}

// The same conditional by Bayes inversion of walk_marginal and forward_kernel.
inline SiteKernel bayes_backward(const RandomWalkModel& m, int j) {
  if (j < 0 || j >= m.j_max) throw PreconditionError("bayes_backward: j outside [0, j_max)");
  const auto pj = walk_marginal(m, j), pj1 = walk_marginal(m, j + 1);
  const auto f = forward_kernel(m);
  SiteKernel k{m.first_site(), m.sites(), std::vector<double>(m.sites() * m.sites(), 0.0),
               std::vector<bool>(m.sites(), false)};
  for (int y = k.first_site; y < k.first_site + static_cast<int>(k.n); ++y) {
    const double py = pj1.at(y);
    if (py <= 0.0) continue;
    k.reachable_column[static_cast<std::size_t>(y - k.first_site)] = true;
    for (int x = k.first_site; x < k.first_site + static_cast<int>(k.n); ++x) {
      k.ref(x, y) = f.at(y, x) * pj.at(x) / py;
    }
  }
  return k;
}

inline double max_abs_difference(const SiteKernel& a, const SiteKernel& b) {
  if (a.n != b.n || a.first_site != b.first_site) throw PreconditionError("max_abs_difference: kernel windows differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

// Which parameters each object of the forward and the backward description
// depends on, with the resulting idealized totals for given K(z), K(q).
struct WalkObjectDependence {
  std::string object;
  bool depends_on_z = false;
  bool depends_on_q = false;
};

struct WalkDependenceReport {
  std::vector<WalkObjectDependence> objects;
  double forward_total = 0.0;   // K(P(X_0)) + K(P(X_1..X_j | X_0))
  double backward_total = 0.0;  // K(P(X_j)) + K(P(X_0..X_{j-1} | X_j))
  double shared_backward = 0.0;  // I(P(X_j) : P(X_0..X_{j-1} | X_j))
};

inline WalkDependenceReport walk_dependence_report(double k_z_bits, double k_q_bits) {
  WalkDependenceReport r;
  r.objects = {{"P(X_0)", true, false},
               {"P(X_1..X_j | X_0)", false, true},
               {"P(X_j)", true, true},
               {"P(X_0..X_{j-1} | X_j)", true, false}};
  auto cost = [&](const WalkObjectDependence& o) { return (o.depends_on_z ? k_z_bits : 0.0) + (o.depends_on_q ? k_q_bits : 0.0); };
  r.forward_total = cost(r.objects[0]) + cost(r.objects[1]);
  r.backward_total = cost(r.objects[2]) + cost(r.objects[3]);
  r.shared_backward = r.backward_total - k_z_bits - k_q_bits;
  return r;
}

// ---------------------------------------------------------------------------

struct StationarityReport {
  std::vector<double> stationary;
  double eigen_gap = 0.0;  // 1 - |second largest eigenvalue|
  StochasticMatrix backward = StochasticMatrix::identity(1);
  bool reversible = false;  // backward kernel equals M
  double backward_of_backward_error = 0.0;
  std::size_t iterations = 0;
};

// For a chain with a unique, attracting stationary distribution pi, the
// backward kernel B(x|y) = M(y|x) pi(x) / pi(y) is a function of M alone.
inline StationarityReport stationarity_demo(const StochasticMatrix& m, double min_gap = 1e-9) {
  if (m.rows() != m.cols()) throw PreconditionError("stationarity_demo: M must be square");
  const std::size_t n = m.rows();
  Eigen::MatrixXd em(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) em(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.at(r, c);
  StationarityReport rep;
  if (n == 1) {
    rep.eigen_gap = 1.0;
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(em, false);
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    rep.eigen_gap = 1.0 - mods[1];
  }
  if (rep.eigen_gap < min_gap) {
    throw PreconditionError("stationarity_demo: stationary distribution not unique or not attracting (eigen-gap " +
                            std::to_string(rep.eigen_gap) + ")");
  }
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  for (rep.iterations = 1; rep.iterations <= 1000000; ++rep.iterations) {
    auto next = apply_kernel(m, p);
    double s = 0.0;
    for (double v : next) s += v;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= s;
      change = std::max(change, std::abs(next[i] - p[i]));
    }
    p = std::move(next);
    if (change < 1e-16) break;
  }
  rep.stationary = p;
  rep.backward = bayes_invert(m, p);
  rep.reversible = rep.backward.approx_equal(m, 1e-12);
  const auto twice = bayes_invert(rep.backward, apply_kernel(m, p));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      rep.backward_of_backward_error = std::max(rep.backward_of_backward_error, std::abs(twice.at(r, c) - m.at(r, c)));
  return rep;
}

// ---------------------------------------------------------------------------

// Positions x_0 .. x_steps.
inline std::vector<int> simulate_walk(const RandomWalkModel& m, int steps, Philox4x32& rng) {
  if (steps < 0) throw PreconditionError("simulate_walk: steps must be non-negative");
  std::vector<int> xs{m.z};
  xs.reserve(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t < steps; ++t) xs.push_back(xs.back() + (rng.bernoulli(m.q) ? 1 : -1));
  return xs;
}

// Start position (4 bytes little endian, two's complement) followed by the
// packed step directions (1 = right).
inline Bytes encode_segment(const std::vector<int>& xs, std::size_t from, std::size_t to) {
  if (from >= to || to > xs.size()) throw PreconditionError("encode_segment: invalid range");
  Bytes out;
  const auto start = static_cast<std::uint32_t>(xs[from]);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(start >> (8 * i)));
  BitString steps(to - from - 1);
  for (std::size_t t = from + 1; t < to; ++t) {
    const int d = xs[t] - xs[t - 1];
    if (d != 1 && d != -1) throw PreconditionError("encode_segment: not a nearest-neighbour walk");
    steps[t - from - 1] = d == 1 ? 1 : 0;
  }
  const auto packed = steps.pack();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

// Resolution of m trajectories of T time points: instance nodes "x<i>_<t>"
// (i = 1..m, t = 1..T) chained in time, plus one machine node "M" that is a
// parent of every instance node.
inline Dag time_series_resolution(int instances, int times) {
  if (instances < 1 || times < 1) throw PreconditionError("time_series_resolution: need at least one instance and time");
  std::vector<std::string> nodes{"M"};
  std::vector<Edge> edges;
  auto name = [](int i, int t) { return "x" + std::to_string(i) + "_" + std::to_string(t); };
  for (int i = 1; i <= instances; ++i)
    for (int t = 1; t <= times; ++t) {
      nodes.push_back(name(i, t));
      edges.emplace_back("M", name(i, t));
      if (t > 1) edges.emplace_back(name(i, t - 1), name(i, t));
    }
  return Dag(nodes, edges);
}

// True when the skeleton is mapped onto itself by t -> times + 1 - t.
inline bool skeleton_time_symmetric(const Dag& g, int times) {
  auto reflect = [times](const std::string& v) {
    if (v == "M") return v;
    const auto us = v.find('_');
    const int t = std::stoi(v.substr(us + 1));
    return v.substr(0, us + 1) + std::to_string(times + 1 - t);
  };
  const auto sk = skeleton(g);
  for (const auto& [a, b] : sk) {
    const auto ra = reflect(a), rb = reflect(b);
    if (!sk.count(ra < rb ? UndirectedEdge{ra, rb} : UndirectedEdge{rb, ra})) return false;
  }
  return true;
}

struct TimeSeriesReport {
  bool no_v_structures = false;
  bool skeleton_symmetric = false;
  std::size_t split = 0;
  MiEstimate cross_instance;  // I(trajectory 1 : trajectory 2)
  bool hidden_common_cause = false;
  // I(start_1 : later_2 | start_2), the reading where the condition is the
  // second instance's own initial segment.
  MiEstimate initial_given_start;
  // I(start_1 : later_2 | later_2), the formula as literally written.
  MiEstimate initial_given_later;
};

// Splits every trajectory at `split` into an initial and a later segment.
inline TimeSeriesReport resolved_timeseries_test(const std::vector<std::vector<int>>& trajectories, const Compressor& c,
                                                 std::size_t split = 0) {
  if (trajectories.size() < 2) throw PreconditionError("resolved_timeseries_test: need at least two trajectories");
  const std::size_t len = trajectories.front().size();
  for (const auto& t : trajectories) {
    if (t.size() != len) throw PreconditionError("resolved_timeseries_test: trajectories differ in length");
  }
  if (len < 3) throw PreconditionError("resolved_timeseries_test: trajectories need at least three points");
  if (split == 0) split = len / 2;
  if (split < 1 || split + 1 >= len) throw PreconditionError("resolved_timeseries_test: split leaves an empty segment");

  TimeSeriesReport r;
  const int times = 3;
  const auto g = time_series_resolution(static_cast<int>(trajectories.size()), times);
  r.no_v_structures = v_structures(g).empty();
  r.skeleton_symmetric = skeleton_time_symmetric(g, times);
  r.split = split;

  const auto& a = trajectories[0];
  const auto& b = trajectories[1];
  const Bytes full_a = encode_segment(a, 0, len), full_b = encode_segment(b, 0, len);
  r.cross_instance = algorithmic_mi(c, full_a, full_b);
  r.hidden_common_cause = !r.cross_instance.approx_zero();
  const Bytes start_a = encode_segment(a, 0, split + 1);
  const Bytes start_b = encode_segment(b, 0, split + 1);
  const Bytes later_b = encode_segment(b, split, len);
  r.initial_given_start = algorithmic_cmi(c, start_a, later_b, start_b);
  r.initial_given_later = algorithmic_cmi(c, start_a, later_b, later_b);
  return r;
}

}  // namespace algomc
