#pragma once

// Exact finite distributions, Shannon quantities in bits, stochastic matrices,
// and the statistical Markov / faithfulness checks used as ground truth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "algomc/dag.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

inline constexpr double kDistributionTolerance = 1e-12;
inline constexpr double kIndependenceTolerance = 1e-9;  // bits
inline constexpr std::size_t kMaxArity = 64;
inline constexpr std::size_t kMaxJointSize = std::size_t{1} << 22;

// Entropy of a probability vector in bits, 0 log 0 = 0.
inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

inline double binary_entropy(double p) {
  const double v[2] = {p, 1.0 - p};
  return entropy_bits(v);
}

// Joint distribution over named finite variables, dense row-major table (the
// last variable varies fastest).
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  DiscreteDistribution(std::vector<std::size_t> arity, std::vector<double> probs,
                       std::vector<std::string> names = {})
      : arity_(std::move(arity)), probs_(std::move(probs)), names_(std::move(names)) {
    std::size_t size = 1;
    for (auto a : arity_) {
      if (a == 0 || a > kMaxArity) throw PreconditionError("DiscreteDistribution: arity out of range");
      size *= a;
      if (size > kMaxJointSize) throw PreconditionError("DiscreteDistribution: joint table too large");
    }
    if (probs_.size() != size) throw PreconditionError("DiscreteDistribution: table size mismatch");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw PreconditionError("DiscreteDistribution: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance) {
      throw PreconditionError("DiscreteDistribution: probabilities do not sum to 1");
    }
    if (names_.empty()) {
      for (std::size_t i = 0; i < arity_.size(); ++i) names_.push_back("x" + std::to_string(i));
    }
    if (names_.size() != arity_.size()) throw PreconditionError("DiscreteDistribution: name count mismatch");
    strides_.assign(arity_.size(), 1);
    for (std::size_t i = arity_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * arity_[i];
  }

  const std::vector<std::size_t>& arity() const noexcept { return arity_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t num_vars() const noexcept { return arity_.size(); }

  std::size_t var_index(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw UnknownNodeError(name);
    return static_cast<std::size_t>(it - names_.begin());
  }

  // Value of variable `var` in joint outcome `flat`.
  std::size_t digit(std::size_t flat, std::size_t var) const {
    return (flat / strides_[var]) % arity_[var];
  }

  // Marginal table over `vars` (in the given order), flattened row-major.
  std::vector<double> marginal_table(const std::vector<std::size_t>& vars) const {
    std::size_t size = 1;
    for (auto v : vars) size *= arity_.at(v);
    std::vector<double> out(size, 0.0);
    for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
      if (probs_[flat] == 0.0) continue;
      std::size_t idx = 0;
      for (auto v : vars) idx = idx * arity_[v] + digit(flat, v);
      out[idx] += probs_[flat];
    }
    return out;
  }

  DiscreteDistribution marginal(const std::vector<std::size_t>& vars) const {
    std::vector<std::size_t> ar;
    std::vector<std::string> nm;
    for (auto v : vars) {
      ar.push_back(arity_.at(v));
      nm.push_back(names_[v]);
    }
    auto table = marginal_table(vars);
    normalize(table);
    return DiscreteDistribution(std::move(ar), std::move(table), std::move(nm));
  }

  double entropy(const std::vector<std::size_t>& vars) const {
    return entropy_bits(marginal_table(vars));
  }

  static void normalize(std::vector<double>& table) {
    const double total = std::accumulate(table.begin(), table.end(), 0.0);
    for (auto& v : table) v /= total;
  }

 private:
  std::vector<std::size_t> arity_;
  std::vector<double> probs_;
  std::vector<std::string> names_;
  std::vector<std::size_t> strides_;
};

namespace detail {

inline void require_disjoint(std::initializer_list<const std::vector<std::size_t>*> sets) {
  std::vector<std::size_t> all;
  for (const auto* s : sets) all.insert(all.end(), s->begin(), s->end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw PreconditionError("variable sets must be disjoint");
  }
}

inline std::vector<std::size_t> join(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

inline double shannon_entropy(const DiscreteDistribution& p, const std::vector<std::size_t>& vars) {
  return p.entropy(vars);
}

inline double mutual_information(const DiscreteDistribution& p, const std::vector<std::size_t>& a,
                                 const std::vector<std::size_t>& b) {
  detail::require_disjoint({&a, &b});
  return p.entropy(a) + p.entropy(b) - p.entropy(detail::join(a, b));
}

// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C).
inline double conditional_mi(const DiscreteDistribution& p, const std::vector<std::size_t>& a,
                             const std::vector<std::size_t>& b, const std::vector<std::size_t>& c) {
  detail::require_disjoint({&a, &b, &c});
  const auto ac = detail::join(a, c);
  const auto bc = detail::join(b, c);
  return p.entropy(ac) + p.entropy(bc) - p.entropy(detail::join(ac, b)) - p.entropy(c);
}

// Column-stochastic matrix: entry (out, in) = P(out | in).
class StochasticMatrix {
 public:
  StochasticMatrix() = default;

  StochasticMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), v_(std::move(values)) {
    if (v_.size() != rows_ * cols_) throw PreconditionError("StochasticMatrix: size mismatch");
    for (std::size_t c = 0; c < cols_; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double x = at(r, c);
        if (!(x >= 0.0 && x <= 1.0 + kDistributionTolerance)) {
          throw PreconditionError("StochasticMatrix: entry outside [0,1]");
        }
        s += x;
      }
      if (std::abs(s - 1.0) > kDistributionTolerance) {
        throw PreconditionError("StochasticMatrix: column " + std::to_string(c) + " does not sum to 1");
      }
    }
  }

  // Build from nested rows: rows[out][in].
  static StochasticMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw PreconditionError("StochasticMatrix: empty");
    std::vector<double> v;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw PreconditionError("StochasticMatrix: ragged rows");
      v.insert(v.end(), r.begin(), r.end());
    }
    return StochasticMatrix(rows.size(), rows.front().size(), std::move(v));
  }

  static StochasticMatrix identity(std::size_t n) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    return StochasticMatrix(n, n, std::move(v));
  }

  // Binary symmetric channel with crossover probability eps.
  static StochasticMatrix binary_symmetric(double eps) {
    return StochasticMatrix(2, 2, {1.0 - eps, eps, eps, 1.0 - eps});
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t out, std::size_t in) const { return v_[out * cols_ + in]; }
  const std::vector<double>& values() const noexcept { return v_; }

  std::vector<double> column(std::size_t in) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, in);
    return out;
  }

  bool is_doubly_stochastic(double tol = kDistributionTolerance) const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) s += at(r, c);
      if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
  }

  // this * other (apply `other` first).
  StochasticMatrix compose(const StochasticMatrix& other) const {
    if (cols_ != other.rows_) throw PreconditionError("StochasticMatrix: dimension mismatch");
    std::vector<double> v(rows_ * other.cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t k = 0; k < cols_; ++k) {
        const double a = at(r, k);
        if (a == 0.0) continue;
        for (std::size_t c = 0; c < other.cols_; ++c) v[r * other.cols_ + c] += a * other.at(k, c);
      }
    }
    renormalize_columns(rows_, other.cols_, v);
    return StochasticMatrix(rows_, other.cols_, std::move(v));
  }

  bool approx_equal(const StochasticMatrix& o, double tol) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (std::abs(v_[i] - o.v_[i]) > tol) return false;
    }
    return true;
  }

  static void renormalize_columns(std::size_t rows, std::size_t cols, std::vector<double>& v) {
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += v[r * cols + c];
      if (s > 0.0) {
        for (std::size_t r = 0; r < rows; ++r) v[r * cols + c] /= s;
      }
    }
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// M p.
inline std::vector<double> apply_kernel(const StochasticMatrix& m, std::span<const double> p) {
  if (p.size() != m.cols()) throw PreconditionError("apply_kernel: dimension mismatch");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out[r] += m.at(r, c) * p[c];
  }
  return out;
}

// P(input | output = y) under prior p.
inline std::vector<double> posterior(const StochasticMatrix& m, std::span<const double> p, std::size_t y) {
  if (p.size() != m.cols() || y >= m.rows()) throw PreconditionError("posterior: dimension mismatch");
  std::vector<double> out(m.cols());
  double q = 0.0;
  for (std::size_t x = 0; x < m.cols(); ++x) {
    out[x] = m.at(y, x) * p[x];
    q += out[x];
  }
  if (!(q > 0.0)) {
    throw PreconditionError("bayes_invert: output symbol " + std::to_string(y) + " has zero probability");
  }
  for (auto& v : out) v /= q;
  return out;
}

// Backward conditional P(input | output) as a matrix with rows = inputs,
// columns = outputs. Every output symbol must have positive probability.
inline StochasticMatrix bayes_invert(const StochasticMatrix& m, std::span<const double> p) {
  std::vector<double> v(m.cols() * m.rows());
  for (std::size_t y = 0; y < m.rows(); ++y) {
    const auto post = posterior(m, p, y);
    for (std::size_t x = 0; x < m.cols(); ++x) v[x * m.rows() + y] = post[x];
  }
  StochasticMatrix::renormalize_columns(m.cols(), m.rows(), v);
  return StochasticMatrix(m.cols(), m.rows(), std::move(v));
}

// Kronecker product: (A ⊗ B)(a b | a' b') = A(a|a') B(b|b').
inline StochasticMatrix kron(const StochasticMatrix& a, const StochasticMatrix& b) {
  const std::size_t rows = a.rows() * b.rows(), cols = a.cols() * b.cols();
  std::vector<double> v(rows * cols);
  for (std::size_t r1 = 0; r1 < a.rows(); ++r1)
    for (std::size_t r2 = 0; r2 < b.rows(); ++r2)
      for (std::size_t c1 = 0; c1 < a.cols(); ++c1)
        for (std::size_t c2 = 0; c2 < b.cols(); ++c2)
          v[(r1 * b.rows() + r2) * cols + c1 * b.cols() + c2] = a.at(r1, c1) * b.at(r2, c2);
  StochasticMatrix::renormalize_columns(rows, cols, v);
  return StochasticMatrix(rows, cols, std::move(v));
}

// ---------------------------------------------------------------------------
// Distributions attached to DAGs.

// Conditional table for one node: kernel[pa_config * arity(node) + value],
// with parent configurations enumerated row-major over the node's parents in
// label order.
using KernelTable = std::vector<double>;

namespace detail {

inline std::vector<std::size_t> dag_vars_to_dist(const DiscreteDistribution& p, const Dag& g) {
  if (p.num_vars() != g.size()) throw PreconditionError("distribution variables do not match graph nodes");
  std::vector<std::size_t> map(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) map[i] = p.var_index(g.label(i));
  return map;
}

inline std::vector<std::size_t> to_vars(const Dag& g, const std::vector<std::size_t>& dist_of,
                                        const NodeSet& set) {
  std::vector<std::size_t> out;
  for (const auto& v : set) out.push_back(dist_of[g.index_of(v)]);
  return out;
}

}  // namespace detail

// Joint distribution P = prod_j P(x_j | pa_j). Variables named and ordered as
// g.nodes(); `arity[i]` and `kernels[i]` refer to node g.label(i).
inline DiscreteDistribution factorize(const Dag& g, const std::vector<std::size_t>& arity,
                                      const std::vector<KernelTable>& kernels) {
  const std::size_t n = g.size();
  if (arity.size() != n || kernels.size() != n) throw PreconditionError("factorize: size mismatch");
  std::size_t size = 1;
  for (auto a : arity) size *= a;
  if (size > kMaxJointSize) throw PreconditionError("factorize: joint table too large");
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t i = n; i-- > 1;) strides[i - 1] = strides[i] * arity[i];
  std::vector<double> probs(size, 1.0);
  for (std::size_t flat = 0; flat < size; ++flat) {
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t cfg = 0;
      for (auto pa : g.parent_indices(v)) cfg = cfg * arity[pa] + (flat / strides[pa]) % arity[pa];
      probs[flat] *= kernels[v].at(cfg * arity[v] + (flat / strides[v]) % arity[v]);
    }
  }
  DiscreteDistribution::normalize(probs);
  return DiscreteDistribution(arity, std::move(probs), g.nodes());
}

// Strictly positive random kernels (entries drawn uniform then normalized).
inline std::vector<KernelTable> random_kernels(const Dag& g, const std::vector<std::size_t>& arity,
                                               Philox4x32& rng) {
  std::vector<KernelTable> out(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::size_t configs = 1;
    for (auto pa : g.parent_indices(v)) configs *= arity[pa];
    out[v].resize(configs * arity[v]);
    for (std::size_t c = 0; c < configs; ++c) {
      double s = 0.0;
      for (std::size_t x = 0; x < arity[v]; ++x) s += out[v][c * arity[v] + x] = 0.05 + rng.uniform01();
      for (std::size_t x = 0; x < arity[v]; ++x) out[v][c * arity[v] + x] /= s;
    }
  }
  return out;
}

struct MarkovReport {
  bool holds = true;
  double tolerance = kIndependenceTolerance;
  std::map<std::string, double> residuals;  // node -> I(x_j ; ND_j | PA_j) in bits
  double max_residual = 0.0;
};

// Local Markov condition: every node independent of its non-descendants given
// its parents.
inline MarkovReport is_markovian(const DiscreteDistribution& p, const Dag& g,
                                 double tol = kIndependenceTolerance) {
  const auto dist_of = detail::dag_vars_to_dist(p, g);
  MarkovReport rep;
  rep.tolerance = tol;
  for (const auto& v : g.nodes()) {
    const auto pa = parents(g, v);
    NodeSet nd;
    for (const auto& u : non_descendants(g, v)) {
      if (!pa.count(u)) nd.insert(u);
    }
    double r = 0.0;
    if (!nd.empty()) {
      r = conditional_mi(p, {dist_of[g.index_of(v)]}, detail::to_vars(g, dist_of, nd),
                         detail::to_vars(g, dist_of, pa));
    }
    rep.residuals[v] = r;
    rep.max_residual = std::max(rep.max_residual, r);
    if (r > tol) rep.holds = false;
  }
  return rep;
}

// Largest I(S;T|R) over all d-separated triples (global Markov condition).
inline double global_markov_residual(const DiscreteDistribution& p, const Dag& g) {
  const auto dist_of = detail::dag_vars_to_dist(p, g);
  double worst = 0.0;
  for_each_disjoint_triple(g, [&](const NodeSet& s, const NodeSet& t, const NodeSet& r) {
    if (*s.begin() > *t.begin()) return;  // symmetric; visit each unordered pair once
    if (!d_separated(g, s, t, r)) return;
    worst = std::max(worst, conditional_mi(p, detail::to_vars(g, dist_of, s), detail::to_vars(g, dist_of, t),
                                           detail::to_vars(g, dist_of, r)));
  });
  return worst;
}

// max |P(x) - prod_j P(x_j | pa_j)| with the conditionals read off P itself.
inline double factorization_residual(const DiscreteDistribution& p, const Dag& g) {
  const auto dist_of = detail::dag_vars_to_dist(p, g);
  std::vector<double> model(p.probs().size(), 1.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<std::size_t> fam;
    for (auto pa : g.parent_indices(v)) fam.push_back(dist_of[pa]);
    std::vector<std::size_t> pa_vars = fam;
    fam.push_back(dist_of[v]);
    const auto joint = p.marginal_table(fam);
    const auto pa_marg = p.marginal_table(pa_vars);
    const std::size_t a = p.arity()[dist_of[v]];
    for (std::size_t flat = 0; flat < model.size(); ++flat) {
      std::size_t cfg = 0;
      for (auto pv : pa_vars) cfg = cfg * p.arity()[pv] + p.digit(flat, pv);
      const double denom = pa_marg[cfg];
      model[flat] *= denom > 0.0 ? joint[cfg * a + p.digit(flat, dist_of[v])] / denom : 0.0;
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) worst = std::max(worst, std::abs(model[i] - p.probs()[i]));
  return worst;
}

struct FaithfulnessReport {
  bool faithful = true;
  // Independences found in P that the graph does not entail: (S, T, R, I bits).
  struct Extra {
    NodeSet s, t, r;
    double bits;
  };
  std::vector<Extra> unexplained;
};

// True iff every conditional independence of P (between nonempty disjoint
// node sets, tolerance `tol`) is entailed by d-separation in g.
inline FaithfulnessReport is_faithful(const DiscreteDistribution& p, const Dag& g,
                                      double tol = kIndependenceTolerance) {
  const auto dist_of = detail::dag_vars_to_dist(p, g);
  FaithfulnessReport rep;
  for_each_disjoint_triple(g, [&](const NodeSet& s, const NodeSet& t, const NodeSet& r) {
    if (*s.begin() > *t.begin()) return;
    const double i = conditional_mi(p, detail::to_vars(g, dist_of, s), detail::to_vars(g, dist_of, t),
                                    detail::to_vars(g, dist_of, r));
    if (i <= tol && !d_separated(g, s, t, r)) {
      rep.faithful = false;
      rep.unexplained.push_back({s, t, r, i});
    }
  });
  return rep;
}

}  // namespace algomc
