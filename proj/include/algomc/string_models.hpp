#pragma once

// Distributions and conditionals on {0,1}^n labelled by parameter strings,
// with idealized description-length accounting: an object that properly
// depends on an n-bit parameter string costs n bits, base objects (P_i, A_j)
// cost nothing.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algomc/bits.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

inline constexpr double kGenericityTolerance = 1e-9;

// P_c = P_{c_1} ⊗ ... ⊗ P_{c_n}; P_i is Bernoulli with P_i(1) = p_one[i].
struct ProductModel {
  BitString c;
  std::array<double, 2> p_one{0.5, 0.5};

  ProductModel() = default;
  ProductModel(BitString c_, double p0_one, double p1_one) : c(std::move(c_)), p_one{p0_one, p1_one} {
    if (c.empty()) throw PreconditionError("ProductModel: c must be nonempty");
    for (double p : p_one) {
      if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("ProductModel: Bernoulli parameter outside [0,1]");
    }
  }

  std::size_t n() const { return c.size(); }
  double p1_at(std::size_t j) const { return p_one[c[j]]; }
};

inline BitString product_sample(const ProductModel& m, Philox4x32& rng) {
  BitString x(m.n());
  for (std::size_t j = 0; j < m.n(); ++j) x[j] = rng.bernoulli(m.p1_at(j)) ? 1 : 0;
  return x;
}

inline double product_pmf(const ProductModel& m, const BitString& x) {
  if (x.size() != m.n()) throw PreconditionError("product_pmf: length mismatch");
  double p = 1.0;
  for (std::size_t j = 0; j < m.n(); ++j) p *= x[j] ? m.p1_at(j) : 1.0 - m.p1_at(j);
  return p;
}

// M_d = A_{d_1} ⊗ ... ⊗ A_{d_n}; A_k is a 2x2 column-stochastic matrix A_k(y|x).
struct TransitionModel {
  BitString d;
  std::array<StochasticMatrix, 2> a{StochasticMatrix::identity(2), StochasticMatrix::identity(2)};

  TransitionModel() = default;
  TransitionModel(BitString d_, StochasticMatrix a0, StochasticMatrix a1) : d(std::move(d_)), a{std::move(a0), std::move(a1)} {
    for (const auto& m : a) {
      if (m.rows() != 2 || m.cols() != 2) throw PreconditionError("TransitionModel: channels must be 2x2");
    }
  }

  std::size_t n() const { return d.size(); }
  const StochasticMatrix& at(std::size_t j) const { return a[d[j]]; }
};

inline BitString transition_sample(const TransitionModel& m, const BitString& x, Philox4x32& rng) {
  if (x.size() != m.n()) throw PreconditionError("transition_sample: length mismatch");
  BitString y(m.n());
  for (std::size_t j = 0; j < m.n(); ++j) y[j] = rng.bernoulli(m.at(j).at(1, x[j])) ? 1 : 0;
  return y;
}

inline double transition_prob(const TransitionModel& m, const BitString& y, const BitString& x) {
  double p = 1.0;
  for (std::size_t j = 0; j < m.n(); ++j) p *= m.at(j).at(y[j], x[j]);
  return p;
}

// The 2x2 building blocks derived from (P_0, P_1, A_0, A_1):
//   R_ij joint of (x, y) with x ~ P_i, y | x ~ A_j     (index r[i][j][x][y])
//   Q_ij = A_j P_i, marginal of y
//   B_ij backward conditional P(x | y), rows x, columns y
struct BaseObjects {
  std::array<std::array<double, 2>, 2> p{};  // p[i] = (P_i(0), P_i(1))
  std::array<StochasticMatrix, 2> a;
  std::array<std::array<std::array<double, 4>, 2>, 2> r{};
  std::array<std::array<std::array<double, 2>, 2>, 2> q{};
  std::array<std::array<std::optional<StochasticMatrix>, 2>, 2> b;

  static BaseObjects from(double p0_one, double p1_one, const StochasticMatrix& a0, const StochasticMatrix& a1) {
    BaseObjects o;
    o.p[0] = {1.0 - p0_one, p0_one};
    o.p[1] = {1.0 - p1_one, p1_one};
    o.a = {a0, a1};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) o.r[i][j][2 * x + y] = o.p[i][x] * o.a[j].at(y, x);
        const auto qv = apply_kernel(o.a[j], o.p[i]);
        o.q[i][j] = {qv[0], qv[1]};
        if (qv[0] > 0.0 && qv[1] > 0.0) o.b[i][j] = bayes_invert(o.a[j], o.p[i]);
      }
    }
    return o;
  }

  // Backward conditional B_ij; throws when Q_ij puts zero mass on some y.
  const StochasticMatrix& backward(int i, int j) const {
    if (!b[i][j]) {
      const int y = q[i][j][0] > 0.0 ? 1 : 0;
      throw PreconditionError("backward conditional B_" + std::to_string(i) + std::to_string(j) +
                              " undefined: output symbol " + std::to_string(y) + " has zero probability");
    }
    return *b[i][j];
  }
};

namespace detail {

template <class T>
bool close(const T& a, const T& b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

inline bool close_matrix(const std::optional<StochasticMatrix>& a, const std::optional<StochasticMatrix>& b,
                         double tol) {
  if (!a || !b) return !a && !b;
  return a->approx_equal(*b, tol);
}

}  // namespace detail

// Per-position exact tables of P(Y) = Q_{c,d}, P(X|Y) = B_{c,d}, P(X,Y) = R_{c,d}.
struct InducedObjects {
  BaseObjects base;
  BitString c, d;

  std::array<double, 2> marginal_y(std::size_t j) const { return base.q[c[j]][d[j]]; }
  const StochasticMatrix& backward(std::size_t j) const { return base.backward(c[j], d[j]); }
  std::array<double, 4> joint(std::size_t j) const { return base.r[c[j]][d[j]]; }

  double pmf_y(const BitString& y) const {
    double p = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) p *= marginal_y(j)[y[j]];
    return p;
  }
  double backward_prob(const BitString& x, const BitString& y) const {
    double p = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) p *= backward(j).at(x[j], y[j]);
    return p;
  }
};

inline InducedObjects induced_objects(const ProductModel& pm, const TransitionModel& tm) {
  if (pm.n() != tm.n()) throw PreconditionError("induced_objects: c and d lengths differ");
  InducedObjects out{BaseObjects::from(pm.p_one[0], pm.p_one[1], tm.a[0], tm.a[1]), pm.c, tm.d};
  for (std::size_t j = 0; j < pm.n(); ++j) out.backward(j);  // surface zero-mass errors now
  return out;
}

struct GenericityReport {
  bool generic = true;  // coincidences are exactly those forced by the case
  std::vector<std::string> violations;
};

enum class ParamCase { kCase1 = 1, kCase2 = 2, kCase3 = 3, kCase4 = 4 };

struct ObjectCost {
  std::string object;
  bool depends_on_c = false;
  bool depends_on_d = false;
  double bits = 0.0;           // n per dependence flag
  double counting_bits = 0.0;  // n log2(#distinct base objects reachable)
};

struct CaseTableReport {
  std::size_t n = 0;
  ParamCase param_case = ParamCase::kCase1;
  // P(X), P(Y|X), P(X,Y), P(Y), P(X|Y)
  std::vector<ObjectCost> objects;
  double forward_total = 0.0;   // K(P(X)) + K(P(Y|X))
  double backward_total = 0.0;  // K(P(Y)) + K(P(X|Y))
  std::string preference;       // "X->Y", "Y->X" or "tie at leading order"
  GenericityReport genericity;
};

inline CaseTableReport case_table(const ProductModel& pm, const TransitionModel& tm,
                                  double tol = kGenericityTolerance) {
  if (pm.n() != tm.n()) throw PreconditionError("case_table: c and d lengths differ");
  const auto base = BaseObjects::from(pm.p_one[0], pm.p_one[1], tm.a[0], tm.a[1]);
  const double n = static_cast<double>(pm.n());
  const bool p_differ = !detail::close(base.p[0], base.p[1], tol);
  const bool a_differ = !base.a[0].approx_equal(base.a[1], tol);

  CaseTableReport rep;
  rep.n = pm.n();
  rep.param_case = p_differ ? (a_differ ? ParamCase::kCase4 : ParamCase::kCase2)
                            : (a_differ ? ParamCase::kCase3 : ParamCase::kCase1);

  auto equal_r = [&](int i, int j, int k, int l) { return detail::close(base.r[i][j], base.r[k][l], tol); };
  auto equal_q = [&](int i, int j, int k, int l) { return detail::close(base.q[i][j], base.q[k][l], tol); };
  auto equal_b = [&](int i, int j, int k, int l) { return detail::close_matrix(base.b[i][j], base.b[k][l], tol); };

  // An (i, j)-labelled object depends on c if flipping i changes it for some
  // j, and on d if flipping j changes it for some i.
  auto pair_object = [&](const std::string& name, auto equal) {
    ObjectCost o;
    o.object = name;
    o.depends_on_c = !equal(0, 0, 1, 0) || !equal(0, 1, 1, 1);
    o.depends_on_d = !equal(0, 0, 0, 1) || !equal(1, 0, 1, 1);
    o.bits = n * (static_cast<int>(o.depends_on_c) + static_cast<int>(o.depends_on_d));
    std::vector<std::pair<int, int>> distinct;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                      [&](const auto& kl) { return equal(i, j, kl.first, kl.second); });
        if (!seen) distinct.emplace_back(i, j);
      }
    o.counting_bits = n * std::log2(static_cast<double>(distinct.size()));
    return o;
  };

  ObjectCost px{"P(X)", p_differ, false, p_differ ? n : 0.0, p_differ ? n : 0.0};
  ObjectCost pyx{"P(Y|X)", false, a_differ, a_differ ? n : 0.0, a_differ ? n : 0.0};
  rep.objects = {px, pyx, pair_object("P(X,Y)", equal_r), pair_object("P(Y)", equal_q),
                 pair_object("P(X|Y)", equal_b)};
  rep.forward_total = rep.objects[0].bits + rep.objects[1].bits;
  rep.backward_total = rep.objects[3].bits + rep.objects[4].bits;
  rep.preference = rep.forward_total < rep.backward_total   ? "X->Y"
                   : rep.backward_total < rep.forward_total ? "Y->X"
                                                            : "tie at leading order";

  // Genericity: two labels (i,j), (k,l) should coincide exactly when the case
  // forces it (same P or P_0 = P_1, and same A or A_0 = A_1).
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          if (2 * i + j >= 2 * k + l) continue;
          const bool forced = (i == k || !p_differ) && (j == l || !a_differ);
          const std::string tag = std::to_string(i) + std::to_string(j) + " vs " + std::to_string(k) + std::to_string(l);
          if (equal_q(i, j, k, l) != forced) {
            rep.genericity.generic = false;
            rep.genericity.violations.push_back("Q_" + tag);
          }
          if (equal_b(i, j, k, l) != forced) {
            rep.genericity.generic = false;
            rep.genericity.violations.push_back("B_" + tag);
          }
        }
  return rep;
}

struct CEstimate {
  BitString c_hat;
  std::vector<double> confidence;  // posterior of the chosen digit under a uniform prior
};

// Per position: pick the base distribution whose P_i(1) is closer to the
// relative frequency of ones; ties go to 0.
inline CEstimate estimate_c(const std::vector<BitString>& samples, double p0_one, double p1_one) {
  if (p0_one == p1_one) throw PreconditionError("estimate_c: P0 = P1, c is unidentifiable");
  if (samples.empty()) throw PreconditionError("estimate_c: need at least one sample");
  const std::size_t n = samples.front().size();
  const double m = static_cast<double>(samples.size());
  CEstimate out{BitString(n), std::vector<double>(n, 0.5)};
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t ones = 0;
    for (const auto& s : samples) {
      if (s.size() != n) throw PreconditionError("estimate_c: samples differ in length");
      ones += s[j];
    }
    const double f = static_cast<double>(ones) / m;
    out.c_hat[j] = std::abs(f - p1_one) < std::abs(f - p0_one) ? 1 : 0;
    const double k = static_cast<double>(ones);
    auto loglik = [&](double p) {
      const double a = k > 0 ? (p > 0 ? k * std::log(p) : -INFINITY) : 0.0;
      const double b = m - k > 0 ? (p < 1 ? (m - k) * std::log1p(-p) : -INFINITY) : 0.0;
      return a + b;
    };
    const double l0 = loglik(p0_one), l1 = loglik(p1_one);
    const double mx = std::max(l0, l1);
    if (std::isfinite(mx)) {
      const double post1 = std::exp(l1 - mx) / (std::exp(l0 - mx) + std::exp(l1 - mx));
      out.confidence[j] = out.c_hat[j] ? post1 : 1.0 - post1;
    }
  }
  return out;
}

struct CommonCauseReport {
  std::size_t n = 0;
  double forward_total = 0.0;   // K(P(X)) + K(P(Y|X))
  double backward_total = 0.0;  // K(P(Y)) + K(P(X|Y))
  double latent_total = 0.0;    // K(P(Z)) + K(P(X|Z)) + K(P(Y|Z))
  bool prefers_latent = false;
  double max_conditional_gap = 0.0;   // max |P(x|y) - P(x)| over positions
  double max_marginal_gap = 0.0;      // joint marginals vs product of identical tables
};

// Z = δ_c, X|Z and Y|Z both A^{⊗n}. Verifies exactly that X and Y are
// independent with identical marginals P_c (P_i = column i of A).
inline CommonCauseReport common_cause_model(const BitString& c, const StochasticMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2) throw PreconditionError("common_cause_model: A must be 2x2");
  CommonCauseReport rep;
  rep.n = c.size();
  const double n = static_cast<double>(c.size());
  const bool columns_differ = std::abs(a.at(1, 0) - a.at(1, 1)) > kGenericityTolerance;
  const double k_marginal = columns_differ ? n : 0.0;
  // P(Y|X) = P(Y) and P(X|Y) = P(X): each still labelled by c.
  rep.forward_total = k_marginal + k_marginal;
  rep.backward_total = k_marginal + k_marginal;
  rep.latent_total = n;
  rep.prefers_latent = rep.latent_total < rep.forward_total && rep.latent_total < rep.backward_total;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const int z = c[j];
    std::array<double, 4> joint{};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) joint[2 * x + y] = a.at(x, z) * a.at(y, z);
    for (int x = 0; x < 2; ++x) {
      const double px = joint[2 * x] + joint[2 * x + 1];
      rep.max_marginal_gap = std::max(rep.max_marginal_gap, std::abs(px - a.at(x, z)));
      for (int y = 0; y < 2; ++y) {
        const double py = joint[y] + joint[2 + y];
        if (py > 0) rep.max_conditional_gap = std::max(rep.max_conditional_gap, std::abs(joint[2 * x + y] / py - px));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Algorithmic generative models: every node string is computed by a program
// from its parents' strings and its own noise stream.

class GeneratorInputs {
 public:
  GeneratorInputs(const std::string& node, const std::map<std::string, Bytes>& values, const NodeSet& allowed)
      : node_(node), values_(values), allowed_(allowed) {}

  const Bytes& get(const std::string& parent) const {
    if (!allowed_.count(parent)) {
      throw PreconditionError("generator for node '" + node_ + "' read undeclared input '" + parent + "'");
    }
    return values_.at(parent);
  }
  const NodeSet& declared() const { return allowed_; }

 private:
  const std::string& node_;
  const std::map<std::string, Bytes>& values_;
  const NodeSet& allowed_;
};

struct NodeProgram {
  NodeSet reads;
  std::function<Bytes(const GeneratorInputs&, Philox4x32& noise)> run;
};

namespace programs {

inline NodeProgram random_source(std::size_t len) {
  return {{}, [len](const GeneratorInputs&, Philox4x32& noise) { return noise.bytes(len); }};
}

inline NodeProgram copy_of(const std::string& parent) {
  return {{parent}, [parent](const GeneratorInputs& in, Philox4x32&) { return in.get(parent); }};
}

// Declared inputs in label order, then `noise_len` fresh bytes.
inline NodeProgram concat_with_noise(NodeSet parents, std::size_t noise_len) {
  return {parents, [parents, noise_len](const GeneratorInputs& in, Philox4x32& noise) {
            Bytes out;
            for (const auto& p : parents) {
              const auto& v = in.get(p);
              out.insert(out.end(), v.begin(), v.end());
            }
            const auto extra = noise.bytes(noise_len);
            out.insert(out.end(), extra.begin(), extra.end());
            return out;
          }};
}

// Drops `drop` bytes from the left or the right end (side drawn from noise),
// then appends `noise_len` fresh bytes.
inline NodeProgram truncate_with_noise(const std::string& parent, std::size_t drop, std::size_t noise_len) {
  return {{parent}, [parent, drop, noise_len](const GeneratorInputs& in, Philox4x32& noise) {
            const auto& v = in.get(parent);
            const std::size_t k = std::min(drop, v.size());
            Bytes out = noise.bernoulli(0.5) ? Bytes(v.begin() + static_cast<std::ptrdiff_t>(k), v.end())
                                             : Bytes(v.begin(), v.end() - static_cast<std::ptrdiff_t>(k));
            const auto extra = noise.bytes(noise_len);
            out.insert(out.end(), extra.begin(), extra.end());
            return out;
          }};
}

}  // namespace programs

class AlgorithmicGenerator {
 public:
  AlgorithmicGenerator(Dag g, std::map<std::string, NodeProgram> programs, std::uint64_t master_seed)
      : g_(std::move(g)), programs_(std::move(programs)), master_(master_seed) {
    for (const auto& v : g_.nodes()) {
      const auto it = programs_.find(v);
      if (it == programs_.end()) throw PreconditionError("generator: no program for node '" + v + "'");
      const auto pa = parents(g_, v);
      for (const auto& r : it->second.reads) {
        if (!pa.count(r)) {
          throw PreconditionError("generator for node '" + v + "' reads non-parent '" + r + "'");
        }
      }
    }
    for (const auto& [name, _] : programs_) g_.index_of(name);
    SeedRegistry reg(master_);
    for (const auto& v : g_.nodes()) noise_seeds_[v] = reg.seed("noise/" + v);
  }

  const Dag& dag() const noexcept { return g_; }
  const std::map<std::string, std::uint64_t>& noise_seeds() const noexcept { return noise_seeds_; }

  std::map<std::string, Bytes> generate() const {
    std::map<std::string, Bytes> values;
    for (auto idx : g_.topological_order()) {
      const auto& v = g_.label(idx);
      const auto& prog = programs_.at(v);
      Philox4x32 noise(noise_seeds_.at(v));
      values[v] = prog.run(GeneratorInputs(v, values, prog.reads), noise);
    }
    return values;
  }

 private:
  Dag g_;
  std::map<std::string, NodeProgram> programs_;
  std::uint64_t master_;
  std::map<std::string, std::uint64_t> noise_seeds_;
};

inline std::map<std::string, Bytes> generate_from_model(const AlgorithmicGenerator& gen) { return gen.generate(); }

// Shipped generator families over an arbitrary DAG:
//   "concat":   roots emit `root_len` random bytes; other nodes concatenate
//               their parents and append `noise_len` fresh bytes.
//   "truncate": like "concat", but single-parent nodes drop a quarter of the
//               parent from a random end before appending noise.
inline AlgorithmicGenerator shipped_generator(const Dag& g, const std::string& family, std::uint64_t master,
                                              std::size_t root_len = 256, std::size_t noise_len = 96) {
  std::map<std::string, NodeProgram> progs;
  for (const auto& v : g.nodes()) {
    const auto pa = parents(g, v);
    if (pa.empty()) {
      progs[v] = programs::random_source(root_len);
    } else if (family == "truncate" && pa.size() == 1) {
      progs[v] = programs::truncate_with_noise(*pa.begin(), root_len / 4, noise_len);
    } else if (family == "concat" || family == "truncate") {
      progs[v] = programs::concat_with_noise(pa, noise_len);
    } else {
      throw PreconditionError("unknown generator family '" + family + "'");
    }
  }
  return AlgorithmicGenerator(g, std::move(progs), master);
}

}  // namespace algomc
