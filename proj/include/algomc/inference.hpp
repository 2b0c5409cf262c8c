#pragma once

// Causal inference rules built on the algorithmic Markov condition and on
// complexity accounting of Markov kernels.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "algomc/bits.hpp"
#include "algomc/complexity.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"
#include "algomc/string_models.hpp"

namespace algomc {

enum class Decision { kAccepted, kRejected, kUndecided };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::kAccepted: return "accepted";
    case Decision::kRejected: return "rejected";
    case Decision::kUndecided: return "undecided";
  }
  return "?";
}

struct Statistic {
  std::string label;
  double value_bits = 0.0;
  double threshold_bits = 0.0;
};

struct Verdict {
  Decision decision = Decision::kUndecided;
  std::string detail;
  std::vector<Statistic> statistics;
};

using NodeData = std::map<std::string, Bytes>;

namespace detail {

inline Bytes framed_nodes(const NodeData& data, const NodeSet& nodes) {
  std::vector<Bytes> parts;
  for (const auto& v : nodes) parts.push_back(data.at(v));
  return concat_framed(parts);
}

}  // namespace detail

// For each node j: I(x_j : nd_j | pa_j), with nd_j the non-descendants other
// than the parents, both concatenated in label order with length prefixes.
// Rejects when any estimate exceeds the threshold (default: per-term slack).
inline Verdict algorithmic_markov_test(const NodeData& data, const Dag& g, const Compressor& c,
                                       std::optional<double> threshold = std::nullopt) {
  for (const auto& v : g.nodes()) {
    const auto it = data.find(v);
    if (it == data.end()) throw PreconditionError("algorithmic_markov_test: missing data for node '" + v + "'");
    if (it->second.empty()) throw PreconditionError("algorithmic_markov_test: empty string for node '" + v + "'");
  }
  Verdict out;
  out.decision = Decision::kAccepted;
  for (const auto& v : g.nodes()) {
    const auto pa = parents(g, v);
    NodeSet nd;
    for (const auto& w : non_descendants(g, v)) {
      if (!pa.count(w)) nd.insert(w);
    }
    if (nd.empty()) continue;
    const Bytes nd_bytes = detail::framed_nodes(data, nd);
    const Bytes pa_bytes = detail::framed_nodes(data, pa);
    const auto e = algorithmic_cmi(c, data.at(v), nd_bytes, pa_bytes);
    const double thr = threshold.value_or(e.slack_bits);
    out.statistics.push_back({"I(" + v + " : nd | pa)", e.value_bits, thr});
    if (e.value_bits > thr) out.decision = Decision::kRejected;
  }
  out.detail = out.decision == Decision::kAccepted ? "all local conditions hold within threshold"
                                                   : "some node depends on its non-descendants given its parents";
  return out;
}

using KernelComplexityAssignment = std::map<std::string, double>;

struct Hypothesis {
  std::string name;
  KernelComplexityAssignment kernels;  // node -> K(P(node | parents)) in bits
};

struct ScoredHypothesis {
  std::string name;
  double total_bits = 0.0;
};

struct ComplexityRanking {
  std::vector<ScoredHypothesis> ranked;  // ascending total
  Decision decision = Decision::kUndecided;
  std::string winner;  // empty when undecided
};

// Sum of kernel complexities per hypothesis; the unique minimum wins.
inline ComplexityRanking total_complexity_score(const std::vector<Hypothesis>& hyps, double tie_tolerance = 1e-9) {
  if (hyps.size() < 2) throw PreconditionError("total_complexity_score: need at least two hypotheses");
  ComplexityRanking r;
  for (const auto& h : hyps) {
    double t = 0.0;
    for (const auto& [node, bits] : h.kernels) {
      if (bits < 0) throw PreconditionError("total_complexity_score: negative kernel complexity for '" + node + "'");
      t += bits;
    }
    r.ranked.push_back({h.name, t});
  }
  std::stable_sort(r.ranked.begin(), r.ranked.end(),
                   [](const auto& a, const auto& b) { return a.total_bits < b.total_bits; });
  if (r.ranked[1].total_bits - r.ranked[0].total_bits > tie_tolerance) {
    r.decision = Decision::kAccepted;
    r.winner = r.ranked[0].name;
  }
  return r;
}

// The two-node hypotheses X->Y and Y->X with the idealized costs of a case table.
inline std::vector<Hypothesis> two_node_hypotheses(const CaseTableReport& t) {
  return {{"X->Y", {{"X", t.objects[0].bits}, {"Y", t.objects[1].bits}}},
          {"Y->X", {{"Y", t.objects[3].bits}, {"X", t.objects[4].bits}}}};
}

inline std::vector<Hypothesis> common_cause_hypotheses(const CommonCauseReport& r) {
  const double half = r.forward_total / 2.0;
  return {{"X->Y", {{"X", half}, {"Y", half}}},
          {"Y->X", {{"Y", half}, {"X", half}}},
          {"X<-Z->Y", {{"Z", r.latent_total}, {"X", 0.0}, {"Y", 0.0}}}};
}

// ---------------------------------------------------------------------------

struct EnsembleReport {
  std::size_t split = 0;
  MiEstimate x1_y2_given_x2;  // I(x¹ : y² | x²)
  MiEstimate x2_y1_given_x1;  // I(x² : y¹ | x¹)
  MiEstimate y1_x2_given_y2;  // I(y¹ : x² | y²)
  MiEstimate y2_x1_given_y1;  // I(y² : x¹ | y¹)
  double threshold_bits = 0.0;
  std::string direction;  // "X->Y", "Y->X" or "undecided"
};

inline std::size_t default_split(std::size_t m) { return (m + 1) / 2; }

// Splits both samples into blocks 1..k and k+1..m. X->Y is supported when
// I(x¹:y²|x²) and I(x²:y¹|x¹) vanish while I(y¹:x²|y²) or I(y²:x¹|y¹) does not.
inline EnsembleReport resolved_ensemble_test(const std::vector<Bytes>& xs, const std::vector<Bytes>& ys,
                                             std::size_t k, const Compressor& c,
                                             std::optional<double> threshold = std::nullopt) {
  if (xs.size() != ys.size()) throw PreconditionError("resolved_ensemble_test: sample sizes differ");
  if (xs.size() < 2) throw PreconditionError("resolved_ensemble_test: need at least two samples");
  if (k < 1 || k >= xs.size()) throw PreconditionError("resolved_ensemble_test: split leaves an empty block");
  auto block = [](const std::vector<Bytes>& v, std::size_t lo, std::size_t hi) {
    return concat_framed(std::vector<Bytes>(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                            v.begin() + static_cast<std::ptrdiff_t>(hi)));
  };
  const Bytes x1 = block(xs, 0, k), x2 = block(xs, k, xs.size());
  const Bytes y1 = block(ys, 0, k), y2 = block(ys, k, ys.size());
  EnsembleReport r;
  r.split = k;
  r.x1_y2_given_x2 = algorithmic_cmi(c, x1, y2, x2);
  r.x2_y1_given_x1 = algorithmic_cmi(c, x2, y1, x1);
  r.y1_x2_given_y2 = algorithmic_cmi(c, y1, x2, y2);
  r.y2_x1_given_y1 = algorithmic_cmi(c, y2, x1, y1);
  r.threshold_bits = threshold.value_or(default_slack_bits(x1.size() + x2.size() + y1.size() + y2.size()));
  const double t = r.threshold_bits;
  const bool forward_clean = r.x1_y2_given_x2.value_bits <= t && r.x2_y1_given_x1.value_bits <= t;
  const bool backward_dirty = r.y1_x2_given_y2.value_bits > t || r.y2_x1_given_y1.value_bits > t;
  const bool backward_clean = r.y1_x2_given_y2.value_bits <= t && r.y2_x1_given_y1.value_bits <= t;
  const bool forward_dirty = r.x1_y2_given_x2.value_bits > t || r.x2_y1_given_x1.value_bits > t;
  r.direction = forward_clean && backward_dirty   ? "X->Y"
                : backward_clean && forward_dirty ? "Y->X"
                                                  : "undecided";
  return r;
}

struct TruncationInstance {
  BitString a;
  std::vector<Bytes> xs, ys;
};

// The source emits the fixed string a twice; the machine removes `ell`
// symbols from one end. With sides = "fixed" the first output loses its
// beginning and the second its end; with sides = "random" each end is drawn
// from `rng`.
inline TruncationInstance truncation_instance(std::size_t n, std::size_t ell, Philox4x32& rng,
                                              const std::string& sides = "fixed") {
  if (ell == 0 || ell >= n) throw PreconditionError("truncation_instance: need 0 < ell < n");
  if (sides != "fixed" && sides != "random") throw PreconditionError("truncation_instance: sides must be fixed or random");
  TruncationInstance t;
  t.a = BitString::random(n, rng);
  const Bytes packed = t.a.pack();
  for (int i = 0; i < 2; ++i) {
    const bool drop_left = sides == "fixed" ? i == 0 : rng.bernoulli(0.5);
    t.xs.push_back(packed);
    t.ys.push_back((drop_left ? t.a.substr(ell, n - ell) : t.a.substr(0, n - ell)).pack());
  }
  return t;
}

// ---------------------------------------------------------------------------

struct BlurDecision {
  MiEstimate model_overlap;   // I(D_X : D~_XY)
  MiEstimate sample_overlap;  // I(x~ : D_X)
  double threshold_bits = 0.0;
  bool rejected = false;
};

// Rejects X->Y when the blurred-sample model shares more information with
// D_X than the blurred x-values themselves do.
inline BlurDecision blur_decision(const Compressor& c, ByteView d_x, ByteView d_xy, ByteView x_tilde,
                                  std::optional<double> threshold = std::nullopt) {
  BlurDecision b;
  b.model_overlap = algorithmic_mi(c, d_x, d_xy);
  b.sample_overlap = algorithmic_mi(c, x_tilde, d_x);
  b.threshold_bits = threshold.value_or(b.model_overlap.slack_bits);
  b.rejected = b.model_overlap.value_bits > std::max(b.sample_overlap.value_bits, 0.0) + b.threshold_bits;
  return b;
}

struct BlurBackground {
  double p0_one = 0.1;
  double p1_one = 0.9;
  StochasticMatrix a0 = StochasticMatrix::binary_symmetric(0.1);
  StochasticMatrix a1 = StochasticMatrix::binary_symmetric(0.9);
};

struct BlurReport {
  BitString c_hat, d_hat;
  BitString x_tilde;  // blurred x-values, position by position
  std::size_t per_value = 0;
  BlurDecision decision;
};

// Positionwise uniformization: for every position j pick `per_value` samples
// with x_j = 0 and as many with x_j = 1 (chosen by `rng`), so the selected
// x-values at j are uniform. D~_XY is the d estimate from those pairs and x~
// lists the selected x-values in lexicographic order.
inline BlurReport subsample_blur_test(const std::vector<BitString>& xs, const std::vector<BitString>& ys,
                                      const BlurBackground& bg, const Compressor& c, std::size_t per_value,
                                      Philox4x32& rng, std::optional<double> threshold = std::nullopt) {
  if (xs.size() != ys.size() || xs.empty()) throw PreconditionError("subsample_blur_test: sample sizes differ or are zero");
  if (per_value == 0) throw PreconditionError("subsample_blur_test: per_value must be positive");
  const std::size_t n = xs.front().size();
  BlurReport r;
  r.per_value = per_value;
  r.c_hat = estimate_c(xs, bg.p0_one, bg.p1_one).c_hat;
  r.d_hat = BitString(n);
  r.x_tilde = BitString(n * 2 * per_value);
  const std::array<const StochasticMatrix*, 2> a{&bg.a0, &bg.a1};
  for (std::size_t j = 0; j < n; ++j) {
    std::array<std::vector<std::size_t>, 2> by_value;
    for (std::size_t s = 0; s < xs.size(); ++s) by_value[xs[s][j]].push_back(s);
    std::array<double, 2> loglik{0.0, 0.0};
    for (int v = 0; v < 2; ++v) {
      if (by_value[v].size() < per_value) {
        throw PreconditionError("subsample_blur_test: cannot form a uniform subsample at position " +
                                std::to_string(j) + " (only " + std::to_string(by_value[v].size()) +
                                " samples with value " + std::to_string(v) + ")");
      }
      rng.shuffle(by_value[v]);
      for (std::size_t t = 0; t < per_value; ++t) {
        const auto s = by_value[v][t];
        for (int k = 0; k < 2; ++k) loglik[k] += std::log(std::max(a[k]->at(ys[s][j], v), 1e-300));
      }
    }
    r.d_hat[j] = loglik[1] > loglik[0] ? 1 : 0;
    for (std::size_t t = 0; t < per_value; ++t) r.x_tilde[j * 2 * per_value + per_value + t] = 1;
  }
  r.decision = blur_decision(c, r.c_hat.pack(), r.d_hat.pack(), r.x_tilde.pack(), threshold);
  return r;
}

struct PairedSamples {
  std::vector<BitString> xs, ys;
};

inline PairedSamples sample_product_transition(const ProductModel& pm, const TransitionModel& tm, std::size_t m,
                                               Philox4x32& rng) {
  PairedSamples s;
  for (std::size_t i = 0; i < m; ++i) {
    s.xs.push_back(product_sample(pm, rng));
    s.ys.push_back(transition_sample(tm, s.xs.back(), rng));
  }
  return s;
}

// ---------------------------------------------------------------------------

// A positionwise model family for one causal direction: at every position the
// cause's marginal is one of `marginals` and the effect's conditional
// (rows effect, columns cause) is one of `conditionals`, chosen independently.
struct DirectionFamily {
  std::vector<std::array<double, 2>> marginals;
  std::vector<StochasticMatrix> conditionals;
};

struct MdlScore {
  double forward_bits = 0.0;   // C_{X->Y}
  double backward_bits = 0.0;  // C_{Y->X}
  double forward_model_bits = 0.0, backward_model_bits = 0.0;
  std::string preference;
  std::string caveat =
      "heuristic: two-part codelength comparison; not known to follow from the algorithmic Markov condition";
};

namespace detail {

// Model codelength n log2|family| per component plus the best per-position
// data codelength -log2 P(cause) - log2 P(effect | cause).
inline std::pair<double, double> direction_codelength(const std::vector<BitString>& cause,
                                                      const std::vector<BitString>& effect,
                                                      const DirectionFamily& fam) {
  if (fam.marginals.empty() || fam.conditionals.empty())
    throw PreconditionError("mdl_direction_score: empty model family");
  const std::size_t n = cause.front().size();
  const double model_bits = static_cast<double>(n) * (std::log2(static_cast<double>(fam.marginals.size())) +
                                                      std::log2(static_cast<double>(fam.conditionals.size())));
  double data_bits = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::array<double, 2> nc{0, 0};
    std::array<double, 4> nce{0, 0, 0, 0};
    for (std::size_t s = 0; s < cause.size(); ++s) {
      nc[cause[s][j]] += 1;
      nce[2 * cause[s][j] + effect[s][j]] += 1;
    }
    auto cost = [](double count, double p) {
      if (count == 0) return 0.0;
      return p > 0 ? -count * std::log2(p) : INFINITY;
    };
    double best_m = INFINITY, best_c = INFINITY;
    for (const auto& p : fam.marginals) best_m = std::min(best_m, cost(nc[0], p[0]) + cost(nc[1], p[1]));
    for (const auto& a : fam.conditionals) {
      double t = 0;
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) t += cost(nce[2 * u + v], a.at(v, u));
      best_c = std::min(best_c, t);
    }
    if (!std::isfinite(best_m) || !std::isfinite(best_c)) {
      throw PreconditionError("mdl_direction_score: every model assigns zero mass to an observed point at position " +
                              std::to_string(j));
    }
    data_bits += best_m + best_c;
  }
  return {model_bits, model_bits + data_bits};
}

}  // namespace detail

inline MdlScore mdl_direction_score(const std::vector<BitString>& xs, const std::vector<BitString>& ys,
                                    const DirectionFamily& forward, const DirectionFamily& backward) {
  if (xs.size() != ys.size() || xs.empty()) throw PreconditionError("mdl_direction_score: sample sizes differ or are zero");
  MdlScore s;
  std::tie(s.forward_model_bits, s.forward_bits) = detail::direction_codelength(xs, ys, forward);
  std::tie(s.backward_model_bits, s.backward_bits) = detail::direction_codelength(ys, xs, backward);
  s.preference = s.forward_bits < s.backward_bits   ? "X->Y"
                 : s.backward_bits < s.forward_bits ? "Y->X"
                                                    : "tie";
  return s;
}

// Families induced by base objects: forward {P_i} x {A_j}, backward
// {Q_ij} x {B_ij}, duplicates removed.
inline std::pair<DirectionFamily, DirectionFamily> families_from_base(const BaseObjects& b,
                                                                      double tol = kGenericityTolerance) {
  DirectionFamily fwd, bwd;
  auto add_marg = [tol](std::vector<std::array<double, 2>>& v, const std::array<double, 2>& p) {
    for (const auto& q : v) {
      if (detail::close(p, q, tol)) return;
    }
    v.push_back(p);
  };
  auto add_cond = [tol](std::vector<StochasticMatrix>& v, const StochasticMatrix& m) {
    for (const auto& q : v) {
      if (q.approx_equal(m, tol)) return;
    }
    v.push_back(m);
  };
  for (int i = 0; i < 2; ++i) {
    add_marg(fwd.marginals, b.p[i]);
    add_cond(fwd.conditionals, b.a[i]);
    for (int j = 0; j < 2; ++j) {
      add_marg(bwd.marginals, b.q[i][j]);
      add_cond(bwd.conditionals, b.backward(i, j));
    }
  }
  return {fwd, bwd};
}

// ---------------------------------------------------------------------------

struct GaussMixReport {
  double mu = 0, lambda = 0, sigma = 1;
  std::size_t grid_points = 0;
  double max_sigmoid_bayes_gap = 0.0;
  std::vector<std::string> marginal_params;     // parameters of P(Y)
  std::vector<std::string> conditional_params;  // parameters of P(X|Y)
  bool shares_parameters = false;
  // Detuned mode only.
  bool detuned = false;
  double slice_gaussian_distance = 0.0;  // max over X of KS distance to moment-matched Gaussian
};

namespace detail {

inline double normal_pdf(double y, double mean, double sd) {
  const double z = (y - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

inline double normal_cdf(double y, double mean, double sd) { return 0.5 * std::erfc(-(y - mean) / (sd * M_SQRT2)); }

}  // namespace detail

// P(X=1 | y) for X in {-1,+1} uniform and Y | x ~ N(mu + x lambda, sigma^2).
inline double gauss_mix_sigmoid(double y, double mu, double lambda, double sigma) {
  return 0.5 * (1.0 + std::tanh(lambda * (y - mu) / (sigma * sigma)));
}

inline double gauss_mix_marginal(double y, double mu, double lambda, double sigma) {
  return 0.5 * detail::normal_pdf(y, mu - lambda, sigma) + 0.5 * detail::normal_pdf(y, mu + lambda, sigma);
}

struct Detuning {
  double mu, lambda, sigma;
};

inline GaussMixReport gauss_mix_demo(double mu, double lambda, double sigma,
                                     std::optional<Detuning> detune = std::nullopt,
                                     std::size_t grid_points = 10000) {
  if (!(sigma > 0)) throw PreconditionError("gauss_mix_demo: sigma must be positive");
  if (detune && !(detune->sigma > 0)) throw PreconditionError("gauss_mix_demo: detuned sigma must be positive");
  if (grid_points < 2) throw PreconditionError("gauss_mix_demo: need at least two grid points");
  GaussMixReport r;
  r.mu = mu;
  r.lambda = lambda;
  r.sigma = sigma;
  r.grid_points = grid_points;
  const double lo = mu - std::abs(lambda) - 8 * sigma, hi = mu + std::abs(lambda) + 8 * sigma;
  const double h = (hi - lo) / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double y = lo + h * static_cast<double>(i);
    const double num = 0.5 * detail::normal_pdf(y, mu + lambda, sigma);
    const double bayes = num / gauss_mix_marginal(y, mu, lambda, sigma);
    r.max_sigmoid_bayes_gap = std::max(r.max_sigmoid_bayes_gap, std::abs(bayes - gauss_mix_sigmoid(y, mu, lambda, sigma)));
  }
  r.marginal_params = {"mu", "lambda", "sigma"};
  r.conditional_params = {"mu", "lambda/sigma^2"};
  // mu appears in both; lambda/sigma^2 is a function of (lambda, sigma).
  r.shares_parameters = lambda != 0.0;

  if (detune) {
    r.detuned = true;
    for (int xv : {-1, 1}) {
      std::vector<double> w(grid_points);
      double mass = 0, m1 = 0, m2 = 0;
      for (std::size_t i = 0; i < grid_points; ++i) {
        const double y = lo + h * static_cast<double>(i);
        const double s1 = gauss_mix_sigmoid(y, detune->mu, detune->lambda, detune->sigma);
        w[i] = gauss_mix_marginal(y, mu, lambda, sigma) * (xv == 1 ? s1 : 1.0 - s1);
        mass += w[i];
        m1 += w[i] * y;
        m2 += w[i] * y * y;
      }
      const double mean = m1 / mass;
      const double sd = std::sqrt(std::max(m2 / mass - mean * mean, 1e-300));
      double cdf = 0, ks = 0;
      for (std::size_t i = 0; i < grid_points; ++i) {
        const double y = lo + h * static_cast<double>(i);
        cdf += w[i] / mass;
        ks = std::max(ks, std::abs(cdf - detail::normal_cdf(y + h / 2, mean, sd)));
      }
      r.slice_gaussian_distance = std::max(r.slice_gaussian_distance, ks);
    }
  }
  return r;
}

}  // namespace algomc
