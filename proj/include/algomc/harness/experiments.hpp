#pragma once

// Experiment drivers. Every driver reads typed parameters, derives all of its
// randomness from the master seed through labelled streams, and records each
// numeric claim with its tolerance and a pass flag.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "algomc/compress.hpp"
#include "algomc/complexity.hpp"
#include "algomc/dag.hpp"
#include "algomc/discrete.hpp"
#include "algomc/harness/config.hpp"
#include "algomc/harness/report.hpp"
#include "algomc/inference.hpp"
#include "algomc/rng.hpp"
#include "algomc/string_models.hpp"
#include "algomc/symmetry.hpp"
#include "algomc/timeseries.hpp"

namespace algomc::harness {

struct Experiment {
  std::string id;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<void(const Params&, std::uint64_t seed, RunReport&)> run;
};

namespace detail {

inline std::string node_label(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

// Calls f(g) for every DAG on the labels A, B, ... (n of them).
template <class F>
void for_each_dag(std::size_t n, F&& f) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(node_label(i));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::vector<std::size_t>> out(n);
    std::vector<Edge> edges;
    std::size_t c = code;
    for (const auto& [i, j] : pairs) {
      const auto state = c % 3;
      c /= 3;
      if (state == 1) {
        edges.emplace_back(nodes[i], nodes[j]);
        out[i].push_back(j);
      } else if (state == 2) {
        edges.emplace_back(nodes[j], nodes[i]);
        out[j].push_back(i);
      }
    }
    // Kahn's check before constructing, so cyclic codes cost no exception.
    std::vector<int> indeg(n, 0);
    for (const auto& o : out)
      for (auto w : o) ++indeg[w];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
      if (indeg[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
      const auto v = ready.back();
      ready.pop_back();
      ++seen;
      for (auto w : out[v]) {
        if (--indeg[w] == 0) ready.push_back(w);
      }
    }
    if (seen == n) f(Dag(nodes, edges));
  }
}

// Random DAG on n nodes: random order, each forward pair an edge with prob. density.
inline Dag random_dag(std::size_t n, double density, Philox4x32& rng) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(node_label(i));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(density)) edges.emplace_back(nodes[order[i]], nodes[order[j]]);
    }
  return Dag(nodes, edges);
}

inline StochasticMatrix random_binary_channel(Philox4x32& rng) {
  const double a = 0.05 + 0.9 * rng.uniform01(), b = 0.05 + 0.9 * rng.uniform01();
  return StochasticMatrix::from_rows({{1 - a, b}, {a, 1 - b}});
}

// Fixed base objects for the four cases (generic choices).
struct CaseBase {
  double p0_one, p1_one;
  StochasticMatrix a0, a1;
};

inline CaseBase case_base(int which) {
  const double p0 = 0.2, p1 = 0.7;
  const auto a0 = StochasticMatrix::from_rows({{0.9, 0.3}, {0.1, 0.7}});
  const auto a1 = StochasticMatrix::from_rows({{0.6, 0.15}, {0.4, 0.85}});
  switch (which) {
    case 1: return {p0, p0, a0, a0};
    case 2: return {p0, p1, a0, a0};
    case 3: return {p0, p0, a0, a1};
    default: return {p0, p1, a0, a1};
  }
}

}  // namespace detail

inline std::vector<Experiment> experiments() {
  using P = ParamType;
  std::vector<Experiment> ex;

  ex.push_back({"dsep-oracle",
                "Bayes-ball d-separation against the moralized ancestral graph criterion on every small DAG",
                {{"max_nodes", P::kInt, "4", "largest node count enumerated (all DAGs)"}},
                [](const Params& p, std::uint64_t, RunReport& r) {
                  const auto max_n = static_cast<std::size_t>(p.integer("max_nodes"));
                  if (max_n < 1 || max_n > 5) throw ConfigError("max_nodes must lie in [1, 5]");
                  std::size_t dags = 0, queries = 0, mismatches = 0;
                  for (std::size_t n = 1; n <= max_n; ++n) {
                    detail::for_each_dag(n, [&](const Dag& g) {
                      ++dags;
                      for_each_disjoint_triple(g, [&](const NodeSet& s, const NodeSet& t, const NodeSet& rr) {
                        ++queries;
                        if (d_separated(g, s, t, rr) != d_separated_moral(g, s, t, rr)) ++mismatches;
                      });
                    });
                  }
                  r.info("dags", static_cast<double>(dags));
                  r.info("queries", static_cast<double>(queries));
                  r.at_most("mismatches", static_cast<double>(mismatches), 0, Provenance::kOracle);
                }});

  ex.push_back({"markov-equiv",
                "Local, global and factorization Markov conditions on random Markovian distributions; "
                "skeleton/v-structure equivalence against equality of d-separation statements",
                {{"trials", P::kInt, "500", "random distributions"},
                 {"max_nodes", P::kInt, "4", "nodes per DAG"},
                 {"max_arity", P::kInt, "3", "largest variable arity"},
                 {"pairs", P::kInt, "300", "random DAG pairs for the equivalence check"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto trials = p.integer("trials"), pairs = p.integer("pairs");
                  const auto max_n = static_cast<std::size_t>(p.integer("max_nodes"));
                  const auto max_a = static_cast<std::size_t>(p.integer("max_arity"));
                  if (max_n < 2 || max_n > 5 || max_a < 2 || max_a > 4) throw ConfigError("need 2 <= max_nodes <= 5, 2 <= max_arity <= 4");
                  auto rng = stream(seed, "markov-equiv/distributions");
                  double local = 0, global = 0, fact = 0;
                  for (long long t = 0; t < trials; ++t) {
                    const auto n = 2 + static_cast<std::size_t>(rng.uniform_int(max_n - 1));
                    const auto g = detail::random_dag(n, 0.5, rng);
                    std::vector<std::size_t> arity(n);
                    for (auto& a : arity) a = 2 + static_cast<std::size_t>(rng.uniform_int(max_a - 1));
                    const auto dist = factorize(g, arity, random_kernels(g, arity, rng));
                    local = std::max(local, is_markovian(dist, g).max_residual);
                    global = std::max(global, global_markov_residual(dist, g));
                    fact = std::max(fact, factorization_residual(dist, g));
                  }
                  r.at_most("max_local_residual_bits", local, 1e-9, Provenance::kExact);
                  r.at_most("max_global_residual_bits", global, 1e-9, Provenance::kExact);
                  r.at_most("max_factorization_residual", fact, 1e-12, Provenance::kExact);
                  auto prng = stream(seed, "markov-equiv/pairs");
                  std::size_t disagreements = 0, equivalent = 0;
                  for (long long t = 0; t < pairs; ++t) {
                    const auto n = 2 + static_cast<std::size_t>(prng.uniform_int(std::min<std::size_t>(max_n, 4) - 1));
                    const auto g1 = detail::random_dag(n, 0.5, prng), g2 = detail::random_dag(n, 0.5, prng);
                    bool same = true;
                    for_each_disjoint_triple(g1, [&](const NodeSet& s, const NodeSet& tt, const NodeSet& rr) {
                      if (d_separated(g1, s, tt, rr) != d_separated(g2, s, tt, rr)) same = false;
                    });
                    equivalent += same;
                    if (same != markov_equivalent(g1, g2)) ++disagreements;
                  }
                  r.info("equivalent_pairs", static_cast<double>(equivalent));
                  r.at_most("equivalence_disagreements", static_cast<double>(disagreements), 0, Provenance::kOracle);
                }});

  ex.push_back({"cases-table",
                "Idealized description lengths of forward and backward factorizations in the four parameter cases",
                {{"n", P::kInt, "64", "parameter string length"},
                 {"random_trials", P::kInt, "1000", "random parameterizations for the quotient bound"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<std::size_t>(p.integer("n"));
                  if (n < 1) throw ConfigError("n must be positive");
                  const double nd = static_cast<double>(n);
                  auto rng = stream(seed, "cases-table/strings");
                  const auto c = BitString::random(n, rng), d = BitString::random(n, rng);
                  const double expected[4][2] = {{0, 0}, {nd, 2 * nd}, {nd, 2 * nd}, {2 * nd, 4 * nd}};
                  for (int k = 1; k <= 4; ++k) {
                    const auto b = detail::case_base(k);
                    const auto t = case_table(ProductModel(c, b.p0_one, b.p1_one), TransitionModel(d, b.a0, b.a1));
                    const std::string tag = "case" + std::to_string(k);
                    r.near(tag + "_forward_bits", t.forward_total, expected[k - 1][0], 0, Provenance::kExact);
                    r.near(tag + "_backward_bits", t.backward_total, expected[k - 1][1], 0, Provenance::kExact);
                    r.holds(tag + "_generic", t.genericity.generic, Provenance::kExact);
                    r.note(tag + "_preference", t.preference);
                  }
                  std::size_t violations = 0;
                  double worst = 0;
                  for (long long t = 0; t < p.integer("random_trials"); ++t) {
                    const int k = 1 + static_cast<int>(rng.uniform_int(4));
                    const double p0 = 0.05 + 0.9 * rng.uniform01();
                    const double p1 = (k == 2 || k == 4) ? 0.05 + 0.9 * rng.uniform01() : p0;
                    const auto a0 = detail::random_binary_channel(rng);
                    const auto a1 = (k == 3 || k == 4) ? detail::random_binary_channel(rng) : a0;
                    const auto tab = case_table(ProductModel(c, p0, p1), TransitionModel(d, a0, a1));
                    if (tab.backward_total > 2 * tab.forward_total) ++violations;
                    if (tab.forward_total > 0) worst = std::max(worst, tab.backward_total / tab.forward_total);
                  }
                  r.at_most("quotient_violations", static_cast<double>(violations), 0, Provenance::kExact);
                  r.at_most("max_backward_over_forward", worst, 2.0, Provenance::kExact);
                }});

  ex.push_back({"sample-size",
                "Samples needed to recover the parameter string c grow like log n",
                {{"p0", P::kReal, "0.1", "P0(1)"},
                 {"p1", P::kReal, "0.9", "P1(1)"},
                 {"ns", P::kString, "64,256,1024,4096", "string lengths"},
                 {"seeds", P::kInt, "200", "trials per (n, m)"},
                 {"target", P::kReal, "0.9", "required recovery probability"},
                 {"beta_step", P::kReal, "0.1", "grid step for beta"},
                 {"beta_max", P::kReal, "20", "largest beta tried"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const double p0 = p.real("p0"), p1 = p.real("p1"), target = p.real("target");
                  const auto ns = p.integer_list("ns");
                  const auto seeds = p.integer("seeds");
                  auto recovery = [&](long long n, long long m) {
                    auto rng = stream(seed, "sample-size/n=" + std::to_string(n) + "/m=" + std::to_string(m));
                    std::size_t ok = 0;
                    for (long long s = 0; s < seeds; ++s) {
                      const auto c = BitString::random(static_cast<std::size_t>(n), rng);
                      const ProductModel pm(c, p0, p1);
                      std::vector<BitString> xs;
                      for (long long i = 0; i < m; ++i) xs.push_back(product_sample(pm, rng));
                      ok += estimate_c(xs, p0, p1).c_hat == c;
                    }
                    return static_cast<double>(ok) / static_cast<double>(seeds);
                  };
                  double beta = p.real("beta_step");
                  bool found = false;
                  std::vector<double> rec(ns.size());
                  std::vector<long long> ms(ns.size());
                  std::map<std::pair<long long, long long>, double> cache;
                  for (; beta <= p.real("beta_max") + 1e-12; beta += p.real("beta_step")) {
                    bool all = true;
                    for (std::size_t i = 0; i < ns.size() && all; ++i) {
                      ms[i] = static_cast<long long>(std::ceil(beta * std::log(static_cast<double>(ns[i])) - 1e-9));
                      const auto key = std::make_pair(ns[i], ms[i]);
                      if (!cache.count(key)) cache[key] = recovery(ns[i], ms[i]);
                      rec[i] = cache[key];
                      all = rec[i] >= target;
                    }
                    if (all) {
                      found = true;
                      break;
                    }
                  }
                  r.holds("beta_found", found, Provenance::kMonteCarlo);
                  r.info("beta", found ? std::round(beta * 1e6) / 1e6 : NAN);
                  for (std::size_t i = 0; i < ns.size() && found; ++i) {
                    r.info("m_at_n=" + std::to_string(ns[i]), static_cast<double>(ms[i]));
                    r.at_least("recovery_at_n=" + std::to_string(ns[i]), rec[i], target, Provenance::kMonteCarlo);
                  }
                }});

  ex.push_back({"common-cause",
                "A latent common cause beats both two-node factorizations",
                {{"n", P::kInt, "64", "parameter string length"}, {"eps", P::kReal, "0.2", "flip probability of A"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<std::size_t>(p.integer("n"));
                  auto rng = stream(seed, "common-cause/c");
                  const auto rep = common_cause_model(BitString::random(n, rng), StochasticMatrix::binary_symmetric(p.real("eps")));
                  const double nd = static_cast<double>(n);
                  r.near("forward_total_bits", rep.forward_total, 2 * nd, 0, Provenance::kExact);
                  r.near("backward_total_bits", rep.backward_total, 2 * nd, 0, Provenance::kExact);
                  r.near("latent_total_bits", rep.latent_total, nd, 0, Provenance::kExact);
                  r.at_most("independence_gap", rep.max_conditional_gap, 1e-12, Provenance::kExact);
                  const auto rank = total_complexity_score(common_cause_hypotheses(rep));
                  r.holds("latent_preferred", rank.winner == "X<-Z->Y", Provenance::kExact);
                }});

  ex.push_back({"resolved-ensemble",
                "Resolved-ensemble asymmetry test on independent and copied samples",
                {{"m", P::kInt, "4", "samples per variable"},
                 {"bytes", P::kInt, "256", "bytes per sample"},
                 {"split", P::kInt, "0", "block split k (0 = ceil(m/2))"},
                 {"compressor", P::kString, "substring-cover", "length estimator"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto m = static_cast<std::size_t>(p.integer("m"));
                  const auto len = static_cast<std::size_t>(p.integer("bytes"));
                  const auto k = p.integer("split") == 0 ? default_split(m) : static_cast<std::size_t>(p.integer("split"));
                  const auto c = compressor_by_name(p.str("compressor"));
                  auto rng = stream(seed, "resolved-ensemble/samples");
                  std::vector<Bytes> xs, ys;
                  for (std::size_t i = 0; i < m; ++i) xs.push_back(rng.bytes(len));
                  for (std::size_t i = 0; i < m; ++i) ys.push_back(rng.bytes(len));
                  const auto ind = resolved_ensemble_test(xs, ys, k, c);
                  const double t = ind.threshold_bits;
                  r.at_most("independent_I(x1:y2|x2)", ind.x1_y2_given_x2.value_bits, t, Provenance::kEstimate);
                  r.at_most("independent_I(x2:y1|x1)", ind.x2_y1_given_x1.value_bits, t, Provenance::kEstimate);
                  r.at_most("independent_I(y1:x2|y2)", ind.y1_x2_given_y2.value_bits, t, Provenance::kEstimate);
                  r.at_most("independent_I(y2:x1|y1)", ind.y2_x1_given_y1.value_bits, t, Provenance::kEstimate);
                  r.holds("independent_undecided", ind.direction == "undecided", Provenance::kEstimate);
                  const auto copy = resolved_ensemble_test(xs, xs, k, c);
                  r.holds("copy_undecided", copy.direction == "undecided", Provenance::kEstimate);
                  r.info("threshold_bits", t);
                }});

  ex.push_back({"truncation",
                "Source emits a fixed string, the machine truncates it; the ensemble test finds X->Y",
                {{"n", P::kInt, "4096", "bits in the source string"},
                 {"ell", P::kInt, "512", "bits removed"},
                 {"trials", P::kInt, "100", "independent source strings"},
                 {"sides", P::kString, "fixed", "fixed: first output loses its start, second its end; random"},
                 {"compressor", P::kString, "substring-cover", "length estimator"},
                 {"min_success", P::kReal, "0.95", "required fraction of X->Y verdicts"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<std::size_t>(p.integer("n")), ell = static_cast<std::size_t>(p.integer("ell"));
                  const auto trials = p.integer("trials");
                  const auto c = compressor_by_name(p.str("compressor"));
                  std::size_t forward_ok = 0, backward_ok = 0, verdicts = 0;
                  double worst_forward = -INFINITY, least_backward = INFINITY;
                  for (long long t = 0; t < trials; ++t) {
                    auto rng = stream(seed, "truncation/trial=" + std::to_string(t));
                    const auto inst = truncation_instance(n, ell, rng, p.str("sides"));
                    const auto rep = resolved_ensemble_test(inst.xs, inst.ys, 1, c);
                    const double f = rep.x1_y2_given_x2.value_bits - rep.x1_y2_given_x2.slack_bits;
                    worst_forward = std::max(worst_forward, f);
                    least_backward = std::min(least_backward, rep.y1_x2_given_y2.value_bits);
                    forward_ok += f <= 0;
                    backward_ok += rep.y1_x2_given_y2.value_bits >= 0.8 * static_cast<double>(ell);
                    verdicts += rep.direction == "X->Y";
                  }
                  const double tr = static_cast<double>(trials);
                  r.at_most("max_I(x1:y2|x2)_minus_slack", worst_forward, 0, Provenance::kEstimate);
                  r.info("min_I(y1:x2|y2)", least_backward);
                  r.at_least("fraction_I(y1:x2|y2)>=0.8ell", backward_ok / tr, 1.0, Provenance::kEstimate);
                  r.at_least("fraction_X->Y", verdicts / tr, p.real("min_success"), Provenance::kEstimate);
                  r.info("fraction_forward_within_slack", forward_ok / tr);
                }});

  ex.push_back({"subsample-blur",
                "Blurred-subsample test rejects X->Y when the mechanism shares its parameter string with the input",
                {{"n", P::kInt, "1024", "parameter string length"},
                 {"m", P::kInt, "400", "samples"},
                 {"per_value", P::kInt, "8", "selected samples per value and position"},
                 {"trials", P::kInt, "100", "seeded trials per condition"},
                 {"p0", P::kReal, "0.1", "P0(1)"},
                 {"p1", P::kReal, "0.9", "P1(1)"},
                 {"eps", P::kReal, "0.1", "A0 flips with eps, A1 with 1 - eps"},
                 {"compressor", P::kString, "substring-cover", "length estimator"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<std::size_t>(p.integer("n")), m = static_cast<std::size_t>(p.integer("m"));
                  const auto h = static_cast<std::size_t>(p.integer("per_value"));
                  const auto trials = p.integer("trials");
                  const auto c = compressor_by_name(p.str("compressor"));
                  BlurBackground bg{p.real("p0"), p.real("p1"), StochasticMatrix::binary_symmetric(p.real("eps")),
                                    StochasticMatrix::binary_symmetric(1 - p.real("eps"))};
                  std::size_t rej_shared = 0, rej_indep = 0;
                  double min_shared = INFINITY, max_indep = -INFINITY;
                  for (long long t = 0; t < trials; ++t) {
                    for (int shared = 0; shared < 2; ++shared) {
                      auto rng = stream(seed, "subsample-blur/trial=" + std::to_string(t) + (shared ? "/shared" : "/independent"));
                      const auto cs = BitString::random(n, rng);
                      const auto ds = shared ? cs : BitString::random(n, rng);
                      const auto s = sample_product_transition(ProductModel(cs, bg.p0_one, bg.p1_one),
                                                               TransitionModel(ds, bg.a0, bg.a1), m, rng);
                      const auto rep = subsample_blur_test(s.xs, s.ys, bg, c, h, rng);
                      const double excess = rep.decision.model_overlap.value_bits -
                                            std::max(rep.decision.sample_overlap.value_bits, 0.0) - rep.decision.threshold_bits;
                      if (shared) {
                        rej_shared += rep.decision.rejected;
                        min_shared = std::min(min_shared, excess);
                      } else {
                        rej_indep += rep.decision.rejected;
                        max_indep = std::max(max_indep, excess);
                      }
                    }
                  }
                  const double tr = static_cast<double>(trials);
                  r.at_least("rejection_rate_shared", rej_shared / tr, 0.95, Provenance::kMonteCarlo);
                  r.at_most("rejection_rate_independent", rej_indep / tr, 0.05, Provenance::kMonteCarlo);
                  r.info("min_excess_shared_bits", min_shared);
                  r.info("max_excess_independent_bits", max_indep);
                }});

  ex.push_back({"mdl-score",
                "Two-part codelength of both causal directions (heuristic)",
                {{"n", P::kInt, "64", "parameter string length"},
                 {"m", P::kInt, "50", "samples"},
                 {"trials", P::kInt, "50", "seeded trials"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<std::size_t>(p.integer("n")), m = static_cast<std::size_t>(p.integer("m"));
                  const auto trials = p.integer("trials");
                  for (int k : {2, 1}) {
                    const auto b = detail::case_base(k);
                    const auto fams = families_from_base(BaseObjects::from(b.p0_one, b.p1_one, b.a0, b.a1));
                    double diff = 0, max_abs = 0;
                    std::size_t forward_wins = 0;
                    for (long long t = 0; t < trials; ++t) {
                      auto rng = stream(seed, "mdl-score/case" + std::to_string(k) + "/trial=" + std::to_string(t));
                      const auto c = BitString::random(n, rng), d = BitString::random(n, rng);
                      const auto s = sample_product_transition(ProductModel(c, b.p0_one, b.p1_one), TransitionModel(d, b.a0, b.a1), m, rng);
                      const auto sc = mdl_direction_score(s.xs, s.ys, fams.first, fams.second);
                      diff += sc.backward_bits - sc.forward_bits;
                      max_abs = std::max(max_abs, std::abs(sc.backward_bits - sc.forward_bits));
                      forward_wins += sc.forward_bits < sc.backward_bits;
                    }
                    const double tr = static_cast<double>(trials);
                    if (k == 2) {
                      r.at_least("case2_mean_backward_minus_forward_bits", diff / tr, 0, Provenance::kMonteCarlo);
                      r.info("case2_forward_win_rate", forward_wins / tr);
                    } else {
                      r.at_most("case1_max_abs_difference_bits", max_abs, 1e-6, Provenance::kExact);
                    }
                  }
                  r.note("caveat", MdlScore{}.caveat);
                }});

  ex.push_back({"gauss-mix",
                "Sigmoid posterior of the two-Gaussian mixture and the detuned joint",
                {{"mu", P::kReal, "0", "mean"},
                 {"lambda", P::kReal, "1", "half distance of the component means"},
                 {"sigma", P::kReal, "0.5", "component standard deviation"},
                 {"detune_lambda", P::kReal, "0.25", "lambda of the detuned conditional"},
                 {"detune_sigma", P::kReal, "0.5", "sigma of the detuned conditional"},
                 {"grid", P::kInt, "10000", "grid points"}},
                [](const Params& p, std::uint64_t, RunReport& r) {
                  const double mu = p.real("mu"), lambda = p.real("lambda"), sigma = p.real("sigma");
                  const auto grid = static_cast<std::size_t>(p.integer("grid"));
                  const auto rep = gauss_mix_demo(mu, lambda, sigma, Detuning{mu, p.real("detune_lambda"), p.real("detune_sigma")}, grid);
                  r.at_most("max_sigmoid_bayes_gap", rep.max_sigmoid_bayes_gap, 1e-10, Provenance::kOracle);
                  r.holds("shares_parameters", rep.shares_parameters == (lambda != 0.0), Provenance::kExact);
                  r.at_least("detuned_slice_ks_distance", rep.slice_gaussian_distance, 0.05, Provenance::kOracle);
                  const auto flat = gauss_mix_demo(mu, 0.0, sigma, std::nullopt, grid);
                  double worst = 0;
                  for (int i = -50; i <= 50; ++i) worst = std::max(worst, std::abs(gauss_mix_sigmoid(mu + 0.1 * i, mu, 0.0, sigma) - 0.5));
                  r.near("lambda0_posterior_deviation", worst + flat.max_sigmoid_bayes_gap, 0, 1e-15, Provenance::kExact);
                }});

  ex.push_back({"random-walk",
                "Forward and backward conditionals of a random walk; resolved time-series graph",
                {{"q", P::kReal, "0.3", "right-step probability"},
                 {"z", P::kInt, "0", "start site"},
                 {"steps", P::kInt, "20", "horizon"},
                 {"walk_steps", P::kInt, "4096", "steps of simulated trajectories"},
                 {"compressor", P::kString, "ctw", "length estimator for the trajectory test"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto steps = static_cast<int>(p.integer("steps"));
                  if (steps < 1) throw ConfigError("steps must be positive");
                  const RandomWalkModel m(p.real("q"), static_cast<int>(p.integer("z")), steps);
                  const RandomWalkModel mirror(1 - p.real("q"), m.z, steps);
                  double bayes_gap = 0, q_gap = 0, power_gap = 0;
                  const auto fwd = forward_kernel(m);
                  auto pj = walk_marginal(m, 0);
                  for (int j = 0; j < steps; ++j) {
                    const auto closed = backward_conditional(m, j);
                    bayes_gap = std::max(bayes_gap, max_abs_difference(closed, bayes_backward(m, j)));
                    q_gap = std::max(q_gap, max_abs_difference(closed, backward_conditional(mirror, j)));
                    pj = apply(fwd, pj);
                    const auto exact = walk_marginal(m, j + 1);
                    for (std::size_t i = 0; i < exact.probs.size(); ++i) power_gap = std::max(power_gap, std::abs(exact.probs[i] - pj.probs[i]));
                  }
                  r.at_most("closed_form_vs_bayes", bayes_gap, 1e-12, Provenance::kOracle);
                  r.near("q_invariance", q_gap, 0, 0, Provenance::kExact);
                  r.at_most("marginal_vs_matrix_power", power_gap, 1e-12, Provenance::kOracle);
                  const auto dep = walk_dependence_report(1, 1);
                  r.near("forward_total_in_units", dep.forward_total, 2, 0, Provenance::kExact);
                  r.near("backward_total_in_units", dep.backward_total, 3, 0, Provenance::kExact);
                  const auto c = compressor_by_name(p.str("compressor"));
                  const RandomWalkModel sim(m.q, m.z, 1);
                  auto r1 = stream(seed, "random-walk/instance=1"), r2 = stream(seed, "random-walk/instance=2");
                  const int ws = static_cast<int>(p.integer("walk_steps"));
                  const auto a = simulate_walk(sim, ws, r1), b = simulate_walk(sim, ws, r2);
                  const auto ts = resolved_timeseries_test({a, b}, c);
                  r.holds("resolution_has_no_v_structures", ts.no_v_structures, Provenance::kExact);
                  r.holds("resolution_skeleton_time_symmetric", ts.skeleton_symmetric, Provenance::kExact);
                  r.at_most("independent_cross_instance_mi_minus_slack", ts.cross_instance.value_bits - ts.cross_instance.slack_bits, 0, Provenance::kEstimate);
                  r.info("I(start1:later2|start2)", ts.initial_given_start.value_bits);
                  r.info("I(start1:later2|later2)", ts.initial_given_later.value_bits);
                  const auto same = resolved_timeseries_test({a, a}, c);
                  r.holds("identical_walks_flag_common_cause", same.hidden_common_cause, Provenance::kEstimate);
                }});

  ex.push_back({"stationarity",
                "Stationary chains: the backward kernel is determined by the forward kernel",
                {{"states", P::kInt, "5", "states of the random chain"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto k = static_cast<std::size_t>(p.integer("states"));
                  if (k < 2) throw ConfigError("states must be at least 2");
                  auto rng = stream(seed, "stationarity/matrix");
                  std::vector<double> v(k * k);
                  for (auto& x : v) x = 0.05 + rng.uniform01();
                  StochasticMatrix::renormalize_columns(k, k, v);
                  const StochasticMatrix m(k, k, v);
                  const auto a = stationarity_demo(m), b = stationarity_demo(m);
                  r.at_least("eigen_gap", a.eigen_gap, 1e-9, Provenance::kExact);
                  r.at_most("backward_of_backward_error", a.backward_of_backward_error, 1e-10, Provenance::kOracle);
                  r.holds("recomputation_identical", a.backward.values() == b.backward.values() && a.stationary == b.stationary, Provenance::kExact);
                  const auto sym = StochasticMatrix::from_rows({{0.5, 0.3, 0.2}, {0.3, 0.4, 0.3}, {0.2, 0.3, 0.5}});
                  r.holds("symmetric_chain_reversible", stationarity_demo(sym).reversible, Provenance::kExact);
                }});

  ex.push_back({"peaks",
                "Entropy gain of smoothing k-peak distributions and the partition bound on backward maps",
                {{"N", P::kInt, "120", "outcome set size"},
                 {"k", P::kInt, "4", "peaks"},
                 {"p", P::kReal, "0.25", "smoothing step probability"},
                 {"m", P::kInt, "50", "smoothing steps"},
                 {"partition_check", P::kInt, "1", "also run the exhaustive small-instance partition check"}},
                [](const Params& p, std::uint64_t, RunReport& r) {
                  const PeakFamily f{static_cast<std::size_t>(p.integer("N")), static_cast<std::size_t>(p.integer("k")), p.real("p"),
                                     static_cast<std::size_t>(p.integer("m"))};
                  const auto rep = peaks_experiment(f);
                  const double expected = std::log2(static_cast<double>(f.n)) - std::log2(static_cast<double>(f.k));
                  r.near("I(X:J)", rep.info_x, expected, 1e-12, Provenance::kExact);
                  r.info("I(Y:J)", rep.info_y);
                  r.at_least("delta_H", rep.delta_h, 0, Provenance::kExact, 1e-12);
                  r.near("I(X:J)-I(Y:J)-delta_H", rep.info_x - rep.info_y - rep.delta_h, 0, 1e-9, Provenance::kExact);
                  r.info("bound_bits", rep.bound_bits);
                  if (p.integer("partition_check") != 0) {
                    std::size_t instances = 0, partitions = 0, violations = 0, chain = 0, vacuous = 0;
                    for (std::size_t n = 2; n <= 12; ++n)
                      for (std::size_t k = 1; k <= 2; ++k)
                        for (std::size_t steps : {1, 2, 4}) {
                          if (k == 2 && n > 5) continue;
                          const auto [xs, ys] = peak_family_members({n, k, 0.25, steps});
                          const auto pc = partition_check(xs, ys, xs.size());
                          ++instances;
                          vacuous += pc.partitions_checked == 0;
                          partitions += pc.partitions_checked;
                          violations += pc.violations;
                          chain += pc.chain_violations;
                        }
                    r.info("partition_instances", static_cast<double>(instances));
                    r.info("admissible_partitions", static_cast<double>(partitions));
                    r.at_most("instances_without_partition", static_cast<double>(vacuous), 0, Provenance::kExact);
                    r.at_most("partition_violations", static_cast<double>(violations), 0, Provenance::kExact);
                    r.at_most("partition_chain_violations", static_cast<double>(chain), 0, Provenance::kExact);
                  }
                }});

  ex.push_back({"fisher",
                "Fisher information decreases under Gaussian convolution",
                {{"h", P::kReal, "0.01", "grid spacing"}, {"kernel_sigma", P::kReal, "0.5", "convolution kernel width"}},
                [](const Params& p, std::uint64_t, RunReport& r) {
                  const double h = p.real("h"), ks = p.real("kernel_sigma");
                  const auto kernel = gaussian_grid(0, ks, h, 8);
                  std::size_t decreased = 0;
                  const auto dens = shipped_test_densities(h);
                  for (const auto& d : dens) {
                    const double before = fisher_information(d.density);
                    const double after = fisher_information(convolve(d.density, kernel));
                    r.info("F_before/" + d.name, before);
                    r.info("F_after/" + d.name, after);
                    decreased += after < before;
                  }
                  r.near("densities_with_strict_decrease", static_cast<double>(decreased), static_cast<double>(dens.size()), 0, Provenance::kExact);
                  const double sigma = 0.8;
                  const double fg = fisher_information(gaussian_grid(0, sigma, std::min(h, sigma / 50)));
                  r.near("gaussian_relative_error", fg * sigma * sigma - 1, 0, 0.01, Provenance::kExact);
                  const auto& d0 = dens[2].density;
                  r.near("shift_invariance", fisher_information(d0.shifted(1.2345)) - fisher_information(d0), 0, 1e-10, Provenance::kExact);
                }});

  ex.push_back({"refinfo",
                "Reference information under bit-flip covariant channels",
                {{"n", P::kInt, "8", "bits (outcome set {0,1}^n)"},
                 {"channels", P::kInt, "100", "random covariant channels"},
                 {"eps", P::kReal, "0.1", "flip probability for the closed-form check"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto n = static_cast<unsigned>(p.integer("n"));
                  if (n < 1 || n > 10) throw ConfigError("n must lie in [1, 10]");
                  const auto g = FiniteGroupAction::bit_flips(n);
                  const std::size_t size = g.size();
                  auto rng = stream(seed, "refinfo/channels");
                  double worst = -INFINITY;
                  std::size_t covariance_checked = 0, covariant = 0;
                  for (long long t = 0; t < p.integer("channels"); ++t) {
                    std::vector<double> noise(size), prior(size);
                    for (auto& x : noise) x = std::pow(rng.uniform01(), 4.0);
                    for (auto& x : prior) x = std::pow(rng.uniform01(), 8.0);
                    DiscreteDistribution::normalize(noise);
                    DiscreteDistribution::normalize(prior);
                    const auto k = xor_noise_channel(noise);
                    if (n <= 5) {
                      ++covariance_checked;
                      covariant += covariant_channel_check(k, g);
                    }
                    worst = std::max(worst, reference_information(apply_kernel(k, prior), g) - reference_information(prior, g));
                  }
                  r.at_most("max_increase_bits", worst, 0, Provenance::kExact, 1e-9);
                  r.near("covariance_checks_passed", static_cast<double>(covariant), static_cast<double>(covariance_checked), 0, Provenance::kExact);
                  const double eps = p.real("eps");
                  std::vector<double> point(size, 0.0);
                  point[size / 3] = 1.0;
                  std::vector<double> bsc(size);
                  for (std::size_t e = 0; e < size; ++e) {
                    const int w = std::popcount(static_cast<unsigned>(e));
                    bsc[e] = std::pow(eps, w) * std::pow(1 - eps, static_cast<int>(n) - w);
                  }
                  const double ig = reference_information(apply_kernel(xor_noise_channel(bsc), point), g);
                  r.near("point_mass_bsc_value", ig, n * (1 - binary_entropy(eps)), 1e-10, Provenance::kExact);
                  r.near("point_mass_value", reference_information(point, g), n, 1e-12, Provenance::kExact);
                }});

  ex.push_back({"entropy-rate",
                "Compressed length per symbol of Bernoulli strings approaches the entropy",
                {{"compressor", P::kString, "ctw", "length estimator"},
                 {"p", P::kReal, "0.1", "P(1)"},
                 {"n", P::kInt, "65536", "symbols per string"},
                 {"trials", P::kInt, "3", "strings"},
                 {"tolerance", P::kReal, "0.02", "allowed excess in bits per symbol"}},
                [](const Params& p, std::uint64_t seed, RunReport& r) {
                  const auto c = compressor_by_name(p.str("compressor"));
                  auto rng = stream(seed, "entropy-rate/samples");
                  const auto rep = entropy_rate_check(c, p.real("p"), static_cast<std::size_t>(p.integer("n")),
                                                      static_cast<std::size_t>(p.integer("trials")), rng);
                  r.info("entropy_bits_per_symbol", rep.entropy);
                  r.info("rate_bits_per_symbol", rep.mean_rate);
                  r.at_least("rate_minus_entropy", rep.gap, 0, Provenance::kExact, 0.01);
                  r.at_most("rate_minus_entropy_upper", rep.gap, p.real("tolerance"), Provenance::kEstimate);
                }});

  return ex;
}

inline const Experiment& find_experiment(const std::string& id) {
  static const auto all = experiments();
  for (const auto& e : all) {
    if (e.id == id) return e;
  }
  std::string known;
  for (const auto& e : all) known += (known.empty() ? "" : ", ") + e.id;
  throw ConfigError("unknown experiment '" + id + "' (known: " + known + ")");
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto& e = find_experiment(cfg.experiment);
  const Params params(e.params, cfg.params);
  RunReport r;
  r.experiment = e.id;
  r.seed = cfg.seed;
  r.params = params.resolved();
  const auto t0 = std::chrono::steady_clock::now();
  e.run(params, cfg.seed, r);
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace algomc::harness
