#include <gtest/gtest.h>

#include <cmath>

#include "algomc/complexity.hpp"
#include "algomc/inference.hpp"
#include "algomc/string_models.hpp"
#include "support.hpp"

namespace algomc {
namespace {

const StochasticMatrix kA0 = StochasticMatrix::from_rows({{0.9, 0.3}, {0.1, 0.7}});
const StochasticMatrix kA1 = StochasticMatrix::from_rows({{0.6, 0.15}, {0.4, 0.85}});

std::vector<BitString> all_strings(std::size_t n) {
  std::vector<BitString> out;
  for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = (code >> i) & 1;
    out.push_back(b);
  }
  return out;
}

TEST(StringModelsTest, ModelValidation) {
  EXPECT_THROW(ProductModel(BitString(), 0.1, 0.2), PreconditionError);
  EXPECT_THROW(ProductModel(BitString(3), 1.2, 0.2), PreconditionError);
  EXPECT_THROW(TransitionModel(BitString(3), StochasticMatrix::identity(3), kA1), PreconditionError);
  EXPECT_THROW(case_table(ProductModel(BitString(3), 0.1, 0.2), TransitionModel(BitString(4), kA0, kA1)),
               PreconditionError);
}

TEST(StringModelsTest, ProductAndTransitionAreNormalized) {
  const auto c = BitString::parse("0110"), d = BitString::parse("1010");
  const ProductModel pm(c, 0.2, 0.7);
  const TransitionModel tm(d, kA0, kA1);
  const auto xs = all_strings(4);
  double total = 0;
  for (const auto& x : xs) {
    total += product_pmf(pm, x);
    double ty = 0;
    for (const auto& y : xs) ty += transition_prob(tm, y, x);
    EXPECT_NEAR(ty, 1.0, 1e-12);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  // Position 1 uses P_1: P(x_1 = 1) = 0.7.
  double p1 = 0;
  for (const auto& x : xs)
    if (x[1]) p1 += product_pmf(pm, x);
  EXPECT_NEAR(p1, 0.7, 1e-12);
}

TEST(StringModelsTest, SamplingFrequenciesMatchParameters) {
  auto rng = stream(1, "strings/sample");
  const ProductModel pm(BitString::parse("01"), 0.1, 0.9);
  std::array<int, 2> ones{0, 0};
  for (int t = 0; t < 20000; ++t) {
    const auto x = product_sample(pm, rng);
    ones[0] += x[0];
    ones[1] += x[1];
  }
  EXPECT_NEAR(ones[0] / 20000.0, 0.1, 0.01);
  EXPECT_NEAR(ones[1] / 20000.0, 0.9, 0.01);
}

// Induced marginal and backward conditional against brute-force sums over
// every (x, y) pair.
TEST(StringModelsTest, InducedObjectsMatchEnumeration) {
  auto rng = stream(2, "strings/induced");
  for (int t = 0; t < 10; ++t) {
    const auto c = testing::random_bits(4, rng), d = testing::random_bits(4, rng);
    const ProductModel pm(c, 0.05 + 0.9 * rng.uniform01(), 0.05 + 0.9 * rng.uniform01());
    const TransitionModel tm(d, kA0, kA1);
    const auto ind = induced_objects(pm, tm);
    const auto all = all_strings(4);
    for (const auto& y : all) {
      double py = 0;
      for (const auto& x : all) py += product_pmf(pm, x) * transition_prob(tm, y, x);
      EXPECT_NEAR(ind.pmf_y(y), py, 1e-13);
      for (const auto& x : all) {
        EXPECT_NEAR(ind.backward_prob(x, y), product_pmf(pm, x) * transition_prob(tm, y, x) / py, 1e-12);
      }
    }
  }
}

TEST(StringModelsTest, BackwardUndefinedOnZeroMassThrows) {
  const auto b = BaseObjects::from(0.0, 0.5, StochasticMatrix::identity(2), kA1);
  EXPECT_THROW(b.backward(0, 0), PreconditionError);
  EXPECT_NO_THROW(b.backward(1, 1));
}

// Leading-order description lengths for n = 64 in the four cases.
TEST(StringModelsTest, CaseTableValues) {
  const std::size_t n = 64;
  auto rng = stream(3, "strings/cases");
  const auto c = testing::random_bits(n, rng), d = testing::random_bits(n, rng);
  struct Row {
    double p0, p1;
    StochasticMatrix a0, a1;
    double fwd, bwd;
    const char* pref;
  };
  const Row rows[] = {{0.2, 0.2, kA0, kA0, 0, 0, "tie at leading order"},
                      {0.2, 0.7, kA0, kA0, 64, 128, "X->Y"},
                      {0.2, 0.2, kA0, kA1, 64, 128, "X->Y"},
                      {0.2, 0.7, kA0, kA1, 128, 256, "X->Y"}};
  for (const auto& r : rows) {
    const auto t = case_table(ProductModel(c, r.p0, r.p1), TransitionModel(d, r.a0, r.a1));
    EXPECT_EQ(t.forward_total, r.fwd);
    EXPECT_EQ(t.backward_total, r.bwd);
    EXPECT_EQ(t.preference, r.pref);
    EXPECT_TRUE(t.genericity.generic);
    ASSERT_EQ(t.objects.size(), 5u);
    EXPECT_EQ(t.objects[0].object, "P(X)");
    EXPECT_EQ(t.objects[4].object, "P(X|Y)");
  }
}

TEST(StringModelsTest, AccidentalCoincidenceIsReported) {
  // A second channel whose output marginal under P = (0.8, 0.2) equals that of A_0.
  const double p = 0.2, col0 = 0.8;
  const double target = (1 - p) * 0.9 + p * 0.3;
  const double col1 = (target - (1 - p) * col0) / p;
  const auto same_q = StochasticMatrix::from_rows({{col0, col1}, {1 - col0, 1 - col1}});
  const auto t = case_table(ProductModel(BitString(4), p, p), TransitionModel(BitString::parse("0101"), kA0, same_q));
  EXPECT_FALSE(t.genericity.generic);
  EXPECT_FALSE(t.genericity.violations.empty());
  const auto generic = case_table(ProductModel(BitString(4), p, p), TransitionModel(BitString::parse("0101"), kA0, kA1));
  EXPECT_TRUE(generic.genericity.generic);
}

// The backward factorization never costs more than twice the forward one.
TEST(StringModelsTest, BackwardAtMostTwiceForward) {
  auto rng = stream(4, "strings/quotient");
  const auto c = testing::random_bits(32, rng), d = testing::random_bits(32, rng);
  auto channel = [&] {
    const double a = 0.05 + 0.9 * rng.uniform01(), b = 0.05 + 0.9 * rng.uniform01();
    return StochasticMatrix::from_rows({{1 - a, b}, {a, 1 - b}});
  };
  for (int t = 0; t < 500; ++t) {
    const double p0 = 0.05 + 0.9 * rng.uniform01();
    const double p1 = rng.bernoulli(0.5) ? p0 : 0.05 + 0.9 * rng.uniform01();
    const auto a0 = channel();
    const auto a1 = rng.bernoulli(0.5) ? a0 : channel();
    const auto tab = case_table(ProductModel(c, p0, p1), TransitionModel(d, a0, a1));
    EXPECT_LE(tab.backward_total, 2 * tab.forward_total);
    EXPECT_GE(tab.backward_total, tab.forward_total);
    // Each object cost is n times the number of parameter strings it depends on.
    for (const auto& o : tab.objects) EXPECT_EQ(o.bits, 32.0 * (o.depends_on_c + o.depends_on_d));
  }
}

TEST(StringModelsTest, EstimateCRecoversParameterString) {
  auto rng = stream(5, "strings/estimate");
  const auto c = testing::random_bits(256, rng);
  const ProductModel pm(c, 0.1, 0.9);
  std::vector<BitString> xs;
  for (int i = 0; i < 40; ++i) xs.push_back(product_sample(pm, rng));
  const auto e = estimate_c(xs, 0.1, 0.9);
  EXPECT_EQ(e.c_hat, c);
  for (double conf : e.confidence) EXPECT_GT(conf, 0.5);
}

TEST(StringModelsTest, EstimateCEdgeCases) {
  EXPECT_THROW(estimate_c({BitString(3)}, 0.3, 0.3), PreconditionError);
  EXPECT_THROW(estimate_c({}, 0.1, 0.9), PreconditionError);
  EXPECT_THROW(estimate_c({BitString(3), BitString(4)}, 0.1, 0.9), PreconditionError);
  // Frequency 1/2 is equidistant from 0.1 and 0.9: tie goes to 0.
  const auto e = estimate_c({BitString::parse("1"), BitString::parse("0")}, 0.1, 0.9);
  EXPECT_EQ(e.c_hat.str(), "0");
}

TEST(StringModelsTest, CommonCauseModel) {
  auto rng = stream(6, "strings/common");
  const auto c = testing::random_bits(64, rng);
  const auto rep = common_cause_model(c, StochasticMatrix::binary_symmetric(0.2));
  EXPECT_EQ(rep.forward_total, 128);
  EXPECT_EQ(rep.backward_total, 128);
  EXPECT_EQ(rep.latent_total, 64);
  EXPECT_TRUE(rep.prefers_latent);
  EXPECT_LE(rep.max_conditional_gap, 1e-15);
  EXPECT_LE(rep.max_marginal_gap, 1e-15);
  const auto rank = total_complexity_score(common_cause_hypotheses(rep));
  EXPECT_EQ(rank.decision, Decision::kAccepted);
  EXPECT_EQ(rank.winner, "X<-Z->Y");
}

TEST(GeneratorTest, UndeclaredReadsAreRejected) {
  const Dag g({"A", "B", "C"}, {{"A", "B"}});
  std::map<std::string, NodeProgram> progs{{"A", programs::random_source(8)},
                                           {"B", programs::copy_of("A")},
                                           {"C", programs::copy_of("A")}};
  EXPECT_THROW(AlgorithmicGenerator(g, progs, 1), PreconditionError);
  // A program that reads past its declaration fails at generation time.
  progs["C"] = NodeProgram{{}, [](const GeneratorInputs& in, Philox4x32&) { return in.get("A"); }};
  const AlgorithmicGenerator gen(g, progs, 1);
  EXPECT_THROW(gen.generate(), PreconditionError);
}

TEST(GeneratorTest, MissingProgramAndUnknownFamily) {
  const Dag g({"A", "B"}, {{"A", "B"}});
  EXPECT_THROW(AlgorithmicGenerator(g, {{"A", programs::random_source(4)}}, 0), PreconditionError);
  EXPECT_THROW(shipped_generator(g, "shuffle", 0), PreconditionError);
}

TEST(GeneratorTest, OutputsAreSeedDeterministic) {
  const Dag g({"A", "B", "C"}, {{"A", "B"}, {"A", "C"}, {"B", "C"}});
  const auto a = shipped_generator(g, "truncate", 7).generate();
  const auto b = shipped_generator(g, "truncate", 7).generate();
  const auto c = shipped_generator(g, "truncate", 8).generate();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a.at("A").size(), 256u);
  EXPECT_EQ(a.at("B").size(), 256u - 64 + 96);
  EXPECT_EQ(a.at("C").size(), 256u + a.at("B").size() + 96);
}

TEST(GeneratorTest, ConcatCopiesParentsVerbatim) {
  const Dag g({"A", "B"}, {{"A", "B"}});
  const auto v = shipped_generator(g, "concat", 3).generate();
  ASSERT_EQ(v.at("B").size(), 256u + 96);
  EXPECT_TRUE(std::equal(v.at("A").begin(), v.at("A").end(), v.at("B").begin()));
}

TEST(GeneratorTest, NoiseSeedsAreDistinctPerNode) {
  const Dag g({"A", "B", "C"}, {});
  const auto gen = shipped_generator(g, "concat", 5);
  std::set<std::uint64_t> seeds;
  for (const auto& [k, s] : gen.noise_seeds()) seeds.insert(s);
  EXPECT_EQ(seeds.size(), 3u);
  EXPECT_EQ(gen.noise_seeds().at("B"), derive_seed(5, "noise/B"));
}

}  // namespace
}  // namespace algomc
