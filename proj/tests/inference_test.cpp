#include <gtest/gtest.h>

#include <cmath>

#include "algomc/inference.hpp"
#include "support.hpp"

namespace algomc {
namespace {

NodeData generated(const Dag& g, const std::string& family, std::uint64_t seed) {
  return shipped_generator(g, family, seed).generate();
}

TEST(MarkovTestTest, GeneratorOutputsPassOnTheirOwnGraph) {
  const Dag chain({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  const Dag collider({"A", "B", "C"}, {{"A", "C"}, {"B", "C"}});
  const auto c = substring_cover();
  for (std::uint64_t s = 0; s < 5; ++s) {
    EXPECT_EQ(algorithmic_markov_test(generated(chain, "concat", s), chain, c).decision, Decision::kAccepted);
    EXPECT_EQ(algorithmic_markov_test(generated(collider, "truncate", s), collider, c).decision, Decision::kAccepted);
  }
}

TEST(MarkovTestTest, WrongGraphIsRejected) {
  // Data from A -> B tested against the edgeless graph.
  const Dag truth({"A", "B"}, {{"A", "B"}});
  const Dag empty({"A", "B"}, {});
  const auto v = algorithmic_markov_test(generated(truth, "concat", 1), empty, substring_cover());
  EXPECT_EQ(v.decision, Decision::kRejected);
  ASSERT_FALSE(v.statistics.empty());
  EXPECT_GT(v.statistics.front().value_bits, 1000);
}

TEST(MarkovTestTest, IdenticalStringsOnEdgelessGraphAreRejected) {
  auto rng = stream(2, "markov/identical");
  const Dag empty({"A", "B"}, {});
  const auto x = rng.bytes(300);
  EXPECT_EQ(algorithmic_markov_test({{"A", x}, {"B", x}}, empty, substring_cover()).decision, Decision::kRejected);
}

TEST(MarkovTestTest, InputValidation) {
  const Dag g({"A", "B"}, {});
  EXPECT_THROW(algorithmic_markov_test({{"A", {1}}}, g, substring_cover()), PreconditionError);
  EXPECT_THROW(algorithmic_markov_test({{"A", {1}}, {"B", {}}}, g, substring_cover()), PreconditionError);
}

TEST(MarkovTestTest, ExplicitThresholdIsUsed) {
  auto rng = stream(3, "markov/threshold");
  const Dag empty({"A", "B"}, {});
  const NodeData d{{"A", rng.bytes(200)}, {"B", rng.bytes(200)}};
  const auto v = algorithmic_markov_test(d, empty, substring_cover(), -1e9);
  EXPECT_EQ(v.decision, Decision::kRejected);
  for (const auto& s : v.statistics) EXPECT_EQ(s.threshold_bits, -1e9);
}

TEST(ScoringTest, UniqueMinimumWinsTiesAreUndecided) {
  const auto r = total_complexity_score({{"a", {{"X", 3}, {"Y", 4}}}, {"b", {{"X", 2}, {"Y", 2}}}});
  EXPECT_EQ(r.decision, Decision::kAccepted);
  EXPECT_EQ(r.winner, "b");
  EXPECT_EQ(r.ranked.front().total_bits, 4);
  const auto tie = total_complexity_score({{"a", {{"X", 2}}}, {"b", {{"Y", 2}}}});
  EXPECT_EQ(tie.decision, Decision::kUndecided);
  EXPECT_TRUE(tie.winner.empty());
  EXPECT_THROW(total_complexity_score({{"a", {}}}), PreconditionError);
  EXPECT_THROW(total_complexity_score({{"a", {{"X", -1}}}, {"b", {}}}), PreconditionError);
}

TEST(ScoringTest, CaseTableHypotheses) {
  const auto c = BitString::parse("0110"), d = BitString::parse("1100");
  const auto a0 = StochasticMatrix::from_rows({{0.9, 0.3}, {0.1, 0.7}});
  const auto a1 = StochasticMatrix::from_rows({{0.6, 0.15}, {0.4, 0.85}});
  const auto t = case_table(ProductModel(c, 0.2, 0.7), TransitionModel(d, a0, a1));
  const auto r = total_complexity_score(two_node_hypotheses(t));
  EXPECT_EQ(r.winner, "X->Y");
  const auto flat = case_table(ProductModel(c, 0.2, 0.2), TransitionModel(d, a0, a0));
  EXPECT_EQ(total_complexity_score(two_node_hypotheses(flat)).decision, Decision::kUndecided);
}

TEST(EnsembleTest, TruncationGivesForwardDirection) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto rng = stream(s, "ensemble/truncation");
    const auto inst = truncation_instance(4096, 512, rng);
    ASSERT_EQ(inst.xs.size(), 2u);
    EXPECT_EQ(inst.xs[0], inst.a.pack());
    EXPECT_EQ(inst.ys[0], inst.a.substr(512, 3584).pack());
    EXPECT_EQ(inst.ys[1], inst.a.substr(0, 3584).pack());
    const auto r = resolved_ensemble_test(inst.xs, inst.ys, 1, substring_cover());
    EXPECT_EQ(r.direction, "X->Y");
    EXPECT_LE(r.x1_y2_given_x2.value_bits, r.x1_y2_given_x2.slack_bits);
    EXPECT_GE(r.y1_x2_given_y2.value_bits, 0.8 * 512);
  }
}

TEST(EnsembleTest, IndependentSamplesAreUndecided) {
  auto rng = stream(4, "ensemble/independent");
  std::vector<Bytes> xs, ys;
  for (int i = 0; i < 4; ++i) xs.push_back(rng.bytes(256));
  for (int i = 0; i < 4; ++i) ys.push_back(rng.bytes(256));
  const auto r = resolved_ensemble_test(xs, ys, default_split(4), substring_cover());
  EXPECT_EQ(r.split, 2u);
  EXPECT_EQ(r.direction, "undecided");
}

TEST(EnsembleTest, Validation) {
  const std::vector<Bytes> two{{1}, {2}}, three{{1}, {2}, {3}};
  EXPECT_THROW(resolved_ensemble_test(two, three, 1, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_ensemble_test({{1}}, {{1}}, 1, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_ensemble_test(two, two, 2, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_ensemble_test(two, two, 0, substring_cover()), PreconditionError);
  EXPECT_EQ(default_split(5), 3u);
  Philox4x32 g(1);
  EXPECT_THROW(truncation_instance(10, 10, g), PreconditionError);
  EXPECT_THROW(truncation_instance(10, 2, g, "left"), PreconditionError);
}

TEST(BlurTest, SharedStringRejectedIndependentAccepted) {
  const BlurBackground bg;
  for (int shared = 0; shared < 2; ++shared) {
    auto rng = stream(5, shared ? "blur/shared" : "blur/independent");
    const auto c = testing::random_bits(1024, rng);
    const auto d = shared ? c : testing::random_bits(1024, rng);
    const auto s = sample_product_transition(ProductModel(c, bg.p0_one, bg.p1_one), TransitionModel(d, bg.a0, bg.a1), 400, rng);
    const auto r = subsample_blur_test(s.xs, s.ys, bg, substring_cover(), 8, rng);
    EXPECT_EQ(r.decision.rejected, shared == 1);
    EXPECT_EQ(r.c_hat, c);
    EXPECT_EQ(r.x_tilde.size(), 1024u * 16);
    EXPECT_EQ(r.x_tilde.count_ones(), 1024u * 8);
  }
}

TEST(BlurTest, SubsampleNeedsEnoughOfEachValue) {
  Philox4x32 g(1);
  const std::vector<BitString> xs(5, BitString::parse("0")), ys(5, BitString::parse("1"));
  EXPECT_THROW(subsample_blur_test(xs, ys, BlurBackground{}, substring_cover(), 2, g), PreconditionError);
  EXPECT_THROW(subsample_blur_test(xs, ys, BlurBackground{}, substring_cover(), 0, g), PreconditionError);
}

TEST(BlurTest, DecisionRule) {
  auto rng = stream(6, "blur/rule");
  const auto dx = rng.bytes(200);
  const auto b = blur_decision(substring_cover(), dx, dx, rng.bytes(200));
  EXPECT_TRUE(b.rejected);
  const auto b2 = blur_decision(substring_cover(), dx, dx, dx);
  EXPECT_FALSE(b2.rejected);
}

TEST(MdlTest, CaseOneIsSymmetricAndCaseTwoFavoursForward) {
  const auto a0 = StochasticMatrix::from_rows({{0.9, 0.3}, {0.1, 0.7}});
  auto rng = stream(7, "mdl/cases");
  const auto c = testing::random_bits(64, rng), d = testing::random_bits(64, rng);
  {
    const auto fams = families_from_base(BaseObjects::from(0.2, 0.2, a0, a0));
    EXPECT_EQ(fams.first.marginals.size(), 1u);
    EXPECT_EQ(fams.second.conditionals.size(), 1u);
    const auto s = sample_product_transition(ProductModel(c, 0.2, 0.2), TransitionModel(d, a0, a0), 50, rng);
    const auto sc = mdl_direction_score(s.xs, s.ys, fams.first, fams.second);
    EXPECT_NEAR(sc.forward_bits, sc.backward_bits, 1e-6);
    EXPECT_FALSE(sc.caveat.empty());
  }
  {
    const auto fams = families_from_base(BaseObjects::from(0.2, 0.7, a0, a0));
    EXPECT_EQ(fams.first.marginals.size(), 2u);
    EXPECT_EQ(fams.first.conditionals.size(), 1u);
    EXPECT_EQ(fams.second.marginals.size(), 2u);
    EXPECT_EQ(fams.second.conditionals.size(), 2u);
    double diff = 0;
    for (int t = 0; t < 20; ++t) {
      const auto s = sample_product_transition(ProductModel(c, 0.2, 0.7), TransitionModel(d, a0, a0), 50, rng);
      const auto sc = mdl_direction_score(s.xs, s.ys, fams.first, fams.second);
      diff += sc.backward_bits - sc.forward_bits;
    }
    EXPECT_GT(diff, 0);
  }
  EXPECT_THROW(mdl_direction_score({}, {}, {}, {}), PreconditionError);
}

TEST(GaussMixTest, SigmoidEqualsBayesPosterior) {
  for (double lambda : {-1.5, 0.3, 1.0, 2.0})
    for (double sigma : {0.4, 1.0}) {
      for (int i = -40; i <= 40; ++i) {
        const double y = 0.1 * i;
        const double plus = std::exp(-0.5 * std::pow((y - 0.5 - lambda) / sigma, 2));
        const double minus = std::exp(-0.5 * std::pow((y - 0.5 + lambda) / sigma, 2));
        EXPECT_NEAR(gauss_mix_sigmoid(y, 0.5, lambda, sigma), plus / (plus + minus), 1e-14);
      }
      EXPECT_LE(gauss_mix_demo(0.5, lambda, sigma).max_sigmoid_bayes_gap, 1e-12);
    }
}

TEST(GaussMixTest, ParameterSharingAndDetuning) {
  EXPECT_TRUE(gauss_mix_demo(0, 1, 0.5).shares_parameters);
  EXPECT_FALSE(gauss_mix_demo(0, 0, 0.5).shares_parameters);
  EXPECT_DOUBLE_EQ(gauss_mix_sigmoid(3.0, 0, 0, 0.5), 0.5);
  const auto matched = gauss_mix_demo(0, 1, 0.5, Detuning{0, 1, 0.5});
  EXPECT_LT(matched.slice_gaussian_distance, 0.01);
  const auto detuned = gauss_mix_demo(0, 1, 0.5, Detuning{0, 0.25, 0.5});
  EXPECT_TRUE(detuned.detuned);
  EXPECT_GT(detuned.slice_gaussian_distance, 0.05);
  EXPECT_THROW(gauss_mix_demo(0, 1, 0), PreconditionError);
  EXPECT_THROW(gauss_mix_demo(0, 1, 1, Detuning{0, 1, -1}), PreconditionError);
}

}  // namespace
}  // namespace algomc
