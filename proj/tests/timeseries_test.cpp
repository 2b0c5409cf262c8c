#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "algomc/timeseries.hpp"
#include "support.hpp"

namespace algomc {
namespace {

// Number of +-1 paths of length j from z to each site.
std::map<int, double> path_counts(int z, int j) {
  std::map<int, double> cur{{z, 1.0}};
  for (int t = 0; t < j; ++t) {
    std::map<int, double> next;
    for (const auto& [x, n] : cur) {
      next[x + 1] += n;
      next[x - 1] += n;
    }
    cur = std::move(next);
  }
  return cur;
}

// Weighted path sum: each path carries q^(right steps) (1-q)^(left steps).
std::map<int, double> weighted_paths(int z, int j, double q) {
  std::map<int, double> cur{{z, 1.0}};
  for (int t = 0; t < j; ++t) {
    std::map<int, double> next;
    for (const auto& [x, w] : cur) {
      next[x + 1] += w * q;
      next[x - 1] += w * (1 - q);
    }
    cur = std::move(next);
  }
  return cur;
}

TEST(WalkTest, MarginalMatchesPathSumAndKernelPowers) {
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const RandomWalkModel m(q, 3, 20);
    const auto f = forward_kernel(m);
    SiteDistribution p{m.first_site(), std::vector<double>(m.sites(), 0.0)};
    p.probs[static_cast<std::size_t>(m.z - m.first_site())] = 1.0;
    for (int j = 0; j <= 20; ++j) {
      const auto d = walk_marginal(m, j);
      const auto w = weighted_paths(m.z, j, q);
      double total = 0;
      for (int x = m.first_site(); x < m.first_site() + static_cast<int>(m.sites()); ++x) {
        const double expect = w.count(x) ? w.at(x) : 0.0;
        EXPECT_NEAR(d.at(x), expect, 1e-12);
        EXPECT_NEAR(p.at(x), expect, 1e-12);
        total += d.at(x);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
      p = apply(f, p);
    }
  }
  EXPECT_THROW(walk_marginal(RandomWalkModel(0.5, 0, 4), 5), PreconditionError);
  EXPECT_THROW(RandomWalkModel(1.5, 0, 4), PreconditionError);
}

TEST(WalkTest, BackwardClosedFormMatchesBayesAndPathCounts) {
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const RandomWalkModel m(q, -2, 20);
    for (int j = 0; j < 20; ++j) {
      const auto closed = backward_conditional(m, j);
      const auto bayes = bayes_backward(m, j);
      EXPECT_LE(max_abs_difference(closed, bayes), 1e-12) << "q=" << q << " j=" << j;
      EXPECT_EQ(closed.reachable_column, bayes.reachable_column);
      const auto nj = path_counts(m.z, j), nj1 = path_counts(m.z, j + 1);
      for (const auto& [y, total] : nj1) {
        const double from_left = nj.count(y - 1) ? nj.at(y - 1) / total : 0.0;
        EXPECT_NEAR(closed.at(y - 1, y), from_left, 1e-12);
        EXPECT_NEAR(closed.at(y - 1, y) + closed.at(y + 1, y), 1.0, 1e-12);
      }
    }
  }
}

TEST(WalkTest, BackwardConditionalIgnoresQ) {
  for (double q : {0.1, 0.3, 0.5}) {
    const RandomWalkModel a(q, 0, 20), b(1 - q, 0, 20), c(0.5, 0, 20);
    for (int j = 0; j < 20; ++j) {
      EXPECT_EQ(backward_conditional(a, j).values, backward_conditional(b, j).values);
      EXPECT_EQ(backward_conditional(a, j).values, backward_conditional(c, j).values);
    }
  }
  EXPECT_THROW(backward_conditional(RandomWalkModel(0.5, 0, 4), 4), PreconditionError);
}

TEST(WalkTest, DependenceTotals) {
  const auto r = walk_dependence_report(10, 7);
  ASSERT_EQ(r.objects.size(), 4u);
  EXPECT_DOUBLE_EQ(r.forward_total, 17);
  EXPECT_DOUBLE_EQ(r.backward_total, 27);
  EXPECT_DOUBLE_EQ(r.shared_backward, 10);
  EXPECT_FALSE(r.objects[3].depends_on_q);
}

TEST(StationarityTest, SymmetricChainIsReversible) {
  const auto m = StochasticMatrix::from_rows({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
  const auto r = stationarity_demo(m);
  for (double v : r.stationary) EXPECT_NEAR(v, 1.0 / 3, 1e-12);
  EXPECT_TRUE(r.reversible);
  EXPECT_NEAR(r.eigen_gap, 0.75, 1e-12);
}

TEST(StationarityTest, RandomChainsBackwardOfBackwardIsForward) {
  auto rng = stream(21, "ts/stationary");
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.uniform_int(4);
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < n; ++c) cols.push_back(testing::random_simplex(n, rng, 0.02));
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) rows[r][c] = cols[c][r];
    const auto m = StochasticMatrix::from_rows(rows);
    const auto rep = stationarity_demo(m);
    const auto mp = apply_kernel(m, rep.stationary);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(mp[i], rep.stationary[i], 1e-12);
    EXPECT_LE(rep.backward_of_backward_error, 1e-10);
    // Detailed balance is the oracle for reversibility.
    bool balanced = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        balanced = balanced && std::abs(m.at(a, b) * rep.stationary[b] - m.at(b, a) * rep.stationary[a]) <= 1e-12;
    EXPECT_EQ(rep.reversible, balanced);
  }
}

TEST(StationarityTest, PeriodicChainIsRejected) {
  const auto m = StochasticMatrix::from_rows({{0, 1}, {1, 0}});
  EXPECT_THROW(stationarity_demo(m), PreconditionError);
}

TEST(SegmentTest, EncodingLayout) {
  const std::vector<int> xs{5, 6, 5, 4, 5};
  const auto b = encode_segment(xs, 0, 5);
  ASSERT_EQ(b.size(), 4u + 1u);
  EXPECT_EQ(b[0], 5);
  EXPECT_EQ(b[1], 0);
  EXPECT_EQ(BitString::unpack(Bytes(b.begin() + 4, b.end()), 4), BitString::parse("1001"));
  const auto neg = encode_segment(std::vector<int>{-1, 0}, 0, 2);
  EXPECT_EQ(neg[3], 0xff);
  EXPECT_THROW(encode_segment(xs, 2, 2), PreconditionError);
  EXPECT_THROW(encode_segment(xs, 0, 6), PreconditionError);
  EXPECT_THROW(encode_segment(std::vector<int>{0, 2}, 0, 2), PreconditionError);
}

TEST(SimulationTest, StepsAreUnitAndFrequencyMatchesQ) {
  auto rng = stream(22, "ts/sim");
  const RandomWalkModel m(0.3, 7, 20);
  const auto xs = simulate_walk(m, 20000, rng);
  ASSERT_EQ(xs.size(), 20001u);
  EXPECT_EQ(xs.front(), 7);
  int right = 0;
  for (std::size_t t = 1; t < xs.size(); ++t) {
    ASSERT_EQ(std::abs(xs[t] - xs[t - 1]), 1);
    right += xs[t] > xs[t - 1];
  }
  EXPECT_NEAR(right / 20000.0, 0.3, 0.015);
}

TEST(ResolutionTest, GraphShape) {
  for (int m = 1; m <= 3; ++m)
    for (int t = 1; t <= 4; ++t) {
      const auto g = time_series_resolution(m, t);
      EXPECT_EQ(g.size(), static_cast<std::size_t>(1 + m * t));
      EXPECT_EQ(g.edges().size(), static_cast<std::size_t>(m * t + m * (t - 1)));
      EXPECT_TRUE(v_structures(g).empty());
      EXPECT_TRUE(skeleton_time_symmetric(g, t));
    }
  // Without the machine node the two instances are disconnected; with it they are not.
  const auto g = time_series_resolution(2, 3);
  EXPECT_FALSE(d_separated(g, {"x1_1"}, {"x2_3"}, {}));
  EXPECT_TRUE(d_separated(g, {"x1_1"}, {"x2_3"}, {"M"}));
  EXPECT_THROW(time_series_resolution(0, 3), PreconditionError);
}

TEST(ResolutionTest, SharedWalkIsDetectedAcrossInstances) {
  auto rng = stream(23, "ts/resolved");
  const RandomWalkModel m(0.5, 0, 20);
  const auto a = simulate_walk(m, 2000, rng);
  const auto b = simulate_walk(m, 2000, rng);
  const auto c = ctw();
  const auto indep = resolved_timeseries_test({a, b}, c);
  EXPECT_FALSE(indep.hidden_common_cause);
  EXPECT_EQ(indep.split, 1000u);
  EXPECT_TRUE(indep.no_v_structures);
  const auto shared = resolved_timeseries_test({a, a}, substring_cover());
  EXPECT_TRUE(shared.hidden_common_cause);
}

TEST(ResolutionTest, Validation) {
  const std::vector<int> t{0, 1, 2};
  EXPECT_THROW(resolved_timeseries_test({t}, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_timeseries_test({t, {0, 1}}, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_timeseries_test({{0, 1}, {0, 1}}, substring_cover()), PreconditionError);
  EXPECT_THROW(resolved_timeseries_test({t, t}, substring_cover(), 2), PreconditionError);
}

}  // namespace
}  // namespace algomc
