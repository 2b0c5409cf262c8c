#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "algomc/bits.hpp"
#include "algomc/complexity.hpp"
#include "algomc/compress.hpp"
#include "algomc/rng.hpp"
#include "support.hpp"

namespace algomc {
namespace {

// Random123 known-answer vectors for Philox4x32-10.
TEST(RngTest, PhiloxKnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngTest, StreamStartsAtCounterZero) {
  Philox4x32 g(0);
  EXPECT_EQ(g.next_u32(), 0x6627e8d5u);
  EXPECT_EQ(g.next_u32(), 0xe169c58du);
}

// First eight bytes of SHA-256(master LE || label), computed with Python's hashlib.
TEST(RngTest, DerivedSeedsMatchSha256) {
  EXPECT_EQ(derive_seed(0, ""), 0x7a0b81a1f57055afull);
  EXPECT_EQ(derive_seed(42, "abc"), 0x2976ed0845c68864ull);
  EXPECT_EQ(derive_seed(~0ull, "noise/X"), 0x757e1b5308f6b316ull);
}

TEST(RngTest, SeedRegistryRefusesReuse) {
  SeedRegistry reg(1);
  reg.seed("a");
  EXPECT_THROW(reg.seed("a"), PreconditionError);
  EXPECT_NE(reg.seed("b"), derive_seed(1, "a"));
}

TEST(RngTest, UniformIntIsInRangeAndRoughlyFlat) {
  Philox4x32 g(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = g.uniform_int(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_THROW(g.uniform_int(0), PreconditionError);
}

TEST(RngTest, Uniform01MeanAndRange) {
  Philox4x32 g(10);
  double s = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
  }
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
}

TEST(RngTest, ShuffleIsAPermutation) {
  Philox4x32 g(12);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  g.shuffle(v);
  std::set<int> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 50u);
}

TEST(BitsTest, ParsePackRoundTrip) {
  auto rng = stream(1, "bits/pack");
  for (std::size_t n : {0, 1, 7, 8, 9, 63, 200}) {
    const auto b = testing::random_bits(n, rng);
    EXPECT_EQ(BitString::unpack(b.pack(), n), b);
    EXPECT_EQ(BitString::parse(b.str()), b);
    EXPECT_EQ(b.pack().size(), (n + 7) / 8);
  }
  EXPECT_THROW(BitString::parse("01x"), FormatError);
}

TEST(BitsTest, PackIsMsbFirst) {
  EXPECT_EQ(BitString::parse("10000001").pack(), (Bytes{0x81}));
  EXPECT_EQ(BitString::parse("1").pack(), (Bytes{0x80}));
}

TEST(BitsTest, CountsAndSubstrings) {
  const auto b = BitString::parse("0110100");
  EXPECT_EQ(b.count_ones(), 3u);
  EXPECT_EQ(b.substr(1, 3).str(), "110");
  EXPECT_EQ(b.hamming(BitString::parse("0110111")), 2u);
}

std::vector<int> lpf_brute(const Bytes& s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> out(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      int l = 0;
      while (i + l < n && s[j + l] == s[i + l]) ++l;
      out[i] = std::max(out[i], l);
    }
  return out;
}

TEST(CompressTest, LongestPreviousFactorMatchesBruteForce) {
  auto rng = stream(2, "compress/lpf");
  for (int t = 0; t < 200; ++t) {
    const auto n = rng.uniform_int(80);
    const auto alphabet = 1 + rng.uniform_int(4);
    Bytes s(n);
    for (auto& c : s) c = static_cast<std::uint8_t>(rng.uniform_int(alphabet));
    ASSERT_EQ(lz::longest_previous_factor(s), lpf_brute(s)) << "t=" << t;
  }
}

TEST(CompressTest, SuffixArrayIsSorted) {
  auto rng = stream(3, "compress/sa");
  Bytes s(300);
  for (auto& c : s) c = static_cast<std::uint8_t>(rng.uniform_int(3));
  const auto sa = lz::suffix_array(s);
  ASSERT_EQ(sa.size(), s.size());
  for (std::size_t i = 1; i < sa.size(); ++i) {
    EXPECT_TRUE(std::lexicographical_compare(s.begin() + sa[i - 1], s.end(), s.begin() + sa[i], s.end()));
  }
}

TEST(CompressTest, SubstringCoverTokenCosts) {
  const auto c = substring_cover();
  EXPECT_EQ(c.bits(Bytes{}), 1.0);
  EXPECT_EQ(c.bits(Bytes{0x41}), 3.0 + 9.0);
  // Incompressible-looking input costs one literal per byte plus the header.
  Bytes distinct(200);
  for (int i = 0; i < 200; ++i) distinct[i] = static_cast<std::uint8_t>(i);
  EXPECT_EQ(c.bits(distinct), 2.0 * std::floor(std::log2(201.0)) + 1.0 + 9.0 * 200);
  // One literal, then a single self-overlapping match.
  const Bytes run(1000, 0x00);
  const double w = std::bit_width(1000u);
  EXPECT_EQ(c.bits(run), 2.0 * std::floor(std::log2(1001.0)) + 1.0 + 9.0 + 1.0 + 2.0 * w);
}

TEST(CompressTest, RepetitionIsCheapAndInputsAreDeterministic) {
  auto rng = stream(4, "compress/rep");
  const auto x = rng.bytes(512);
  Bytes xx = x;
  xx.insert(xx.end(), x.begin(), x.end());
  for (const auto& c : {substring_cover(), zlib()}) {
    EXPECT_LT(c.bits(xx), c.bits(x) + 400) << c.name();
  }
  for (const auto& c : {substring_cover(), ctw(), zlib()}) EXPECT_EQ(c.bits(x), c.bits(x)) << c.name();
}

TEST(CompressTest, ComplementMatchesHelpOnlyTheComplementVariant) {
  auto rng = stream(5, "compress/complement");
  const auto x = rng.bytes(400);
  Bytes xc = x;
  for (auto b : x) xc.push_back(static_cast<std::uint8_t>(~b));
  EXPECT_GT(substring_cover().bits(xc), 400 * 9.0 * 2 - 100);
  EXPECT_LT(substring_cover_complement().bits(xc), 400 * 9.0 + 200);
}

TEST(CompressTest, CtwApproachesEntropyOnBernoulliBits) {
  auto rng = stream(6, "compress/ctw");
  const auto rep = entropy_rate_check(ctw(), 0.1, 1 << 15, 2, rng);
  EXPECT_GT(rep.gap, 0.0);
  EXPECT_LT(rep.gap, 0.03);
  EXPECT_THROW(ctw(30), PreconditionError);
}

TEST(CompressTest, LookupByName) {
  EXPECT_EQ(compressor_by_name("substring-cover").name(), "substring-cover");
  EXPECT_EQ(compressor_by_name("ctw").name(), "ctw-12");
  EXPECT_EQ(compressor_by_name("ctw-8").name(), "ctw-8");
  EXPECT_EQ(compressor_by_name("zlib-6").name(), "zlib-6");
  EXPECT_THROW(compressor_by_name("bzip9"), PreconditionError);
}

TEST(ComplexityTest, FramingLayout) {
  const Bytes a{1, 2}, b{};
  const auto f = frame({ByteView(a), ByteView(b)});
  ASSERT_EQ(f.size(), 8u + 2 + 8);
  EXPECT_EQ(f[0], 0xF7);
  EXPECT_EQ(f[4], 2);
  EXPECT_EQ(f[8], 1);
  EXPECT_EQ(f[14], 0);
  EXPECT_EQ(concat_framed({a, b}), f);
}

TEST(ComplexityTest, SlackFormula) {
  EXPECT_DOUBLE_EQ(default_slack_bits(1024), 84.0);
  EXPECT_DOUBLE_EQ(default_slack_bits(0), 66.0);
}

TEST(ComplexityTest, MutualInformationIsExactlySymmetric) {
  auto rng = stream(7, "complexity/sym");
  const auto c = substring_cover();
  for (int t = 0; t < 20; ++t) {
    const auto x = rng.bytes(100 + rng.uniform_int(200));
    auto y = rng.bytes(50);
    y.insert(y.end(), x.begin(), x.begin() + 40);
    const auto z = rng.bytes(60);
    EXPECT_EQ(algorithmic_mi(c, x, y).value_bits, algorithmic_mi(c, y, x).value_bits);
    EXPECT_EQ(algorithmic_cmi(c, x, y, z).value_bits, algorithmic_cmi(c, y, x, z).value_bits);
  }
}

TEST(ComplexityTest, IndependentStringsShareNothingCopiesShareEverything) {
  auto rng = stream(8, "complexity/mi");
  const auto x = rng.bytes(1024), y = rng.bytes(1024);
  for (const auto& c : {substring_cover(), ctw()}) {
    const auto ind = algorithmic_mi(c, x, y);
    EXPECT_TRUE(ind.approx_zero()) << c.name() << " " << ind.value_bits;
  }
  // Only the parsing estimator sees long-range copies.
  const auto c = substring_cover();
  EXPECT_GT(algorithmic_mi(c, x, x).value_bits, 0.8 * 8 * 1024);
  EXPECT_TRUE(algorithmic_cmi(c, x, x, x).approx_zero());
}

TEST(ComplexityTest, ConditionalComplexity) {
  auto rng = stream(9, "complexity/cond");
  const auto c = substring_cover();
  const auto x = rng.bytes(800);
  const auto given_self = k_hat_cond(c, x, x);
  EXPECT_LT(given_self.value_bits, given_self.slack_bits);
  const auto given_other = k_hat_cond(c, x, rng.bytes(800));
  EXPECT_GT(given_other.value_bits, 8 * 800 * 0.9);
}

TEST(ComplexityTest, DistancesSeparateRelatedFromUnrelated) {
  auto rng = stream(10, "complexity/ncd");
  const auto c = substring_cover();
  const auto x = rng.bytes(600), y = rng.bytes(600);
  Bytes x2 = x;
  x2[300] ^= 0xFF;
  EXPECT_LT(ncd(c, x, x2), 0.1);
  EXPECT_GT(ncd(c, x, y), 0.9);
  EXPECT_LT(ds_distance(c, x, x2), ds_distance(c, x, y));
  EXPECT_THROW(ncd(c, Bytes{}, Bytes{}), PreconditionError);
}

TEST(ComplexityTest, EntropyRateRejectsShortInputs) {
  Philox4x32 g(1);
  EXPECT_THROW(entropy_rate_check(ctw(), 0.1, 100, 1, g), PreconditionError);
}

}  // namespace
}  // namespace algomc
