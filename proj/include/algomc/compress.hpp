#pragma once

// Length estimators standing in for Kolmogorov complexity.
//
// A Compressor maps a byte string to a deterministic code length in bits.
// Three estimators ship built in:
//
//   substring-cover   Greedy LZ77-style parse over an unbounded window. At
//                     each position the parser takes the longest match that
//                     starts at an earlier position (the match may run into
//                     the current position), provided it is at least
//                     `min_match` bytes; otherwise it emits one literal.
//                     Token costs for an input of L > 0 bytes, W = bit_width(L):
//                       header   2*floor(log2(L+1)) + 1   (Elias gamma of L+1)
//                       literal  1 + 8
//                       match    1 + W (offset) + W (length)
//                     min_match is the smallest length whose literal cost
//                     exceeds the match cost. The empty string costs 1 bit.
//   substring-cover+complement
//                     As above, plus matches against the bitwise complement
//                     of earlier text. Flags become 0 (literal), 10 (match),
//                     11 (complement match); the longer candidate wins, ties
//                     go to the plain match.
//   ctw               Context-tree weighting over the bit sequence (MSB
//                     first) with KT estimators; length is -log2 of the
//                     weighted probability plus the same gamma header.
//
// The parse depends only on match lengths, so the cost is independent of
// which earlier occurrence a decoder would reference.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <zlib.h>

#include "algomc/bits.hpp"
#include "algomc/error.hpp"

namespace algomc {

using ByteView = std::span<const std::uint8_t>;

// Type-erased, copyable compressor handle. The length function must be pure.
class Compressor {
 public:
  using LengthFn = std::function<double(ByteView)>;

  Compressor(std::string name, LengthFn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  const std::string& name() const noexcept { return name_; }
  double bits(ByteView data) const { return fn_(data); }
  double bits(const Bytes& data) const { return fn_(ByteView(data)); }

 private:
  std::string name_;
  LengthFn fn_;
};

namespace lz {

// Suffix array by prefix doubling over cyclic shifts of s + sentinel.
inline std::vector<int> suffix_array(ByteView s) {
  const int n = static_cast<int>(s.size()) + 1;
  const int alphabet = 257;
  std::vector<int> p(n), c(n), cnt(std::max(alphabet, n), 0);
  auto sym = [&](int i) { return i + 1 < n ? static_cast<int>(s[i]) + 1 : 0; };
  for (int i = 0; i < n; ++i) cnt[sym(i)]++;
  for (int i = 1; i < alphabet; ++i) cnt[i] += cnt[i - 1];
  for (int i = 0; i < n; ++i) p[--cnt[sym(i)]] = i;
  c[p[0]] = 0;
  int classes = 1;
  for (int i = 1; i < n; ++i) {
    if (sym(p[i]) != sym(p[i - 1])) ++classes;
    c[p[i]] = classes - 1;
  }
  std::vector<int> pn(n), cn(n);
  for (int h = 0; (1 << h) < n && classes < n; ++h) {
    const int shift = 1 << h;
    for (int i = 0; i < n; ++i) {
      pn[i] = p[i] - shift;
      if (pn[i] < 0) pn[i] += n;
    }
    std::fill(cnt.begin(), cnt.begin() + classes, 0);
    for (int i = 0; i < n; ++i) cnt[c[pn[i]]]++;
    for (int i = 1; i < classes; ++i) cnt[i] += cnt[i - 1];
    for (int i = n - 1; i >= 0; --i) p[--cnt[c[pn[i]]]] = pn[i];
    cn[p[0]] = 0;
    classes = 1;
    for (int i = 1; i < n; ++i) {
      const int a1 = c[p[i]], a2 = c[(p[i] + shift) % n];
      const int b1 = c[p[i - 1]], b2 = c[(p[i - 1] + shift) % n];
      if (a1 != b1 || a2 != b2) ++classes;
      cn[p[i]] = classes - 1;
    }
    c.swap(cn);
  }
  return std::vector<int>(p.begin() + 1, p.end());
}

// Kasai: lcp[r] = lcp(suffix sa[r-1], suffix sa[r]); lcp[0] = 0.
inline std::vector<int> lcp_array(ByteView s, const std::vector<int>& sa) {
  const int n = static_cast<int>(s.size());
  std::vector<int> rank(n), lcp(n, 0);
  for (int r = 0; r < n; ++r) rank[sa[r]] = r;
  int h = 0;
  for (int i = 0; i < n; ++i) {
    if (rank[i] > 0) {
      const int j = sa[rank[i] - 1];
      while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
      lcp[rank[i]] = h;
      if (h > 0) --h;
    } else {
      h = 0;
    }
  }
  return lcp;
}

// Longest previous factor: lpf[i] = max over j < i of lcp(s[i..], s[j..])
// (Crochemore & Ilie, linear time from SA and LCP).
inline std::vector<int> longest_previous_factor(ByteView s) {
  const int n = static_cast<int>(s.size());
  std::vector<int> lpf(n, 0);
  if (n == 0) return lpf;
  auto sa = suffix_array(s);
  auto lcp = lcp_array(s, sa);
  sa.push_back(-1);
  lcp.push_back(0);
  std::vector<int> stack{0};
  for (int i = 1; i <= n; ++i) {
    while (!stack.empty() &&
           (sa[i] < sa[stack.back()] || (sa[i] > sa[stack.back()] && lcp[i] <= lcp[stack.back()]))) {
      const int top = stack.back();
      if (sa[i] < sa[top]) {
        lpf[sa[top]] = std::max(lcp[top], lcp[i]);
        lcp[i] = std::min(lcp[top], lcp[i]);
      } else {
        lpf[sa[top]] = lcp[top];
      }
      stack.pop_back();
    }
    if (i < n) stack.push_back(i);
  }
  return lpf;
}

// Longest match of s[i..] against the complement of text starting at some
// j < i. Hash chains keyed on `gram` complemented bytes; the chain for the
// current gram is scanned exhaustively.
class ComplementMatcher {
 public:
  ComplementMatcher(ByteView s, int gram) : s_(s), gram_(gram) {}

  int longest(int i) {
    const int n = static_cast<int>(s_.size());
    while (inserted_ < i) {
      if (inserted_ + gram_ <= n) chains_[key(inserted_, true)].push_back(inserted_);
      ++inserted_;
    }
    if (i + gram_ > n) return 0;
    const auto it = chains_.find(key(i, false));
    if (it == chains_.end()) return 0;
    int best = 0;
    for (int j : it->second) {
      int t = 0;
      while (i + t < n && static_cast<std::uint8_t>(~s_[j + t]) == s_[i + t]) ++t;
      best = std::max(best, t);
    }
    return best;
  }

 private:
  std::uint64_t key(int pos, bool complement) const {
    std::uint64_t k = 0;
    for (int t = 0; t < gram_; ++t) {
      const std::uint8_t b = complement ? static_cast<std::uint8_t>(~s_[pos + t]) : s_[pos + t];
      k = (k << 8) | b;
    }
    return k;
  }

  ByteView s_;
  int gram_;
  int inserted_ = 0;
  std::unordered_map<std::uint64_t, std::vector<int>> chains_;
};

inline double gamma_header_bits(std::size_t len) {
  return 2.0 * std::floor(std::log2(static_cast<double>(len) + 1.0)) + 1.0;
}

struct ParseStats {
  std::size_t literals = 0;
  std::size_t matches = 0;
  std::size_t complement_matches = 0;
  double bits = 0.0;
};

inline ParseStats substring_cover_parse(ByteView s, bool complement) {
  ParseStats st;
  const std::size_t len = s.size();
  st.bits = gamma_header_bits(len);
  if (len == 0) return st;
  const int width = static_cast<int>(std::bit_width(len));
  const double literal_cost = 9.0;  // flag '0' + 8 bits in both layouts
  const double match_cost = (complement ? 2.0 : 1.0) + 2.0 * width;
  // Shortest match worth coding: literal cost must exceed the match cost.
  int threshold = 2;
  while (threshold * literal_cost <= match_cost) ++threshold;

  const auto lpf = longest_previous_factor(s);
  ComplementMatcher comp(s, std::min<int>(threshold, 8));
  std::size_t i = 0;
  while (i < len) {
    const int plain = lpf[i];
    const int inv = complement ? comp.longest(static_cast<int>(i)) : 0;
    const int best = std::max(plain, inv);
    if (best >= threshold) {
      st.bits += match_cost;
      if (plain >= inv) {
        ++st.matches;
      } else {
        ++st.complement_matches;
      }
      i += static_cast<std::size_t>(best);
    } else {
      st.bits += literal_cost;
      ++st.literals;
      ++i;
    }
  }
  return st;
}

}  // namespace lz

namespace ctw_detail {

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// Code length in bits of the bit sequence of `s` under depth-`depth` CTW.
inline double ctw_bits(ByteView s, int depth) {
  struct Node {
    std::uint32_t zeros = 0, ones = 0;
    double log_pe = 0.0;  // natural log
    double log_pw = 0.0;
  };
  const std::size_t nodes = (std::size_t{1} << (depth + 1)) - 1;
  std::vector<Node> tree(nodes);
  const double log_half = std::log(0.5);
  std::uint32_t context = 0;
  const std::uint32_t mask = depth >= 32 ? ~0u : ((1u << depth) - 1u);
  std::vector<std::size_t> path(depth + 1);
  for (std::uint8_t byte : s) {
    for (int b = 7; b >= 0; --b) {
      const int bit = (byte >> b) & 1;
      // path[d] = node for the most recent d context bits
      for (int d = 0; d <= depth; ++d) {
        const std::uint32_t suffix = d == 0 ? 0u : (context & ((1u << d) - 1u));
        path[d] = ((std::size_t{1} << d) - 1) + suffix;
      }
      for (int d = depth; d >= 0; --d) {
        Node& nd = tree[path[d]];
        const double count = bit ? nd.ones : nd.zeros;
        nd.log_pe += std::log((count + 0.5) / (nd.zeros + nd.ones + 1.0));
        if (bit) {
          ++nd.ones;
        } else {
          ++nd.zeros;
        }
        if (d == depth) {
          nd.log_pw = nd.log_pe;
        } else {
          // children: context extended by one older bit
          const std::uint32_t suffix = d == 0 ? 0u : (context & ((1u << d) - 1u));
          const std::size_t base = (std::size_t{1} << (d + 1)) - 1;
          const Node& c0 = tree[base + suffix];
          const Node& c1 = tree[base + (suffix | (1u << d))];
          nd.log_pw = log_half + log_add(nd.log_pe, c0.log_pw + c1.log_pw);
        }
      }
      context = ((context << 1) | static_cast<std::uint32_t>(bit)) & mask;
    }
  }
  return -tree[0].log_pw / std::log(2.0);
}

}  // namespace ctw_detail

inline Compressor substring_cover() {
  return Compressor("substring-cover", [](ByteView s) { return lz::substring_cover_parse(s, false).bits; });
}

inline Compressor substring_cover_complement() {
  return Compressor("substring-cover+complement",
                    [](ByteView s) { return lz::substring_cover_parse(s, true).bits; });
}

inline Compressor ctw(int depth = 12) {
  if (depth < 0 || depth > 24) throw PreconditionError("ctw: depth must lie in [0, 24]");
  return Compressor("ctw-" + std::to_string(depth), [depth](ByteView s) {
    return lz::gamma_header_bits(s.size()) + ctw_detail::ctw_bits(s, depth);
  });
}

// zlib (deflate) at the given level; length = 8 * compressed bytes.
inline Compressor zlib(int level = 9) {
  return Compressor("zlib-" + std::to_string(level), [level](ByteView s) {
    uLongf out_len = compressBound(static_cast<uLong>(s.size()));
    std::vector<Bytef> out(out_len);
    if (compress2(out.data(), &out_len, s.data(), static_cast<uLong>(s.size()), level) != Z_OK) {
      throw Error("zlib compression failed");
    }
    return 8.0 * static_cast<double>(out_len);
  });
}

// Adapter for any external length function (for instance a wrapper around a
// command-line compressor). The function must be deterministic.
inline Compressor from_function(std::string name, Compressor::LengthFn fn) {
  return Compressor(std::move(name), std::move(fn));
}

inline Compressor compressor_by_name(const std::string& name) {
  if (name == "substring-cover") return substring_cover();
  if (name == "substring-cover+complement") return substring_cover_complement();
  if (name.rfind("ctw", 0) == 0) {
    return name.size() > 4 ? ctw(std::stoi(name.substr(4))) : ctw();
  }
  if (name.rfind("zlib", 0) == 0) {
    return name.size() > 5 ? zlib(std::stoi(name.substr(5))) : zlib();
  }
  throw PreconditionError("unknown compressor '" + name + "'");
}

}  // namespace algomc
