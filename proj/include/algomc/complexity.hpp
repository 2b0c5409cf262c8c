#pragma once

// Compression-based estimates of (conditional) complexity, algorithmic mutual
// information and the normalized information distances.
//
// Several strings are described jointly by framing: each part is written as
// a 4-byte sentinel, its length as 4 little-endian bytes, then its bytes. The
// sentinel is not escaped inside the data; the length prefix keeps the
// framing unambiguous. Every quantity below (including single-string terms
// inside the mutual informations) uses the framed form, so framing overhead
// cancels to first order.
//
// Conditional complexity is joint-minus-marginal:
//   K(x | y)      := K(y, x) - K(y)
//   I(x : y)      := K(x) + K(y) - K(x, y)
//   I(x : y | z)  := K(z, x) + K(z, y) - K(z) - K(z, x, y)
// Joint terms over unordered pairs take the shorter of the two orders, which
// makes I(x:y) and I(x:y|z) exactly symmetric.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "algomc/bits.hpp"
#include "algomc/compress.hpp"
#include "algomc/discrete.hpp"
#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

inline constexpr std::uint8_t kSentinel[4] = {0xF7, 0x1C, 0x3A, 0xD5};

inline Bytes frame(std::initializer_list<ByteView> parts) {
  Bytes out;
  for (const auto& p : parts) {
    out.insert(out.end(), std::begin(kSentinel), std::end(kSentinel));
    const auto n = static_cast<std::uint32_t>(p.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

// Several strings collapsed into one, each length-prefixed, in the given order.
inline Bytes concat_framed(const std::vector<Bytes>& parts) {
  Bytes out;
  for (const auto& p : parts) {
    const auto f = frame({ByteView(p)});
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

// Additive uncertainty budget for comparisons "equal up to a constant":
// 64 + 2 log2(total input length in bytes).
inline double default_slack_bits(std::size_t total_len) {
  return 64.0 + 2.0 * std::log2(static_cast<double>(std::max<std::size_t>(total_len, 2)));
}

struct MiEstimate {
  double value_bits = 0.0;
  double slack_bits = 0.0;
  std::string compressor;

  bool approx_zero() const { return value_bits <= slack_bits; }
};

struct CondEstimate {
  double value_bits = 0.0;  // clamped at -slack
  double raw_bits = 0.0;
  double slack_bits = 0.0;
  bool clamped = false;
};

inline double k_hat(const Compressor& c, ByteView x) { return c.bits(x); }

inline double k_hat_framed(const Compressor& c, std::initializer_list<ByteView> parts) {
  return c.bits(frame(parts));
}

// K(x | y) = K(y, x) - K(y).
inline CondEstimate k_hat_cond(const Compressor& c, ByteView x, ByteView y) {
  CondEstimate e;
  e.slack_bits = default_slack_bits(x.size() + y.size());
  e.raw_bits = k_hat_framed(c, {y, x}) - k_hat_framed(c, {y});
  e.value_bits = std::max(e.raw_bits, -e.slack_bits);
  e.clamped = e.raw_bits < -e.slack_bits;
  return e;
}

inline double k_hat_pair(const Compressor& c, ByteView x, ByteView y) {
  return std::min(k_hat_framed(c, {x, y}), k_hat_framed(c, {y, x}));
}

inline MiEstimate algorithmic_mi(const Compressor& c, ByteView x, ByteView y) {
  MiEstimate e;
  e.compressor = c.name();
  e.slack_bits = default_slack_bits(x.size() + y.size());
  e.value_bits = k_hat_framed(c, {x}) + k_hat_framed(c, {y}) - k_hat_pair(c, x, y);
  return e;
}

inline MiEstimate algorithmic_cmi(const Compressor& c, ByteView x, ByteView y, ByteView z) {
  MiEstimate e;
  e.compressor = c.name();
  e.slack_bits = default_slack_bits(x.size() + y.size() + z.size());
  const double kz = k_hat_framed(c, {z});
  const double kzx = k_hat_framed(c, {z, x});
  const double kzy = k_hat_framed(c, {z, y});
  const double kzxy = std::min(k_hat_framed(c, {z, x, y}), k_hat_framed(c, {z, y, x}));
  e.value_bits = kzx + kzy - kz - kzxy;
  return e;
}

// Normalized information distance max(K(x|y), K(y|x)) / max(K(x), K(y)).
inline double ncd(const Compressor& c, ByteView x, ByteView y) {
  if (x.empty() && y.empty()) throw PreconditionError("ncd: both strings empty");
  const double kx = k_hat_framed(c, {x});
  const double ky = k_hat_framed(c, {y});
  const double kxy = k_hat_pair(c, x, y);
  return std::max(kxy - ky, kxy - kx) / std::max(kx, ky);
}

// d_s = 1 - I(x:y) / K(x, y).
inline double ds_distance(const Compressor& c, ByteView x, ByteView y) {
  if (x.empty() && y.empty()) throw PreconditionError("ds_distance: both strings empty");
  const double kxy = k_hat_pair(c, x, y);
  const double mi = k_hat_framed(c, {x}) + k_hat_framed(c, {y}) - kxy;
  return 1.0 - mi / kxy;
}

struct EntropyRateReport {
  double p_one = 0.0;
  std::size_t length = 0;
  std::size_t trials = 0;
  double mean_rate = 0.0;   // mean k_hat(sample) / n, bits per symbol
  double entropy = 0.0;     // H(P0), bits per symbol
  double gap = 0.0;         // mean_rate - entropy
  std::string compressor;
};

// Mean compressed length per symbol of i.i.d. Bernoulli(p_one) strings of
// length n (packed 8 symbols per byte), compared with the source entropy.
inline EntropyRateReport entropy_rate_check(const Compressor& c, double p_one, std::size_t n,
                                            std::size_t trials, Philox4x32& rng) {
  if (n < (std::size_t{1} << 10)) throw PreconditionError("entropy_rate_check: n must be >= 1024");
  if (trials == 0) throw PreconditionError("entropy_rate_check: trials must be positive");
  EntropyRateReport r;
  r.p_one = p_one;
  r.length = n;
  r.trials = trials;
  r.compressor = c.name();
  r.entropy = binary_entropy(p_one);
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    BitString s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = rng.bernoulli(p_one) ? 1 : 0;
    total += c.bits(s.pack()) / static_cast<double>(n);
  }
  r.mean_rate = total / static_cast<double>(trials);
  r.gap = r.mean_rate - r.entropy;
  return r;
}

}  // namespace algomc
