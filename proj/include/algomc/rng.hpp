#pragma once

// Seeded randomness for every experiment.
//
// The generator is Philox4x32-10 (Salmon et al., Random123), a counter-based
// generator: output block n is a pure function of (key, n). All conversions to
// reals, bounded integers and Bernoulli draws are defined here rather than via
// <random> distributions, whose algorithms are implementation-defined, so a
// given (seed, label) produces the same stream on every platform.

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "algomc/error.hpp"

namespace algomc {

class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // The raw bijection: 10 rounds over a 128-bit counter under a 64-bit key.
  static Block encrypt(Block ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  std::uint32_t next_u32() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound) by rejection on the top of the 64-bit range.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw PreconditionError("uniform_int: bound must be positive");
    const std::uint64_t limit = max() - (max() % bound + 1) % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v > limit);
    return v % bound;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next_u32() >> 24); }

  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = next_byte();
    return out;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  void refill() {
    buffer_ = encrypt(counter_, key_);
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  Block counter_{0, 0, 0, 0};
  Block buffer_{};
  int used_ = 4;
};

// Seed for the stream named `label` under `master`: the first eight bytes
// (little endian) of SHA-256(master as 8 LE bytes || label).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  std::vector<unsigned char> msg(8 + label.size());
  for (int i = 0; i < 8; ++i) msg[i] = static_cast<unsigned char>(master >> (8 * i));
  std::copy(label.begin(), label.end(), msg.begin() + 8);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), digest, &len, EVP_sha256(), nullptr) != 1 || len < 8) {
    throw Error("derive_seed: SHA-256 failed");
  }
  std::uint64_t out = 0;
  for (int i = 7; i >= 0; --i) out = (out << 8) | digest[i];
  return out;
}

inline Philox4x32 stream(std::uint64_t master, std::string_view label) {
  return Philox4x32(derive_seed(master, label));
}

// Hands out derived streams and refuses to hand the same label out twice in
// one run, so two consumers can never silently share noise.
class SeedRegistry {
 public:
  explicit SeedRegistry(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const noexcept { return master_; }

  std::uint64_t seed(const std::string& label) {
    if (!labels_.insert(label).second) {
      throw PreconditionError("seed label '" + label + "' registered twice");
    }
    return derive_seed(master_, label);
  }

  Philox4x32 stream(const std::string& label) { return Philox4x32(seed(label)); }

 private:
  std::uint64_t master_;
  std::set<std::string> labels_;
};

}  // namespace algomc
