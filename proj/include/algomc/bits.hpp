#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "algomc/error.hpp"
#include "algomc/rng.hpp"

namespace algomc {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

// A string over {0,1}; one element per bit.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
      if (b > 1) throw FormatError("BitString: values must be 0 or 1");
    }
  }

  static BitString parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char ch : text) {
      if (ch == '0' || ch == '1') {
        bits.push_back(static_cast<std::uint8_t>(ch - '0'));
      } else if (ch != '\r' && ch != ' ') {
        throw FormatError(std::string("BitString: invalid character '") + ch + "'");
      }
    }
    return BitString(std::move(bits));
  }

  static BitString random(std::size_t n, Philox4x32& rng) {
    BitString out(n);
    for (auto& b : out.bits_) b = static_cast<std::uint8_t>(rng.next_u32() >> 31);
    return out;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::size_t count_ones() const {
    std::size_t k = 0;
    for (auto b : bits_) k += b;
    return k;
  }

  std::size_t hamming(const BitString& o) const {
    if (o.size() != size()) throw PreconditionError("BitString: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < size(); ++i) d += bits_[i] != o.bits_[i];
    return d;
  }

  BitString substr(std::size_t pos, std::size_t len) const {
    if (pos + len > size()) throw PreconditionError("BitString: substring out of range");
    return BitString(std::vector<std::uint8_t>(bits_.begin() + pos, bits_.begin() + pos + len));
  }

  // Packed, most significant bit first; the last byte is zero padded.
  Bytes pack() const {
    Bytes out((size() + 7) / 8, 0);
    for (std::size_t i = 0; i < size(); ++i) {
      if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return out;
  }

  static BitString unpack(const Bytes& bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) throw PreconditionError("BitString: not enough bytes");
    BitString out(nbits);
    for (std::size_t i = 0; i < nbits; ++i) out.bits_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    return out;
  }

  std::string str() const {
    std::string s(size(), '0');
    for (std::size_t i = 0; i < size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
  }

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace algomc
