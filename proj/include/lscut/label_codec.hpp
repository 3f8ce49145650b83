#pragma once

// Label space bookkeeping: k labels are carried by b = ceil(log2 k) binary
// inner nodes. Codes are MSB-first; unused codes (k <= n < 2^b) fold onto
// the used code obtained by clearing the most significant bit, which is
// always at Hamming distance one.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lscut/errors.hpp"

namespace lscut {

using BitCode = std::vector<std::uint8_t>;

inline constexpr int kMaxLabels = 256;
inline constexpr int kMaxBits = 8;

/// Minimal number of bits b with 2^b >= k.
inline int bit_width(int k) {
  if (k < 2) throw InvalidArgument("invalid label count " + std::to_string(k) + " (need k >= 2)");
  int b = 0;
  while ((std::int64_t{1} << b) < k) ++b;
  return b;
}

inline BitCode encode(std::uint32_t label, int b) {
  if (b < 1 || b > 31) throw RangeError("bit width out of range: " + std::to_string(b));
  if (label >= (std::uint32_t{1} << b))
    throw RangeError("label " + std::to_string(label) + " does not fit in " + std::to_string(b) + " bits");
  BitCode bits(static_cast<std::size_t>(b));
  for (int p = 0; p < b; ++p) bits[p] = static_cast<std::uint8_t>((label >> (b - 1 - p)) & 1u);
  return bits;
}

inline std::uint32_t decode(std::span<const std::uint8_t> bits) {
  if (bits.empty() || bits.size() > 31) throw RangeError("bit sequence length out of range");
  std::uint32_t v = 0;
  for (auto bit : bits) {
    if (bit > 1) throw InvalidArgument("bit values must be 0 or 1");
    v = (v << 1) | bit;
  }
  return v;
}

/// Bit p (0 = most significant) of code n in a b-bit word.
inline constexpr int code_bit(std::uint32_t n, int p, int b) { return static_cast<int>((n >> (b - 1 - p)) & 1u); }

inline int hamming(std::span<const std::uint8_t> a, std::span<const std::uint8_t> c) {
  if (a.size() != c.size()) throw InvalidArgument("hamming: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != c[i]);
  return d;
}

class LabelSpace {
 public:
  explicit LabelSpace(int k) : k_(k), b_(bit_width(k)) {
    if (k > kMaxLabels) throw InvalidArgument("label count " + std::to_string(k) + " exceeds " + std::to_string(kMaxLabels));
    const std::uint32_t codes = num_codes();
    merge_map_.resize(codes);
    const std::uint32_t msb = std::uint32_t{1} << (b_ - 1);
    for (std::uint32_t n = 0; n < codes; ++n) merge_map_[n] = n < static_cast<std::uint32_t>(k_) ? n : (n & ~msb);
  }

  int k() const { return k_; }
  int b() const { return b_; }
  std::uint32_t num_codes() const { return std::uint32_t{1} << b_; }
  bool is_extra(std::uint32_t code) const { return code >= static_cast<std::uint32_t>(k_) && code < num_codes(); }

  /// Label index that a decoded code stands for.
  int merge(std::uint32_t code) const {
    if (code >= num_codes()) throw RangeError("code " + std::to_string(code) + " out of range");
    return static_cast<int>(merge_map_[code]);
  }

  const std::vector<std::uint32_t>& merge_map() const { return merge_map_; }

 private:
  int k_;
  int b_;
  std::vector<std::uint32_t> merge_map_;
};

}  // namespace lscut
