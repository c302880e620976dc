#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qss {

class Rng;

using Bit = std::uint8_t;

// Sequence of classical bits (keys, shares, secrets).
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size) : bits_(size, 0) {}

  // Parses a string of '0'/'1' characters; anything else throws
  // std::invalid_argument.
  static BitString from_string(std::string_view text);
  static BitString random(std::size_t size, Rng& rng);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  Bit operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, Bit value) { bits_[i] = value & 1U; }
  void push_back(Bit value) { bits_.push_back(value & 1U); }
  void reserve(std::size_t n) { bits_.reserve(n); }

  BitString prefix(std::size_t n) const;
  std::size_t count_ones() const;
  std::span<const Bit> bits() const { return bits_; }

  std::string to_string() const;

  // Bitwise XOR; operands must have equal length (std::invalid_argument).
  BitString& operator^=(const BitString& other);

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<Bit> bits_;
};

BitString operator^(BitString lhs, const BitString& rhs);

// Number of positions at which two equal-length strings differ.
std::size_t hamming_distance(const BitString& a, const BitString& b);

}  // namespace qss
