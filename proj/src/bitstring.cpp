#include "qss/bitstring.hpp"

#include <algorithm>
#include <stdexcept>

#include "qss/rng.hpp"

namespace qss {
namespace {

void require_same_length(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("bit string length mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

}  // namespace

BitString BitString::from_string(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
    out.push_back(static_cast<Bit>(c - '0'));
  }
  return out;
}

BitString BitString::random(std::size_t size, Rng& rng) {
  BitString out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(rng.bit());
  return out;
}

BitString BitString::prefix(std::size_t n) const {
  BitString out;
  out.bits_.assign(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
  return out;
}

std::size_t BitString::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), Bit{1}));
}

std::string BitString::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

BitString& BitString::operator^=(const BitString& other) {
  require_same_length(*this, other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= other.bits_[i];
  return *this;
}

BitString operator^(BitString lhs, const BitString& rhs) {
  lhs ^= rhs;
  return lhs;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  require_same_length(a, b);
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

}  // namespace qss
