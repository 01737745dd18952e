#pragma once
// Bit strings and {-1,0,1} signed coefficient sequences.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tracekit/rng.hpp"

namespace tracekit {

// Immutable sequence over {0,1}. Length is fixed at construction.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw std::invalid_argument("BitString: elements must be 0 or 1");
  }

  static BitString from_string(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected '0'/'1'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitString(std::move(bits));
  }

  static BitString zeros(std::size_t n) { return BitString(std::vector<std::uint8_t>(n, 0)); }

  static BitString random(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = rng.next_bit() ? 1 : 0;
    return BitString(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
    return s;
  }

  friend bool operator==(const BitString& a, const BitString& b) { return a.bits_ == b.bits_; }
  friend bool operator<(const BitString& a, const BitString& b) { return a.bits_ < b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Sequence over {-1,0,+1}; the coefficients of A(z) = sum_k a_k z^k.
class SignedSeq {
 public:
  SignedSeq() = default;

  explicit SignedSeq(std::vector<std::int8_t> coeffs) : coeffs_(std::move(coeffs)) {
    for (auto c : coeffs_)
      if (c < -1 || c > 1) throw std::invalid_argument("SignedSeq: entries must be in {-1,0,1}");
  }

  std::size_t size() const { return coeffs_.size(); }
  std::int8_t operator[](std::size_t i) const { return coeffs_[i]; }
  const std::vector<std::int8_t>& coeffs() const { return coeffs_; }

  bool is_nonzero() const {
    for (auto c : coeffs_)
      if (c != 0) return true;
    return false;
  }

  SignedSeq negated() const {
    std::vector<std::int8_t> c(coeffs_);
    for (auto& v : c) v = static_cast<std::int8_t>(-v);
    return SignedSeq(std::move(c));
  }

  friend bool operator==(const SignedSeq& a, const SignedSeq& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator<(const SignedSeq& a, const SignedSeq& b) { return a.coeffs_ < b.coeffs_; }

 private:
  std::vector<std::int8_t> coeffs_;
};

// Entrywise difference x - y of equal-length bit strings.
inline SignedSeq diff_seq(const BitString& x, const BitString& y) {
  if (x.size() != y.size()) throw std::invalid_argument("diff_seq: length mismatch");
  std::vector<std::int8_t> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    d[i] = static_cast<std::int8_t>(static_cast<int>(x[i]) - static_cast<int>(y[i]));
  return SignedSeq(std::move(d));
}

}  // namespace tracekit
