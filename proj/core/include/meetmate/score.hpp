#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace meetmate {

/// Unbounded non-negative integer score.
///
/// With power-of-two weights a score is exactly the satisfaction bitmask of
/// the ranked constraints (bit n-1-rank), so lists longer than 64 entries
/// still order correctly. Limbs are little-endian and kept normalized.
class Score {
 public:
  Score() = default;
  static Score from_u64(std::uint64_t value);

  void set_bit(std::size_t bit);
  bool test_bit(std::size_t bit) const;
  bool is_zero() const { return limbs_.empty(); }

  bool fits_u64() const { return limbs_.size() <= 1; }
  /// Throws std::overflow_error when the value exceeds 64 bits.
  std::uint64_t to_u64() const;
  std::string to_string() const;  // decimal

  /// (this << shift) | low, where low < 2^shift.
  Score shifted_with(std::size_t shift, std::uint64_t low) const;

  friend Score operator+(const Score& a, const Score& b);
  /// Requires a >= b.
  friend Score operator-(const Score& a, const Score& b);

  friend std::strong_ordering operator<=>(const Score& a, const Score& b);
  friend bool operator==(const Score& a, const Score& b) = default;

 private:
  void normalize();

  std::vector<std::uint64_t> limbs_;
};

}  // namespace meetmate
