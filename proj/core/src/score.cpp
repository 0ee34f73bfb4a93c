#include "meetmate/score.hpp"

#include <algorithm>
#include <stdexcept>

namespace meetmate {

__extension__ typedef unsigned __int128 Wide;

Score Score::from_u64(std::uint64_t value) {
  Score s;
  if (value != 0) s.limbs_.push_back(value);
  return s;
}

void Score::normalize() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

void Score::set_bit(std::size_t bit) {
  const std::size_t limb = bit / 64;
  if (limbs_.size() <= limb) limbs_.resize(limb + 1, 0);
  limbs_[limb] |= std::uint64_t{1} << (bit % 64);
}

bool Score::test_bit(std::size_t bit) const {
  const std::size_t limb = bit / 64;
  return limb < limbs_.size() && ((limbs_[limb] >> (bit % 64)) & 1u);
}

std::uint64_t Score::to_u64() const {
  if (!fits_u64()) throw std::overflow_error("score exceeds 64 bits");
  return limbs_.empty() ? 0 : limbs_.front();
}

std::string Score::to_string() const {
  if (limbs_.empty()) return "0";
  // Repeated division by 10^18.
  constexpr std::uint64_t kChunk = 1'000'000'000'000'000'000ULL;
  std::vector<std::uint64_t> n = limbs_;
  std::vector<std::uint64_t> chunks;
  while (!n.empty()) {
    Wide rem = 0;
    for (std::size_t i = n.size(); i-- > 0;) {
      Wide cur = (rem << 64) | n[i];
      n[i] = static_cast<std::uint64_t>(cur / kChunk);
      rem = cur % kChunk;
    }
    chunks.push_back(static_cast<std::uint64_t>(rem));
    while (!n.empty() && n.back() == 0) n.pop_back();
  }
  std::string out = std::to_string(chunks.back());
  for (std::size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out += std::string(18 - part.size(), '0') + part;
  }
  return out;
}

Score Score::shifted_with(std::size_t shift, std::uint64_t low) const {
  Score out;
  const std::size_t limb_shift = shift / 64;
  const std::size_t bit_shift = shift % 64;
  out.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out.limbs_[i + limb_shift] |= limbs_[i] << bit_shift;
    if (bit_shift != 0) out.limbs_[i + limb_shift + 1] |= limbs_[i] >> (64 - bit_shift);
  }
  if (!out.limbs_.empty()) out.limbs_[0] |= low;
  out.normalize();
  return out;
}

Score operator+(const Score& a, const Score& b) {
  Score out;
  const std::size_t n = std::max(a.limbs_.size(), b.limbs_.size());
  out.limbs_.assign(n + 1, 0);
  Wide carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Wide sum = carry;
    if (i < a.limbs_.size()) sum += a.limbs_[i];
    if (i < b.limbs_.size()) sum += b.limbs_[i];
    out.limbs_[i] = static_cast<std::uint64_t>(sum);
    carry = sum >> 64;
  }
  out.limbs_[n] = static_cast<std::uint64_t>(carry);
  out.normalize();
  return out;
}

Score operator-(const Score& a, const Score& b) {
  if (a < b) throw std::invalid_argument("score subtraction would be negative");
  Score out = a;
  std::uint64_t borrow = 0;
  for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
    const std::uint64_t sub = i < b.limbs_.size() ? b.limbs_[i] : 0;
    const std::uint64_t cur = out.limbs_[i];
    const std::uint64_t r = cur - sub - borrow;
    borrow = (cur < sub || (cur == sub && borrow)) ? 1 : 0;
    out.limbs_[i] = r;
  }
  out.normalize();
  return out;
}

std::strong_ordering operator<=>(const Score& a, const Score& b) {
  if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() <=> b.limbs_.size();
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
  }
  return std::strong_ordering::equal;
}

}  // namespace meetmate
