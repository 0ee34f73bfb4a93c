#pragma once

#include "meetmate/dsl.hpp"
#include "meetmate/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meetmate {

/// Fixed-size bit set over grid slot indices.
class SlotMask {
 public:
  SlotMask() = default;
  explicit SlotMask(std::size_t size, bool value = false);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  bool any() const;
  std::size_t count() const;
  /// Index of the lowest set bit, or size() when empty.
  std::size_t first() const;

  SlotMask& operator&=(const SlotMask& other);
  SlotMask& operator|=(const SlotMask& other);
  void flip();

  std::vector<std::uint64_t>& words() { return words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SlotMask&, const SlotMask&) = default;

 private:
  void clear_tail();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

namespace dsl {

/// Evaluates constraints over every slot of a grid at once. Per-slot
/// features are precomputed, and per-person availability and organizer gap
/// columns are cached across calls, so scoring many constraints against one
/// grid costs a few linear passes per constraint.
///
/// Agrees with evaluate() slot by slot (checked by the test suite). Not
/// thread-safe: caches are filled lazily.
class GridEvaluator {
 public:
  /// `base` supplies everything but the candidate, which ranges over `grid`.
  GridEvaluator(const TimeGrid& grid, const EvalContext& base);

  SlotMask evaluate(const Expr& expr);
  std::size_t size() const { return slot_count_; }

 private:
  template <class Pred>
  SlotMask build(Pred pred) const;

  const SlotMask& person_free_column(const std::string& person_id);
  const SlotMask& all_free_column();
  const std::vector<int>& gap_column(GapSide side);

  const TimeGrid& grid_;
  EvalContext base_;
  std::size_t slot_count_;
  std::vector<std::int32_t> start_mod_;
  std::vector<std::int32_t> end_mod_;
  std::vector<std::int32_t> day_index_;
  std::vector<std::int64_t> day_number_;
  std::vector<std::uint8_t> weekday_;
  std::map<std::string, SlotMask> free_cache_;
  std::optional<SlotMask> all_free_cache_;
  std::optional<std::vector<int>> gap_before_;
  std::optional<std::vector<int>> gap_after_;
};

}  // namespace dsl
}  // namespace meetmate
