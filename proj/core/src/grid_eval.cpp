#include "meetmate/grid_eval.hpp"

#include <algorithm>
#include <bit>

namespace meetmate {

SlotMask::SlotMask(std::size_t size, bool value)
    : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  clear_tail();
}

void SlotMask::clear_tail() {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

bool SlotMask::any() const {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t SlotMask::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t SlotMask::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
  }
  return size_;
}

SlotMask& SlotMask::operator&=(const SlotMask& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

SlotMask& SlotMask::operator|=(const SlotMask& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

void SlotMask::flip() {
  for (auto& w : words_) w = ~w;
  clear_tail();
}

namespace dsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

GridEvaluator::GridEvaluator(const TimeGrid& grid, const EvalContext& base)
    : grid_(grid), base_(base), slot_count_(grid.size()) {
  start_mod_.reserve(slot_count_);
  end_mod_.reserve(slot_count_);
  day_index_.reserve(slot_count_);
  day_number_.reserve(slot_count_);
  weekday_.reserve(slot_count_);
  const auto horizon_day = base_.horizon_start.day_number();
  for (const auto& s : grid.slots()) {
    const int start_mod = s.start().minute_of_day();
    start_mod_.push_back(start_mod);
    end_mod_.push_back(static_cast<std::int32_t>(start_mod + s.duration_minutes()));
    day_number_.push_back(s.start().day_number());
    day_index_.push_back(static_cast<std::int32_t>(s.start().day_number() - horizon_day));
    weekday_.push_back(static_cast<std::uint8_t>(s.start().weekday()));
  }
}

template <class Pred>
SlotMask GridEvaluator::build(Pred pred) const {
  SlotMask mask(slot_count_);
  auto& words = mask.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::size_t base = w * 64;
    const std::size_t n = std::min<std::size_t>(64, slot_count_ - base);
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < n; ++b) {
      bits |= static_cast<std::uint64_t>(pred(base + b)) << b;
    }
    words[w] = bits;
  }
  return mask;
}

const SlotMask& GridEvaluator::person_free_column(const std::string& person_id) {
  if (auto it = free_cache_.find(person_id); it != free_cache_.end()) return it->second;
  if (!base_.free_busy) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation context has no free/busy view");
  }
  auto busy = base_.free_busy->busy(person_id);
  const auto& slots = grid_.slots();
  SlotMask mask(slot_count_);
  // Slots share one duration, so both starts and ends ascend and a single
  // forward pointer over the merged busy list suffices.
  std::size_t j = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    while (j < busy.size() && busy[j].end() <= slots[i].start()) ++j;
    if (j == busy.size() || !(busy[j].start() < slots[i].end())) mask.set(i);
  }
  return free_cache_.emplace(person_id, std::move(mask)).first->second;
}

const SlotMask& GridEvaluator::all_free_column() {
  if (!all_free_cache_) {
    SlotMask mask(slot_count_, true);
    for (const auto& a : base_.attendees) mask &= person_free_column(a);
    all_free_cache_ = std::move(mask);
  }
  return *all_free_cache_;
}

const std::vector<int>& GridEvaluator::gap_column(GapSide side) {
  auto& cache = side == GapSide::kBefore ? gap_before_ : gap_after_;
  if (!cache) {
    if (!base_.free_busy) {
      throw Error(ErrorCode::kInvalidArgument, "evaluation context has no free/busy view");
    }
    std::vector<int> gaps;
    gaps.reserve(slot_count_);
    for (const auto& s : grid_.slots()) {
      gaps.push_back(side == GapSide::kBefore ? base_.free_busy->gap_before(base_.organizer, s)
                                              : base_.free_busy->gap_after(base_.organizer, s));
    }
    cache = std::move(gaps);
  }
  return *cache;
}

SlotMask GridEvaluator::evaluate(const Expr& expr) {
  return std::visit(
      Overloaded{
          [&](const Compare& c) {
            const std::vector<std::int32_t>* column = nullptr;
            int div = 1, mod = 0;
            switch (c.field) {
              case Field::kStartHour: column = &start_mod_; div = 60; break;
              case Field::kStartMinute: column = &start_mod_; mod = 60; break;
              case Field::kEndHour: column = &end_mod_; div = 60; break;
              case Field::kEndMinute: column = &end_mod_; mod = 60; break;
              case Field::kStartTime: column = &start_mod_; break;
              case Field::kEndTime: column = &end_mod_; break;
              case Field::kDayIndex: column = &day_index_; break;
            }
            const auto& col = *column;
            const std::int64_t v = c.value;
            auto value_at = [&](std::size_t i) -> std::int64_t {
              std::int64_t x = col[i];
              if (mod) return x % mod;
              return x / div;
            };
            switch (c.op) {
              case RelOp::kLt: return build([&](std::size_t i) { return value_at(i) < v; });
              case RelOp::kLe: return build([&](std::size_t i) { return value_at(i) <= v; });
              case RelOp::kGt: return build([&](std::size_t i) { return value_at(i) > v; });
              case RelOp::kGe: return build([&](std::size_t i) { return value_at(i) >= v; });
              case RelOp::kEq: return build([&](std::size_t i) { return value_at(i) == v; });
              case RelOp::kNe: return build([&](std::size_t i) { return value_at(i) != v; });
            }
            return SlotMask(slot_count_);
          },
          [&](const DayIn& d) {
            return build([&](std::size_t i) { return ((d.days >> weekday_[i]) & 1u) != 0; });
          },
          [&](const Free& f) {
            auto id = base_.free_busy ? base_.free_busy->id_for_name(f.person_name)
                                      : std::nullopt;
            if (!id) {
              throw Error(ErrorCode::kUnknownPerson, "unknown person '" + f.person_name + "'");
            }
            return person_free_column(*id);
          },
          [&](const AllFree&) { return all_free_column(); },
          [&](const Gap& g) {
            const auto& gaps = gap_column(g.side);
            return build([&](std::size_t i) { return apply(g.op, gaps[i], g.minutes); });
          },
          [&](const AvoidWindow& a) {
            return build([&](std::size_t i) {
              const int s = start_mod_[i];
              const int e = end_mod_[i];
              for (int day = 0; day * kMinutesPerDay < e; ++day) {
                const int ws = day * kMinutesPerDay + a.start;
                const int we = day * kMinutesPerDay + a.end;
                if (s < we && ws < e) return false;
              }
              return true;
            });
          },
          [&](const WithinDays& w) {
            const std::int64_t limit = base_.horizon_start.minutes() +
                                       std::int64_t{w.days} * kMinutesPerDay;
            const auto& slots = grid_.slots();
            return build([&](std::size_t i) { return slots[i].start().minutes() < limit; });
          },
          [&](const OnDate& d) {
            return build([&](std::size_t i) { return day_number_[i] == d.day_number; });
          },
          [&](const Not& n) {
            SlotMask m = evaluate(n.operand);
            m.flip();
            return m;
          },
          [&](const BoolOp& b) {
            SlotMask acc = evaluate(b.operands.front());
            for (std::size_t i = 1; i < b.operands.size(); ++i) {
              if (b.kind == BoolKind::kAnd) {
                acc &= evaluate(b.operands[i]);
              } else {
                acc |= evaluate(b.operands[i]);
              }
            }
            return acc;
          },
      },
      expr.node().value);
}

}  // namespace dsl
}  // namespace meetmate
