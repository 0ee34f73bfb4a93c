#pragma once

#include <bitset>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace meetmate {

inline constexpr int kMinutesPerDay = 24 * 60;
inline constexpr int kSlotStepMinutes = 15;

enum class Weekday : std::uint8_t { kMon = 0, kTue, kWed, kThu, kFri, kSat, kSun };

std::string_view weekday_abbrev(Weekday day);  // "MON".."SUN"
std::string_view weekday_name(Weekday day);    // "Monday".."Sunday"

/// A point in local time at minute granularity, counted from the fixed
/// reference epoch 2000-01-01T00:00. Never negative.
class Instant {
 public:
  constexpr Instant() = default;
  explicit Instant(std::int64_t minutes_since_epoch);

  static Instant from_civil(int year, unsigned month, unsigned day,
                            int hour = 0, int minute = 0);
  /// Accepts "YYYY-MM-DDTHH:MM" with an optional ":00" seconds suffix.
  static Instant parse_iso(std::string_view text);
  /// Accepts "YYYY-MM-DD"; returns midnight of that date.
  static Instant parse_date(std::string_view text);

  std::string to_iso() const;
  std::string date_string() const;

  constexpr std::int64_t minutes() const { return minutes_; }
  constexpr std::int64_t day_number() const { return minutes_ / kMinutesPerDay; }
  constexpr int minute_of_day() const {
    return static_cast<int>(minutes_ % kMinutesPerDay);
  }
  constexpr int hour() const { return minute_of_day() / 60; }
  constexpr int minute() const { return minute_of_day() % 60; }
  Weekday weekday() const;
  Instant start_of_day() const { return Instant(day_number() * kMinutesPerDay); }

  Instant plus_minutes(std::int64_t delta) const { return Instant(minutes_ + delta); }
  Instant plus_days(std::int64_t days) const {
    return plus_minutes(days * kMinutesPerDay);
  }

  friend constexpr auto operator<=>(const Instant&, const Instant&) = default;

 private:
  std::int64_t minutes_ = 0;
};

/// Weekday of an epoch day number (day 0 is a Saturday).
Weekday weekday_of_day(std::int64_t day_number);

/// Half-open interval [start, end) with end > start.
class TimeSlot {
 public:
  TimeSlot(Instant start, Instant end);
  static TimeSlot starting_at(Instant start, int duration_minutes);

  Instant start() const { return start_; }
  Instant end() const { return end_; }
  std::int64_t duration_minutes() const { return end_.minutes() - start_.minutes(); }

  /// Open-interval overlap: slots that only touch do not overlap.
  bool overlaps(const TimeSlot& other) const {
    return start_ < other.end_ && other.start_ < end_;
  }
  bool contains(const TimeSlot& other) const {
    return start_ <= other.start_ && other.end_ <= end_;
  }

  friend bool operator==(const TimeSlot&, const TimeSlot&) = default;

 private:
  Instant start_;
  Instant end_;
};

/// Restricts candidates to a daily window on selected weekdays. The slot must
/// start on an allowed weekday and lie within [start_minute, end_minute] of
/// its start day.
struct DailyWindow {
  int start_minute = 0;
  int end_minute = kMinutesPerDay;
  std::bitset<7> weekdays = 0x7f;  // bit 0 = Monday

  static DailyWindow all_day();
  static DailyWindow business_hours();  // 08:00-18:00, Monday to Friday
  static DailyWindow weekdays_all_day();

  bool admits(const TimeSlot& slot) const;
};

/// The candidate set for one meeting: equal-duration slots, strictly
/// ascending by start, all inside the horizon.
class TimeGrid {
 public:
  TimeGrid(TimeSlot horizon, int duration_minutes, std::vector<TimeSlot> slots);

  const std::vector<TimeSlot>& slots() const { return slots_; }
  const TimeSlot& horizon() const { return horizon_; }
  int duration_minutes() const { return duration_minutes_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  const TimeSlot& operator[](std::size_t i) const { return slots_[i]; }

 private:
  TimeSlot horizon_;
  int duration_minutes_;
  std::vector<TimeSlot> slots_;
};

/// Every slot of `duration_minutes` that starts on a 15-minute boundary and
/// fits inside `horizon`. Throws kInvalidDuration unless the duration is a
/// positive multiple of 15.
TimeGrid enumerate_candidates(const TimeSlot& horizon, int duration_minutes);
TimeGrid enumerate_candidates(const TimeSlot& horizon, int duration_minutes,
                              const DailyWindow& window);

/// ln(|a.start - b.start| + 1), in minutes.
double distance(const TimeSlot& a, const TimeSlot& b);

}  // namespace meetmate
