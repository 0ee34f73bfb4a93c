#include "meetmate/time.hpp"

#include "meetmate/common.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace meetmate {
namespace {

constexpr std::array<std::string_view, 7> kAbbrev = {"MON", "TUE", "WED", "THU",
                                                     "FRI", "SAT", "SUN"};
constexpr std::array<std::string_view, 7> kNames = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

const std::chrono::sys_days kEpoch =
    std::chrono::sys_days{std::chrono::year{2000} / std::chrono::January / 1};

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  auto sub = text.substr(pos, len);
  for (char c : sub) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), out);
  return ec == std::errc{} && ptr == sub.data() + sub.size();
}

Instant parse_date_prefix(std::string_view text, std::string_view original) {
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-' || !read_int(text, 0, 4, y) ||
      !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid date '" + std::string(original) + "'");
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid date '" + std::string(original) + "'");
  }
  return Instant::from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

}  // namespace

std::string_view weekday_abbrev(Weekday day) { return kAbbrev[static_cast<int>(day)]; }
std::string_view weekday_name(Weekday day) { return kNames[static_cast<int>(day)]; }

Weekday weekday_of_day(std::int64_t day_number) {
  return static_cast<Weekday>((day_number + 5) % 7);
}

Instant::Instant(std::int64_t minutes_since_epoch) : minutes_(minutes_since_epoch) {
  if (minutes_ < 0) {
    throw Error(ErrorCode::kInvalidArgument, "instant before the reference epoch");
  }
}

Instant Instant::from_civil(int year, unsigned month, unsigned day, int hour,
                            int minute) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59) {
    throw Error(ErrorCode::kInvalidArgument, "invalid civil date/time");
  }
  auto days = (std::chrono::sys_days{ymd} - kEpoch).count();
  return Instant(static_cast<std::int64_t>(days) * kMinutesPerDay + hour * 60 + minute);
}

Instant Instant::parse_iso(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::kInvalidArgument,
                 "invalid datetime '" + std::string(text) + "' (want YYYY-MM-DDTHH:MM)");
  };
  if (text.size() != 16 && !(text.size() == 19 && text.substr(16) == ":00")) throw fail();
  if (text[10] != 'T' || text[13] != ':') throw fail();
  int hh = 0, mm = 0;
  if (!read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm) || hh > 23 || mm > 59) {
    throw fail();
  }
  Instant day = parse_date_prefix(text.substr(0, 10), text);
  return day.plus_minutes(hh * 60 + mm);
}

Instant Instant::parse_date(std::string_view text) {
  if (text.size() != 10) {
    throw Error(ErrorCode::kInvalidArgument, "invalid date '" + std::string(text) + "'");
  }
  return parse_date_prefix(text, text);
}

std::string Instant::date_string() const {
  std::chrono::year_month_day ymd{kEpoch + std::chrono::days{day_number()}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string Instant::to_iso() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d", hour(), minute());
  return date_string() + buf;
}

Weekday Instant::weekday() const { return weekday_of_day(day_number()); }

TimeSlot::TimeSlot(Instant start, Instant end) : start_(start), end_(end) {
  if (!(end_ > start_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "time slot must end after it starts (" + start.to_iso() + " .. " +
                    end.to_iso() + ")");
  }
}

TimeSlot TimeSlot::starting_at(Instant start, int duration_minutes) {
  return TimeSlot(start, start.plus_minutes(duration_minutes));
}

DailyWindow DailyWindow::all_day() { return DailyWindow{}; }

DailyWindow DailyWindow::business_hours() {
  return DailyWindow{8 * 60, 18 * 60, std::bitset<7>(0x1f)};
}

DailyWindow DailyWindow::weekdays_all_day() {
  return DailyWindow{0, kMinutesPerDay, std::bitset<7>(0x1f)};
}

bool DailyWindow::admits(const TimeSlot& slot) const {
  if (!weekdays.test(static_cast<std::size_t>(slot.start().weekday()))) return false;
  auto day_start = slot.start().start_of_day().minutes();
  return slot.start().minutes() >= day_start + start_minute &&
         slot.end().minutes() <= day_start + end_minute;
}

TimeGrid::TimeGrid(TimeSlot horizon, int duration_minutes, std::vector<TimeSlot> slots)
    : horizon_(horizon), duration_minutes_(duration_minutes), slots_(std::move(slots)) {
  if (duration_minutes_ <= 0) {
    throw Error(ErrorCode::kInvalidDuration, "grid duration must be positive");
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& s = slots_[i];
    if (s.duration_minutes() != duration_minutes_ || !horizon_.contains(s) ||
        (i > 0 && !(slots_[i - 1].start() < s.start()))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "grid slot " + s.start().to_iso() + " violates grid invariants");
    }
  }
}

TimeGrid enumerate_candidates(const TimeSlot& horizon, int duration_minutes) {
  return enumerate_candidates(horizon, duration_minutes, DailyWindow::all_day());
}

TimeGrid enumerate_candidates(const TimeSlot& horizon, int duration_minutes,
                              const DailyWindow& window) {
  if (duration_minutes <= 0 || duration_minutes % kSlotStepMinutes != 0) {
    throw Error(ErrorCode::kInvalidDuration,
                "duration must be a positive multiple of 15 minutes, got " +
                    std::to_string(duration_minutes));
  }
  std::vector<TimeSlot> slots;
  std::int64_t first = horizon.start().minutes();
  if (auto rem = first % kSlotStepMinutes; rem != 0) first += kSlotStepMinutes - rem;
  const std::int64_t last_start = horizon.end().minutes() - duration_minutes;
  for (std::int64_t m = first; m <= last_start; m += kSlotStepMinutes) {
    TimeSlot slot = TimeSlot::starting_at(Instant(m), duration_minutes);
    if (window.admits(slot)) slots.push_back(slot);
  }
  return TimeGrid(horizon, duration_minutes, std::move(slots));
}

double distance(const TimeSlot& a, const TimeSlot& b) {
  auto delta = std::llabs(a.start().minutes() - b.start().minutes());
  return std::log(static_cast<double>(delta) + 1.0);
}

}  // namespace meetmate
