#pragma once

#include "meetmate/calendar.hpp"
#include "meetmate/common.hpp"
#include "meetmate/time.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace meetmate::gen {

/// Seeded generator with platform-independent sampling. std::uniform_int_distribution
/// and std::shuffle are implementation-defined, so both are done by hand on
/// top of the (fully specified) mt19937_64 engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }
  /// Index drawn proportionally to integer weights.
  std::size_t weighted(const std::vector<int>& weights);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct GenParams {
  std::uint64_t seed = 0;
  int n_people = 32;
  int n_teams = 4;
  int horizon_days = 10;  // business days covered by calendars
  IntRange manager_meetings_per_week{25, 35};
  IntRange member_meetings_per_week{10, 20};
  std::string start_date = "2024-03-04";  // first calendar day, a Monday
};

/// Throws kInvalidParams.
void validate(const GenParams& params);
Json to_json(const GenParams& params);

/// Calendar days (midnight instants) of the generated business days.
std::vector<Instant> business_days(const GenParams& params);

/// Deterministic function of the parameters. Busy events are 30, 45 or 60
/// minutes on the 15-minute grid between 08:00 and 18:00 on weekdays, never
/// overlapping for one person.
Universe generate_universe(const GenParams& params);

struct MeetingInstance {
  std::string id;
  std::string organizer;
  std::vector<std::string> attendees;  // organizer first
  int duration_minutes = 30;
  TimeSlot horizon = TimeSlot(Instant(0), Instant(kMinutesPerDay));
  friend bool operator==(const MeetingInstance&, const MeetingInstance&) = default;
};

inline constexpr int kMinHorizonDays = 2;
inline constexpr int kMaxHorizonDays = 14;

/// n meeting requests over the universe's people. Attendee counts (organizer
/// included) range over 2..6 with mode 4; horizons start at midnight of a
/// generated business day and span 2 to 14 days.
std::vector<MeetingInstance> generate_instances(const Universe& universe, std::uint64_t seed,
                                                int n = 75);

Json to_json(const MeetingInstance& instance);
MeetingInstance instance_from_json(const Json& doc);
Json instances_to_json(const std::vector<MeetingInstance>& instances, std::uint64_t seed);
std::vector<MeetingInstance> instances_from_json(const Json& doc);
std::vector<MeetingInstance> load_instances(const std::string& path);
void save_instances(const std::vector<MeetingInstance>& instances, std::uint64_t seed,
                    const std::string& path);

}  // namespace meetmate::gen
