#pragma once

#include "meetmate/common.hpp"
#include "meetmate/time.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace meetmate {

enum class Role { kManager, kMember };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct Person {
  std::string id;
  std::string name;
  Role role = Role::kMember;
  std::string team_id;

  /// First whitespace-delimited token of the display name.
  std::string first_name() const;

  friend bool operator==(const Person&, const Person&) = default;
};

struct BusyInterval {
  std::string owner;
  TimeSlot slot;

  friend bool operator==(const BusyInterval&, const BusyInterval&) = default;
};

/// Seed and generator parameters the universe was produced from. Hand-built
/// universes carry seed 0 and an empty parameter object.
struct Provenance {
  std::uint64_t seed = 0;
  Json params = Json::object();
};

/// Immutable snapshot of an organization: people, teams and busy intervals.
class Universe {
 public:
  Universe(std::vector<std::string> teams, std::vector<Person> people,
           std::vector<BusyInterval> busy, Provenance provenance = {});

  const std::vector<std::string>& teams() const { return teams_; }
  const std::vector<Person>& people() const { return people_; }
  const std::vector<BusyInterval>& busy() const { return busy_; }
  const Provenance& provenance() const { return provenance_; }

  const Person* find_by_id(std::string_view id) const;
  const Person* find_by_name(std::string_view name) const;
  /// Throws kUnknownPerson.
  const Person& person(std::string_view id) const;

 private:
  std::vector<std::string> teams_;
  std::vector<Person> people_;
  std::vector<BusyInterval> busy_;
  Provenance provenance_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Free/busy projection of a universe. Only merged busy intervals and the
/// public directory (ids and names) are reachable through it.
class FreeBusyView {
 public:
  explicit FreeBusyView(const Universe& universe);

  bool has_person(std::string_view id) const;
  std::optional<std::string> id_for_name(std::string_view name) const;
  /// Throws kUnknownPerson.
  const std::string& name_of(std::string_view id) const;
  const std::vector<std::string>& person_ids() const { return ids_; }

  /// Busy intervals of the person, merged and sorted. Throws kUnknownPerson.
  std::span<const TimeSlot> busy(std::string_view person) const;
  /// Merged busy intervals overlapping [from, to).
  std::vector<TimeSlot> busy_between(std::string_view person, Instant from,
                                     Instant to) const;

  bool is_free(std::string_view person, const TimeSlot& slot) const;
  int free_count(std::span<const std::string> attendees, const TimeSlot& slot) const;

  /// Minutes from the end of the person's latest busy interval that ends at
  /// or before slot.start on the same day; minutes since midnight otherwise.
  int gap_before(std::string_view person, const TimeSlot& slot) const;
  /// Minutes from slot.end to the next busy interval starting on the same day;
  /// minutes to the end of that day otherwise.
  int gap_after(std::string_view person, const TimeSlot& slot) const;

 private:
  std::size_t index_of(std::string_view person) const;

  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<TimeSlot>> merged_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> name_index_;
};

/// Returns a new snapshot with one busy interval per attendee for `slot`.
/// Attendees who already hold exactly that interval are left unchanged.
Universe commit_meeting(const Universe& universe, std::span<const std::string> attendees,
                        const TimeSlot& slot);

Json to_json(const Universe& universe);
Universe universe_from_json(const Json& doc);

Universe load_universe(const std::string& path);
void save_universe(const Universe& universe, const std::string& path);

}  // namespace meetmate
