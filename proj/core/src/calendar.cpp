#include "meetmate/calendar.hpp"

#include "meetmate/io.hpp"

#include <algorithm>
#include <set>

namespace meetmate {
namespace {

std::vector<TimeSlot> merge_sorted(std::vector<TimeSlot> slots) {
  std::sort(slots.begin(), slots.end(), [](const TimeSlot& a, const TimeSlot& b) {
    return a.start() < b.start() || (a.start() == b.start() && a.end() < b.end());
  });
  std::vector<TimeSlot> merged;
  for (const auto& s : slots) {
    if (!merged.empty() && s.start() <= merged.back().end()) {
      if (s.end() > merged.back().end()) {
        merged.back() = TimeSlot(merged.back().start(), s.end());
      }
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

}  // namespace

std::string_view to_string(Role role) {
  return role == Role::kManager ? "manager" : "member";
}

Role role_from_string(std::string_view text) {
  if (text == "manager") return Role::kManager;
  if (text == "member") return Role::kMember;
  throw Error(ErrorCode::kInvalidArgument, "unknown role '" + std::string(text) + "'");
}

std::string Person::first_name() const {
  auto pos = name.find(' ');
  return pos == std::string::npos ? name : name.substr(0, pos);
}

Universe::Universe(std::vector<std::string> teams, std::vector<Person> people,
                   std::vector<BusyInterval> busy, Provenance provenance)
    : teams_(std::move(teams)),
      people_(std::move(people)),
      busy_(std::move(busy)),
      provenance_(std::move(provenance)) {
  std::set<std::string, std::less<>> team_set(teams_.begin(), teams_.end());
  if (team_set.size() != teams_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate team id");
  }
  for (std::size_t i = 0; i < people_.size(); ++i) {
    const auto& p = people_[i];
    if (!by_id_.emplace(p.id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate person id '" + p.id + "'");
    }
    if (!by_name_.emplace(p.name, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate person name '" + p.name + "'");
    }
    if (!team_set.contains(p.team_id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "person '" + p.id + "' references unknown team '" + p.team_id + "'");
    }
  }
  for (const auto& b : busy_) {
    if (!by_id_.contains(b.owner)) {
      throw Error(ErrorCode::kUnknownPerson,
                  "busy interval owner '" + b.owner + "' is not a person");
    }
  }
}

const Person* Universe::find_by_id(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &people_[it->second];
}

const Person* Universe::find_by_name(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &people_[it->second];
}

const Person& Universe::person(std::string_view id) const {
  if (const auto* p = find_by_id(id)) return *p;
  throw Error(ErrorCode::kUnknownPerson, "unknown person '" + std::string(id) + "'");
}

FreeBusyView::FreeBusyView(const Universe& universe) {
  std::vector<std::vector<TimeSlot>> raw(universe.people().size());
  for (std::size_t i = 0; i < universe.people().size(); ++i) {
    const auto& p = universe.people()[i];
    ids_.push_back(p.id);
    names_.push_back(p.name);
    index_.emplace(p.id, i);
    name_index_.emplace(p.name, i);
  }
  for (const auto& b : universe.busy()) raw[index_.at(b.owner)].push_back(b.slot);
  merged_.reserve(raw.size());
  for (auto& r : raw) merged_.push_back(merge_sorted(std::move(r)));
}

std::size_t FreeBusyView::index_of(std::string_view person) const {
  auto it = index_.find(std::string(person));
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownPerson, "unknown person '" + std::string(person) + "'");
  }
  return it->second;
}

bool FreeBusyView::has_person(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::optional<std::string> FreeBusyView::id_for_name(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return ids_[it->second];
}

const std::string& FreeBusyView::name_of(std::string_view id) const {
  return names_[index_of(id)];
}

std::span<const TimeSlot> FreeBusyView::busy(std::string_view person) const {
  return merged_[index_of(person)];
}

std::vector<TimeSlot> FreeBusyView::busy_between(std::string_view person, Instant from,
                                                 Instant to) const {
  std::vector<TimeSlot> out;
  for (const auto& s : busy(person)) {
    if (s.start() < to && from < s.end()) out.push_back(s);
  }
  return out;
}

bool FreeBusyView::is_free(std::string_view person, const TimeSlot& slot) const {
  auto intervals = busy(person);
  // First interval ending after slot.start is the only overlap candidate.
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), slot.start(),
      [](Instant t, const TimeSlot& s) { return t < s.end(); });
  return it == intervals.end() || !it->overlaps(slot);
}

int FreeBusyView::free_count(std::span<const std::string> attendees,
                             const TimeSlot& slot) const {
  int n = 0;
  for (const auto& a : attendees) n += is_free(a, slot) ? 1 : 0;
  return n;
}

int FreeBusyView::gap_before(std::string_view person, const TimeSlot& slot) const {
  auto intervals = busy(person);
  const Instant start = slot.start();
  // Last interval with end <= start.
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), start,
      [](Instant t, const TimeSlot& s) { return t < s.end(); });
  if (it != intervals.begin()) {
    const auto& prev = *std::prev(it);
    if (prev.end().day_number() == start.day_number()) {
      return static_cast<int>(start.minutes() - prev.end().minutes());
    }
  }
  return start.minute_of_day();
}

int FreeBusyView::gap_after(std::string_view person, const TimeSlot& slot) const {
  auto intervals = busy(person);
  const Instant end = slot.end();
  const std::int64_t day = (end.minutes() - 1) / kMinutesPerDay;
  const std::int64_t day_end = (day + 1) * kMinutesPerDay;
  auto it = std::lower_bound(
      intervals.begin(), intervals.end(), end,
      [](const TimeSlot& s, Instant t) { return s.start() < t; });
  if (it != intervals.end() && it->start().minutes() < day_end) {
    return static_cast<int>(it->start().minutes() - end.minutes());
  }
  return static_cast<int>(day_end - end.minutes());
}

Universe commit_meeting(const Universe& universe, std::span<const std::string> attendees,
                        const TimeSlot& slot) {
  for (const auto& a : attendees) universe.person(a);
  auto busy = universe.busy();
  for (const auto& a : attendees) {
    BusyInterval interval{a, slot};
    if (std::find(busy.begin(), busy.end(), interval) == busy.end()) {
      busy.push_back(std::move(interval));
    }
  }
  return Universe(universe.teams(), universe.people(), std::move(busy),
                  universe.provenance());
}

Json to_json(const Universe& universe) {
  Json doc;
  doc["seed"] = universe.provenance().seed;
  doc["params"] = universe.provenance().params;
  doc["teams"] = universe.teams();
  Json people = Json::array();
  for (const auto& p : universe.people()) {
    people.push_back(Json{{"id", p.id},
                          {"name", p.name},
                          {"role", to_string(p.role)},
                          {"team_id", p.team_id}});
  }
  doc["people"] = std::move(people);
  Json busy = Json::array();
  for (const auto& b : universe.busy()) {
    busy.push_back(Json{{"owner", b.owner},
                        {"start", b.slot.start().to_iso()},
                        {"end", b.slot.end().to_iso()}});
  }
  doc["busy"] = std::move(busy);
  return doc;
}

Universe universe_from_json(const Json& doc) {
  try {
    Provenance prov;
    prov.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("params")) prov.params = doc.at("params");
    std::vector<std::string> teams = doc.at("teams").get<std::vector<std::string>>();
    std::vector<Person> people;
    for (const auto& p : doc.at("people")) {
      people.push_back(Person{p.at("id").get<std::string>(), p.at("name").get<std::string>(),
                              role_from_string(p.at("role").get<std::string>()),
                              p.at("team_id").get<std::string>()});
    }
    std::vector<BusyInterval> busy;
    for (const auto& b : doc.at("busy")) {
      busy.push_back(BusyInterval{
          b.at("owner").get<std::string>(),
          TimeSlot(Instant::parse_iso(b.at("start").get<std::string>()),
                   Instant::parse_iso(b.at("end").get<std::string>()))});
    }
    return Universe(std::move(teams), std::move(people), std::move(busy), std::move(prov));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed universe: ") + e.what());
  }
}

Universe load_universe(const std::string& path) {
  try {
    return universe_from_json(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

void save_universe(const Universe& universe, const std::string& path) {
  write_file_atomic(path, to_json(universe).dump(2) + "\n");
}

}  // namespace meetmate
