#include "meetmate/universe_gen.hpp"

#include "meetmate/io.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>

namespace meetmate::gen {
namespace {

constexpr std::array<const char*, 64> kFirstNames = {
    "Anton",   "Desiree", "Collin",  "Lauren",  "Mira",    "Tobias",  "Keiko",   "Ravi",
    "Helena",  "Marcus",  "Ines",    "Dmitri",  "Priya",   "Oscar",   "Leona",   "Felix",
    "Amara",   "Jonas",   "Sofia",   "Malik",   "Yara",    "Gavin",   "Noor",    "Elias",
    "Camila",  "Victor",  "Hannah",  "Idris",   "Greta",   "Rafael",  "Tessa",   "Kofi",
    "Lucia",   "Henrik",  "Aisha",   "Bruno",   "Esther",  "Tomas",   "Nadia",   "Julian",
    "Rosa",    "Emeka",   "Vera",    "Quentin", "Selma",   "Dario",   "Maren",   "Akira",
    "Beatriz", "Cyrus",   "Dalia",   "Edgar",   "Fiona",   "Hugo",    "Ilse",    "Jasper",
    "Kira",    "Lionel",  "Magda",   "Nikolai", "Olga",    "Pavel",   "Renata",  "Stellan"};

constexpr std::array<const char*, 32> kLastNames = {
    "Novak",   "Cain",     "Lopez",   "Sanchez", "Okafor",  "Lindqvist", "Tanaka",  "Mehta",
    "Brandt",  "Oliveira", "Haddad",  "Kowalski", "Nguyen", "Fischer",   "Moreau",  "Adeyemi",
    "Castro",  "Holm",     "Ivanova", "Rahman",  "Bianchi", "Svensson",  "Kimura",  "Duarte",
    "Petrov",  "Walsh",    "Mensah",  "Keller",  "Romero",  "Sato",      "Varga",   "Yilmaz"};

constexpr int kDayStart = 8 * 60;
constexpr int kDayEnd = 18 * 60;
constexpr std::array<int, 3> kEventLengths = {30, 45, 60};

struct Placed {
  std::int64_t start;
  std::int64_t end;
};

bool clashes(const std::vector<Placed>& events, std::int64_t start, std::int64_t end) {
  return std::any_of(events.begin(), events.end(),
                     [&](const Placed& e) { return start < e.end && e.start < end; });
}

// Places one event on one of `days`, at random if possible and otherwise at
// the first free position (a 30-minute gap always exists at the configured
// loads, see generate_universe).
void place_event(Rng& rng, const std::vector<Instant>& days, std::vector<Placed>& events) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Instant day = days[static_cast<std::size_t>(
        rng.uniform(0, static_cast<std::int64_t>(days.size()) - 1))];
    const int len = kEventLengths[static_cast<std::size_t>(rng.uniform(0, 2))];
    const int slots = (kDayEnd - kDayStart - len) / kSlotStepMinutes;
    const std::int64_t start =
        day.minutes() + kDayStart + rng.uniform(0, slots) * kSlotStepMinutes;
    if (!clashes(events, start, start + len)) {
      events.push_back({start, start + len});
      return;
    }
  }
  for (const auto& day : days) {
    for (int m = kDayStart; m + 30 <= kDayEnd; m += kSlotStepMinutes) {
      const std::int64_t start = day.minutes() + m;
      if (!clashes(events, start, start + 30)) {
        events.push_back({start, start + 30});
        return;
      }
    }
  }
  throw Error(ErrorCode::kInvalidParams, "meeting load does not fit into business hours");
}

GenParams params_from_provenance(const Universe& universe) {
  GenParams p;
  const auto& doc = universe.provenance().params;
  p.seed = universe.provenance().seed;
  if (doc.is_object()) {
    p.horizon_days = doc.value("horizon_days", p.horizon_days);
    p.start_date = doc.value("start_date", p.start_date);
  }
  return p;
}

}  // namespace

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::kInvalidArgument, "empty sampling range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % range + 1) % range;
  std::uint64_t draw = next();
  while (draw > limit) draw = next();
  return lo + static_cast<std::int64_t>(draw % range);
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::weighted(const std::vector<int>& weights) {
  std::int64_t total = 0;
  for (int w : weights) total += w;
  std::int64_t draw = uniform(0, total - 1);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (draw < weights[i]) return i;
    draw -= weights[i];
  }
  return weights.size() - 1;
}

void validate(const GenParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidParams, msg); };
  if (p.n_people <= 0 || p.n_teams <= 0) fail("people and team counts must be positive");
  if (p.n_people % p.n_teams != 0) fail("n_people must be divisible by n_teams");
  if (p.n_people > static_cast<int>(kFirstNames.size())) {
    fail("at most " + std::to_string(kFirstNames.size()) + " people are supported");
  }
  if (p.horizon_days <= 0) fail("horizon_days must be positive");
  for (const auto* r : {&p.manager_meetings_per_week, &p.member_meetings_per_week}) {
    if (r->lo < 0 || r->hi < r->lo) fail("meeting ranges must be non-empty and non-negative");
    if (r->hi > 35) fail("at most 35 meetings per week fit into business hours");
  }
  try {
    const Instant start = Instant::parse_date(p.start_date);
    if (start.weekday() != Weekday::kMon) fail("start_date must be a Monday");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidParams) throw;
    fail("start_date: " + std::string(e.what()));
  }
}

Json to_json(const GenParams& p) {
  return Json{{"n_people", p.n_people},
              {"n_teams", p.n_teams},
              {"horizon_days", p.horizon_days},
              {"manager_meetings_per_week",
               Json::array({p.manager_meetings_per_week.lo, p.manager_meetings_per_week.hi})},
              {"member_meetings_per_week",
               Json::array({p.member_meetings_per_week.lo, p.member_meetings_per_week.hi})},
              {"start_date", p.start_date}};
}

std::vector<Instant> business_days(const GenParams& params) {
  std::vector<Instant> days;
  Instant day = Instant::parse_date(params.start_date);
  while (static_cast<int>(days.size()) < params.horizon_days) {
    if (day.weekday() < Weekday::kSat) days.push_back(day);
    day = day.plus_days(1);
  }
  return days;
}

Universe generate_universe(const GenParams& params) {
  validate(params);
  Rng rng(params.seed);

  std::vector<std::string> firsts(kFirstNames.begin(), kFirstNames.end());
  rng.shuffle(firsts);

  std::vector<std::string> teams;
  std::vector<Person> people;
  const int team_size = params.n_people / params.n_teams;
  for (int t = 0; t < params.n_teams; ++t) teams.push_back("team-" + std::to_string(t + 1));
  for (int i = 0; i < params.n_people; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%02d", i + 1);
    const auto last = kLastNames[static_cast<std::size_t>(
        rng.uniform(0, static_cast<std::int64_t>(kLastNames.size()) - 1))];
    people.push_back(Person{id, firsts[static_cast<std::size_t>(i)] + " " + last,
                            i % team_size == 0 ? Role::kManager : Role::kMember,
                            teams[static_cast<std::size_t>(i / team_size)]});
  }

  // Group business days by calendar week.
  std::map<std::int64_t, std::vector<Instant>> weeks;
  for (const auto& day : business_days(params)) {
    const auto monday = day.day_number() - static_cast<int>(day.weekday());
    weeks[monday].push_back(day);
  }

  std::vector<BusyInterval> busy;
  for (const auto& person : people) {
    const IntRange range = person.role == Role::kManager ? params.manager_meetings_per_week
                                                         : params.member_meetings_per_week;
    std::vector<Placed> events;
    for (const auto& [monday, days] : weeks) {
      (void)monday;
      std::int64_t count = rng.uniform(range.lo, range.hi);
      // Partial weeks get a proportional share of the weekly load.
      count = (count * static_cast<std::int64_t>(days.size()) + 2) / 5;
      for (std::int64_t e = 0; e < count; ++e) place_event(rng, days, events);
    }
    std::sort(events.begin(), events.end(),
              [](const Placed& a, const Placed& b) { return a.start < b.start; });
    for (const auto& e : events) {
      busy.push_back(BusyInterval{person.id, TimeSlot(Instant(e.start), Instant(e.end))});
    }
  }

  return Universe(std::move(teams), std::move(people), std::move(busy),
                  Provenance{params.seed, to_json(params)});
}

std::vector<MeetingInstance> generate_instances(const Universe& universe, std::uint64_t seed,
                                                int n) {
  const auto& people = universe.people();
  if (people.size() < 2) {
    throw Error(ErrorCode::kInvalidParams, "instances need a universe with at least two people");
  }
  if (n < 0) throw Error(ErrorCode::kInvalidParams, "instance count must be non-negative");
  const auto days = business_days(params_from_provenance(universe));
  Rng rng(seed);
  const std::vector<int> size_weights = {1, 2, 3, 2, 1};  // 2..6 attendees

  std::vector<MeetingInstance> out;
  for (int i = 0; i < n; ++i) {
    MeetingInstance inst;
    char id[16];
    std::snprintf(id, sizeof id, "m%03d", i + 1);
    inst.id = id;
    const auto& organizer = people[static_cast<std::size_t>(
        rng.uniform(0, static_cast<std::int64_t>(people.size()) - 1))];
    inst.organizer = organizer.id;
    inst.attendees.push_back(organizer.id);

    const std::size_t wanted =
        std::min<std::size_t>(2 + rng.weighted(size_weights), people.size());
    std::vector<std::string> teammates;
    std::vector<std::string> others;
    for (const auto& p : people) {
      if (p.id == organizer.id) continue;
      (p.team_id == organizer.team_id ? teammates : others).push_back(p.id);
    }
    rng.shuffle(teammates);
    rng.shuffle(others);
    while (inst.attendees.size() < wanted) {
      // Meetings lean toward the organizer's own team.
      auto& pool = (!teammates.empty() && (others.empty() || rng.chance(0.6))) ? teammates : others;
      inst.attendees.push_back(pool.back());
      pool.pop_back();
    }

    inst.duration_minutes = rng.chance(0.5) ? 30 : 60;
    const auto start = days[static_cast<std::size_t>(
        rng.uniform(0, static_cast<std::int64_t>(days.size()) - 1))];
    const auto span = rng.uniform(kMinHorizonDays, kMaxHorizonDays);
    inst.horizon = TimeSlot(start, start.plus_days(span));
    out.push_back(std::move(inst));
  }
  return out;
}

Json to_json(const MeetingInstance& inst) {
  return Json{{"id", inst.id},
              {"organizer", inst.organizer},
              {"attendees", inst.attendees},
              {"duration_minutes", inst.duration_minutes},
              {"horizon_start", inst.horizon.start().to_iso()},
              {"horizon_end", inst.horizon.end().to_iso()}};
}

MeetingInstance instance_from_json(const Json& doc) {
  MeetingInstance inst;
  inst.id = doc.at("id").get<std::string>();
  inst.organizer = doc.at("organizer").get<std::string>();
  inst.attendees = doc.at("attendees").get<std::vector<std::string>>();
  inst.duration_minutes = doc.at("duration_minutes").get<int>();
  inst.horizon = TimeSlot(Instant::parse_iso(doc.at("horizon_start").get<std::string>()),
                          Instant::parse_iso(doc.at("horizon_end").get<std::string>()));
  return inst;
}

Json instances_to_json(const std::vector<MeetingInstance>& instances, std::uint64_t seed) {
  Json list = Json::array();
  for (const auto& inst : instances) list.push_back(to_json(inst));
  return Json{{"seed", seed}, {"instances", list}};
}

std::vector<MeetingInstance> instances_from_json(const Json& doc) {
  try {
    std::vector<MeetingInstance> out;
    for (const auto& item : doc.at("instances")) out.push_back(instance_from_json(item));
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed instances: ") + e.what());
  }
}

std::vector<MeetingInstance> load_instances(const std::string& path) {
  try {
    return instances_from_json(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

void save_instances(const std::vector<MeetingInstance>& instances, std::uint64_t seed,
                    const std::string& path) {
  write_file_atomic(path, instances_to_json(instances, seed).dump(2) + "\n");
}

}  // namespace meetmate::gen
