#pragma once

// Helpers shared by the unit tests and the acceptance runner: fixture paths,
// random instance generators and brute-force oracles. The oracles work on raw
// (unmerged) busy intervals minute by minute and never call into the code
// they check.

#include "meetmate/calendar.hpp"
#include "meetmate/dsl.hpp"
#include "meetmate/io.hpp"
#include "meetmate/solver.hpp"
#include "meetmate/time.hpp"
#include "meetmate/universe_gen.hpp"

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace mmtest {

namespace mm = meetmate;

inline std::string fixture_path(const std::string& name) {
  return std::string(MEETMATE_TEST_DIR) + "/fixtures/" + name;
}
inline std::string golden_path(const std::string& name) {
  return std::string(MEETMATE_TEST_DIR) + "/golden/" + name;
}
inline std::string data_path(const std::string& name) {
  return std::string(MEETMATE_DATA_DIR) + "/" + name;
}

inline mm::Universe golden_universe() { return mm::load_universe(fixture_path("golden_universe.json")); }

inline mm::Json read_json(const std::string& path) {
  return mm::Json::parse(mm::read_text_file(path));
}

/// Compares `actual` with a golden file. MEETMATE_UPDATE_GOLDEN=1 rewrites
/// the file instead.
inline bool matches_golden(const std::string& name, const std::string& actual) {
  const auto path = golden_path(name);
  if (const char* v = std::getenv("MEETMATE_UPDATE_GOLDEN"); v && std::string(v) == "1") {
    mm::write_file_atomic(path, actual);
    return true;
  }
  if (!std::filesystem::exists(path)) return false;
  return mm::read_text_file(path) == actual;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("meetmate-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// The scripted conversation replayed by the golden tests: a hard time
/// preference, a soft attendee preference, a priority change for it, then
/// an undo. The meeting is booked from suggestion 0 afterwards.
inline const std::vector<std::string>& golden_messages() {
  static const std::vector<std::string> messages = {
      "Let's meet before 11am.",
      "If possible, Anton should join too.",
      "Anton needs to be at this meeting.",
      "Never mind.",
  };
  return messages;
}

// ---------------------------------------------------------------------------
// Random instances

inline const std::vector<std::string>& random_names() {
  static const std::vector<std::string> names = {"Ada Lovelace", "Bo Chen",     "Cleo Park",
                                                 "Dev Patel",    "Eve Moreau",  "Finn Olsen",
                                                 "Gia Rossi",    "Hal Jordan"};
  return names;
}

/// People p1..pn named from random_names(); busy intervals at minute
/// granularity inside [day0, day0 + days), overlapping and touching freely.
inline mm::Universe random_universe(mm::gen::Rng& rng, int n_people, std::int64_t day0, int days,
                                    int max_events = 12) {
  std::vector<mm::Person> people;
  std::vector<mm::BusyInterval> busy;
  for (int i = 0; i < n_people; ++i) {
    const std::string id = "p" + std::to_string(i + 1);
    people.push_back(mm::Person{id, random_names()[static_cast<std::size_t>(i)],
                                mm::Role::kMember, "team-1"});
    const auto events = rng.uniform(0, max_events);
    for (std::int64_t e = 0; e < events; ++e) {
      const auto start = day0 * mm::kMinutesPerDay +
                         rng.uniform(0, std::int64_t{days} * mm::kMinutesPerDay - 1);
      const auto len = rng.uniform(1, 240);
      busy.push_back(mm::BusyInterval{
          id, mm::TimeSlot(mm::Instant(start), mm::Instant(start + len))});
    }
  }
  return mm::Universe({"team-1"}, std::move(people), std::move(busy));
}

inline mm::TimeSlot random_slot(mm::gen::Rng& rng, std::int64_t day0, int days) {
  const auto start =
      day0 * mm::kMinutesPerDay + rng.uniform(0, std::int64_t{days} * mm::kMinutesPerDay - 1);
  return mm::TimeSlot(mm::Instant(start), mm::Instant(start + rng.uniform(1, 300)));
}

inline mm::dsl::RelOp random_op(mm::gen::Rng& rng) {
  return static_cast<mm::dsl::RelOp>(rng.uniform(0, 5));
}

/// Random atom. `names` feeds free(...); `day0` anchors on(...).
inline mm::dsl::Expr random_atom(mm::gen::Rng& rng, const std::vector<std::string>& names,
                                 std::int64_t day0) {
  namespace dsl = mm::dsl;
  switch (rng.uniform(0, 8)) {
    case 0: {
      const auto field = static_cast<dsl::Field>(rng.uniform(0, 6));
      int value = 0;
      switch (field) {
        case dsl::Field::kStartHour:
        case dsl::Field::kEndHour: value = static_cast<int>(rng.uniform(0, 24)); break;
        case dsl::Field::kStartMinute:
        case dsl::Field::kEndMinute: value = static_cast<int>(rng.uniform(0, 59)); break;
        case dsl::Field::kStartTime:
        case dsl::Field::kEndTime: value = static_cast<int>(rng.uniform(0, 1440)); break;
        case dsl::Field::kDayIndex: value = static_cast<int>(rng.uniform(0, 20)); break;
      }
      return dsl::compare(field, random_op(rng), value);
    }
    case 1: return dsl::day_in(static_cast<std::uint8_t>(rng.uniform(1, 127)));
    case 2: return dsl::person_free(names[static_cast<std::size_t>(
                rng.uniform(0, static_cast<std::int64_t>(names.size()) - 1))]);
    case 3: return dsl::all_free();
    case 4:
      return dsl::gap(rng.chance(0.5) ? dsl::GapSide::kBefore : dsl::GapSide::kAfter,
                      random_op(rng), static_cast<int>(rng.uniform(0, 600)));
    case 5: {
      const int a = static_cast<int>(rng.uniform(0, 1439));
      const int b = static_cast<int>(rng.uniform(a + 1, 1440));
      return dsl::avoid(a, b);
    }
    case 6: return dsl::within_days(static_cast<int>(rng.uniform(0, 15)));
    case 7: return dsl::on_date(day0 + rng.uniform(0, 14));
    default: return dsl::all_free();
  }
}

inline mm::dsl::Expr random_expr(mm::gen::Rng& rng, int depth,
                                 const std::vector<std::string>& names, std::int64_t day0) {
  namespace dsl = mm::dsl;
  if (depth <= 0 || rng.chance(0.35)) return random_atom(rng, names, day0);
  const auto kind = rng.uniform(0, 2);
  if (kind == 0) return dsl::negate(random_expr(rng, depth - 1, names, day0));
  std::vector<dsl::Expr> ops;
  const auto n = rng.uniform(2, 4);
  for (std::int64_t i = 0; i < n; ++i) ops.push_back(random_expr(rng, depth - 1, names, day0));
  return kind == 1 ? dsl::all_of(std::move(ops)) : dsl::any_of(std::move(ops));
}

struct SolverInstance {
  mm::TimeGrid grid;
  mm::dsl::EvalContext ctx;
  std::vector<mm::solver::PrioritizedConstraint> constraints;
};

/// Random grid of at most `max_slots` slots and up to `max_constraints`
/// random constraints whose dense ranks are shuffled against list order.
inline SolverInstance random_solver_instance(mm::gen::Rng& rng, std::size_t max_slots = 200,
                                             int max_constraints = 8) {
  constexpr std::int64_t kDay0 = 8829;
  const auto u = random_universe(rng, 4, kDay0, 3, 8);
  mm::dsl::EvalContext ctx;
  ctx.organizer = "p1";
  ctx.attendees = {"p1", "p2", "p3", "p4"};
  ctx.free_busy = std::make_shared<const mm::FreeBusyView>(u);
  ctx.horizon_start = mm::Instant(kDay0 * mm::kMinutesPerDay);
  ctx.now = ctx.horizon_start;
  ctx.duration_minutes = 15 * static_cast<int>(rng.uniform(1, 4));
  const auto start = ctx.horizon_start.plus_minutes(15 * rng.uniform(0, 96));
  const auto len = 15 * rng.uniform(ctx.duration_minutes / 15,
                                    static_cast<std::int64_t>(max_slots) - 1 + ctx.duration_minutes / 15);
  auto grid = mm::enumerate_candidates(mm::TimeSlot(start, start.plus_minutes(len)),
                                       ctx.duration_minutes);
  const int n = static_cast<int>(rng.uniform(0, max_constraints));
  std::vector<int> ranks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ranks[static_cast<std::size_t>(i)] = i;
  rng.shuffle(ranks);
  const std::vector<std::string> names(random_names().begin(), random_names().begin() + 4);
  std::vector<mm::solver::PrioritizedConstraint> cs;
  for (int i = 0; i < n; ++i) {
    auto e = random_expr(rng, 2, names, kDay0);
    auto src = mm::dsl::render(e);
    cs.push_back(mm::solver::PrioritizedConstraint{"c" + std::to_string(i + 1),
                                                   ranks[static_cast<std::size_t>(i)], src, src,
                                                   std::move(e), 0});
  }
  return SolverInstance{std::move(grid), std::move(ctx), std::move(cs)};
}

// ---------------------------------------------------------------------------
// Oracles

namespace oracle {

inline bool busy_at(const std::vector<mm::TimeSlot>& raw, std::int64_t minute) {
  for (const auto& s : raw) {
    if (s.start().minutes() <= minute && minute < s.end().minutes()) return true;
  }
  return false;
}

inline std::vector<mm::TimeSlot> raw_busy(const mm::Universe& u, const std::string& id) {
  std::vector<mm::TimeSlot> out;
  for (const auto& b : u.busy()) {
    if (b.owner == id) out.push_back(b.slot);
  }
  return out;
}

inline bool is_free(const std::vector<mm::TimeSlot>& raw, const mm::TimeSlot& slot) {
  for (auto m = slot.start().minutes(); m < slot.end().minutes(); ++m) {
    if (busy_at(raw, m)) return false;
  }
  return true;
}

/// Distance back to the nearest end of busy time on the slot's start day, or
/// to midnight.
inline int gap_before(const std::vector<mm::TimeSlot>& raw, const mm::TimeSlot& slot) {
  const auto s = slot.start().minutes();
  const auto midnight = slot.start().day_number() * mm::kMinutesPerDay;
  for (auto e = s; e > midnight; --e) {
    if (busy_at(raw, e - 1) && !busy_at(raw, e)) return static_cast<int>(s - e);
  }
  return static_cast<int>(s - midnight);
}

/// Distance forward to the nearest start of busy time on the day containing
/// the slot's last minute, or to the following midnight.
inline int gap_after(const std::vector<mm::TimeSlot>& raw, const mm::TimeSlot& slot) {
  const auto e = slot.end().minutes();
  const auto day_end = ((e - 1) / mm::kMinutesPerDay + 1) * mm::kMinutesPerDay;
  for (auto b = e; b < day_end; ++b) {
    if (busy_at(raw, b) && !busy_at(raw, b - 1)) return static_cast<int>(b - e);
  }
  return static_cast<int>(day_end - e);
}

/// True when no minute of the slot falls in [start, end) of its day.
inline bool avoid(int window_start, int window_end, const mm::TimeSlot& slot) {
  for (auto m = slot.start().minutes(); m < slot.end().minutes(); ++m) {
    const auto mod = m % mm::kMinutesPerDay;
    if (window_start <= mod && mod < window_end) return false;
  }
  return true;
}

/// Σ 2^(n-1-rank) over satisfied constraints (n <= 63), via evaluate().
inline std::uint64_t weighted_score(const mm::TimeSlot& slot,
                                    const std::vector<mm::solver::PrioritizedConstraint>& cs,
                                    mm::dsl::EvalContext ctx) {
  ctx.candidate = slot;
  std::uint64_t total = 0;
  const auto n = cs.size();
  for (const auto& c : cs) {
    if (mm::dsl::evaluate(c.expr, ctx)) {
      total += std::uint64_t{1} << (n - 1 - static_cast<std::size_t>(c.rank));
    }
  }
  return total;
}

/// Exhaustive argmax with earliest start on ties. Ranks must be dense.
inline std::size_t best_index(const mm::TimeGrid& grid,
                              const std::vector<mm::solver::PrioritizedConstraint>& cs,
                              const mm::dsl::EvalContext& ctx) {
  std::size_t best = 0;
  std::uint64_t best_score = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto s = weighted_score(grid[i], cs, ctx);
    if (i == 0 || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace oracle
}  // namespace mmtest
