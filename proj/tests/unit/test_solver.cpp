#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace meetmate;
namespace dsl = meetmate::dsl;
namespace solver = meetmate::solver;

namespace {

constexpr std::int64_t kDay0 = 8829;

solver::PrioritizedConstraint constraint(const std::string& id, const std::string& src, int rank) {
  return solver::make_constraint(id, id + " text", src, rank);
}

TimeGrid grid_at_offsets(const std::vector<int>& offsets, int duration = 15) {
  const auto base = Instant(kDay0 * kMinutesPerDay);
  std::vector<TimeSlot> slots;
  for (int o : offsets) slots.push_back(TimeSlot::starting_at(base.plus_minutes(o), duration));
  return TimeGrid(TimeSlot(base, base.plus_days(3)), duration, slots);
}

std::vector<Score> scores_of(const std::vector<std::uint64_t>& v) {
  std::vector<Score> out;
  for (auto x : v) out.push_back(Score::from_u64(x));
  return out;
}

dsl::EvalContext golden_context() {
  static const auto u = mmtest::golden_universe();
  dsl::EvalContext ctx;
  ctx.organizer = "p01";
  ctx.attendees = {"p01", "p02", "p03", "p04"};
  ctx.duration_minutes = 30;
  ctx.free_busy = std::make_shared<const FreeBusyView>(u);
  ctx.horizon_start = Instant::parse_iso("2024-03-04T00:00");
  ctx.now = ctx.horizon_start;
  return ctx;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("best_time matches the exhaustive oracle") {
    mmtest::mm::gen::Rng rng(17);
    for (int i = 0; i < 300; ++i) {
      auto inst = mmtest::random_solver_instance(rng);
      const auto got = solver::best_time(inst.grid, inst.constraints, inst.ctx);
      const auto want = mmtest::oracle::best_index(inst.grid, inst.constraints, inst.ctx);
      CAPTURE(i);
      CHECK(got.slot == inst.grid[want]);
      CHECK(got.score.to_u64() == mmtest::oracle::weighted_score(got.slot, inst.constraints, inst.ctx));
    }
  }

  TEST_CASE("ties resolve to the earliest slot") {
    const auto grid = grid_at_offsets({600, 615, 630, 645});
    auto ctx = golden_context();
    std::vector<solver::PrioritizedConstraint> cs{constraint("c1", "start.time >= 10:15", 0)};
    CHECK(solver::best_time(grid, cs, ctx).slot == grid[1]);
    CHECK(solver::best_time(grid, {}, ctx).slot == grid[0]);
  }

  TEST_CASE("empty grid and bad ranks are rejected") {
    auto ctx = golden_context();
    const auto base = Instant(kDay0 * kMinutesPerDay);
    TimeGrid empty(TimeSlot(base, base.plus_days(1)), 30, {});
    try {
      solver::best_time(empty, {}, ctx);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptyGrid);
    }
    std::vector<solver::PrioritizedConstraint> gappy{constraint("c1", "all_free", 0),
                                                    constraint("c2", "all_free", 2)};
    CHECK_THROWS_AS(solver::best_time(grid_at_offsets({600}), gappy, ctx), Error);
  }

  TEST_CASE("assign_weights renumbers stably and uses powers of two") {
    std::vector<solver::PrioritizedConstraint> cs{constraint("a", "all_free", 5),
                                                 constraint("b", "all_free", 1),
                                                 constraint("c", "all_free", 5)};
    const auto w = solver::assign_weights(cs);
    REQUIRE(w.size() == 3);
    CHECK(w[0].id == "b");
    CHECK(w[1].id == "a");
    CHECK(w[2].id == "c");
    CHECK(w[0].weight == 4);
    CHECK(w[1].weight == 2);
    CHECK(w[2].weight == 1);
    std::vector<solver::PrioritizedConstraint> many;
    for (int i = 0; i < 63; ++i) many.push_back(constraint("c" + std::to_string(i), "all_free", i));
    try {
      solver::assign_weights(many);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTooManyConstraints);
    }
    many.pop_back();
    CHECK(solver::assign_weights(many).front().weight == (std::uint64_t{1} << 61));
  }

  TEST_CASE("higher-ranked constraints dominate all lower ones together") {
    // Slot j sits on day j and satisfies rank-r constraint iff bit r of j is set.
    for (int n = 1; n <= 6; ++n) {
      const int m = 1 << n;
      std::vector<int> offsets;
      for (int j = 0; j < m; ++j) offsets.push_back(j * kMinutesPerDay + 600);
      const auto base = Instant(kDay0 * kMinutesPerDay);
      std::vector<TimeSlot> slots;
      for (int o : offsets) slots.push_back(TimeSlot::starting_at(base.plus_minutes(o), 30));
      TimeGrid grid(TimeSlot(base, base.plus_days(m)), 30, slots);
      auto ctx = golden_context();
      ctx.horizon_start = base;
      std::vector<solver::PrioritizedConstraint> cs;
      for (int r = 0; r < n; ++r) {
        std::vector<dsl::Expr> days;
        for (int j = 0; j < m; ++j) {
          if (j & (1 << r)) days.push_back(dsl::compare(dsl::Field::kDayIndex, dsl::RelOp::kEq, j));
        }
        auto e = dsl::any_of(days);
        cs.push_back(solver::PrioritizedConstraint{"c" + std::to_string(r), r, "", dsl::render(e), e, 0});
      }
      std::vector<Score> s;
      for (const auto& slot : grid.slots()) s.push_back(solver::score(slot, cs, ctx));
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          if (a == b) continue;
          const int first_diff = std::countr_zero(static_cast<unsigned>(a ^ b));
          const bool a_wins = (a >> first_diff) & 1;
          CHECK((s[static_cast<std::size_t>(a)] > s[static_cast<std::size_t>(b)]) == a_wins);
        }
      }
      CHECK(solver::best_time(grid, cs, ctx).slot == grid[static_cast<std::size_t>(m - 1)]);
    }
  }

  TEST_CASE("scores stay exact beyond 64 constraints") {
    auto ctx = golden_context();
    const auto grid = grid_at_offsets({540, 600, 660});
    std::vector<solver::PrioritizedConstraint> cs;
    for (int r = 0; r < 100; ++r) {
      cs.push_back(constraint("c" + std::to_string(r), r == 99 ? "start.time < 10:00" : "all_free", r));
    }
    const auto s = solver::score(grid[0], cs, ctx);
    CHECK(s.test_bit(0));
    CHECK_FALSE(s.test_bit(99));
    const auto best = solver::best_time(grid, cs, ctx);
    CHECK(best.slot == grid[2]);  // 11:00 has everyone free
    CHECK(best.unsatisfied == std::vector<std::string>{"c99"});
    CHECK(solver::diverse_topk(grid, cs, ctx, 1).front().slot == grid[2]);
  }

  TEST_CASE("shortlist keeps the slots within epsilon of the best") {
    const auto s = scores_of({5, 5, 3, 2});
    const auto list = solver::shortlist(s, 3);
    CHECK(list.best.to_u64() == 5);
    CHECK(list.threshold.to_u64() == 3);
    CHECK(list.members == std::vector<std::size_t>{0, 1, 2});
    CHECK(solver::shortlist(s, 1).members == std::vector<std::size_t>{0, 1});
    CHECK(solver::shortlist(s, 4).members.size() == 4);
    CHECK(solver::shortlist(s, 9).members.size() == 4);
    CHECK_THROWS_AS(solver::shortlist(s, 0), Error);
  }

  TEST_CASE("shortlist threshold is the smallest admitting at least k") {
    mmtest::mm::gen::Rng rng(8);
    for (int i = 0; i < 300; ++i) {
      std::vector<std::uint64_t> v(static_cast<std::size_t>(rng.uniform(1, 30)));
      for (auto& x : v) x = static_cast<std::uint64_t>(rng.uniform(0, 6));
      const auto k = static_cast<std::size_t>(rng.uniform(1, 10));
      const auto best = *std::max_element(v.begin(), v.end());
      std::uint64_t eps = 0;
      auto admitted = [&](std::uint64_t e) {
        return static_cast<std::size_t>(std::count_if(v.begin(), v.end(),
                                                       [&](auto x) { return x + e >= best; }));
      };
      while (admitted(eps) < std::min(k, v.size())) ++eps;
      const auto list = solver::shortlist(scores_of(v), k);
      CHECK(list.members.size() == admitted(eps));
      CHECK((list.best - list.threshold).to_u64() == eps);
    }
  }

  TEST_CASE("greedy diversity prefers the far slot") {
    const auto grid = grid_at_offsets({0, 15, 30, 1440});
    const auto s = scores_of({1, 1, 1, 1});
    const auto list = solver::shortlist(s, 2);
    CHECK(solver::greedy_diverse(grid, s, list, 2) == std::vector<std::size_t>{0, 3});
    CHECK(solver::greedy_diverse(grid, s, list, 3) == std::vector<std::size_t>{0, 3, 2});
  }

  TEST_CASE("greedy starts from the earliest best-scoring member") {
    const auto grid = grid_at_offsets({0, 15, 30, 1440});
    const auto s = scores_of({2, 3, 3, 1});
    const auto list = solver::shortlist(s, 3);
    CHECK(solver::greedy_diverse(grid, s, list, 3) == std::vector<std::size_t>{1, 0, 2});
  }

  TEST_CASE("selections do not depend on the logarithm base") {
    mmtest::mm::gen::Rng rng(23);
    const solver::DistanceFn log10_dist = [](const TimeSlot& a, const TimeSlot& b) {
      return std::log10(static_cast<double>(std::llabs(a.start().minutes() - b.start().minutes())) + 1.0);
    };
    for (int i = 0; i < 100; ++i) {
      auto inst = mmtest::random_solver_instance(rng);
      std::vector<Score> s;
      for (const auto& slot : inst.grid.slots()) {
        s.push_back(Score::from_u64(mmtest::oracle::weighted_score(slot, inst.constraints, inst.ctx)));
      }
      const auto k = static_cast<std::size_t>(rng.uniform(1, 6));
      const auto list = solver::shortlist(s, k);
      CHECK(solver::greedy_diverse(inst.grid, s, list, k) ==
            solver::greedy_diverse(inst.grid, s, list, k, log10_dist));
    }
  }

  TEST_CASE("diverse_topk returns min(k, shortlist) suggestions led by the best") {
    mmtest::mm::gen::Rng rng(4);
    for (int i = 0; i < 100; ++i) {
      auto inst = mmtest::random_solver_instance(rng);
      const auto k = static_cast<std::size_t>(rng.uniform(1, 5));
      const auto out = solver::diverse_topk(inst.grid, inst.constraints, inst.ctx, k);
      REQUIRE_FALSE(out.empty());
      std::vector<Score> s;
      for (const auto& slot : inst.grid.slots()) {
        s.push_back(Score::from_u64(mmtest::oracle::weighted_score(slot, inst.constraints, inst.ctx)));
      }
      CHECK(out.size() == std::min(k, solver::shortlist(s, k).members.size()));
      CHECK(out.front().slot == solver::best_time(inst.grid, inst.constraints, inst.ctx).slot);
      for (const auto& sug : out) {
        CHECK(sug.score.to_u64() == mmtest::oracle::weighted_score(sug.slot, inst.constraints, inst.ctx));
        CHECK(sug.satisfied.size() + sug.unsatisfied.size() == inst.constraints.size());
      }
    }
    auto ctx = golden_context();
    CHECK_THROWS_AS(solver::diverse_topk(grid_at_offsets({0}), {}, ctx, 0), Error);
  }

  TEST_CASE("initial suggestion maximizes free attendees") {
    auto ctx = golden_context();
    const auto grid = enumerate_candidates(
        TimeSlot(ctx.horizon_start, ctx.horizon_start.plus_days(1)), 30, DailyWindow::business_hours());
    const auto out = solver::initial_suggestion(grid, ctx.attendees, ctx, 1);
    REQUIRE(out.size() == 1);
    CHECK(out[0].slot.start().to_iso() == "2024-03-04T11:00");
    CHECK(out[0].score.to_u64() == 4);
    CHECK(out[0].explanation == "All attendees are free at this time.");
    const auto two = solver::initial_suggestion(grid, ctx.attendees, ctx, 2);
    CHECK(two[0].slot == out[0].slot);
    CHECK(two[1].slot.start().to_iso() == "2024-03-04T17:30");
    CHECK(two[1].explanation == "All attendees are free at this time.");
    CHECK(solver::suggest(grid, {}, ctx, 1)[0].slot == out[0].slot);
  }

  TEST_CASE("suggest breaks score ties by availability") {
    auto ctx = golden_context();
    const auto grid = enumerate_candidates(
        TimeSlot(ctx.horizon_start, ctx.horizon_start.plus_days(1)), 30, DailyWindow::business_hours());
    std::vector<solver::PrioritizedConstraint> cs{constraint("c1", "start.hour < 11", 0)};
    const auto out = solver::suggest(grid, cs, ctx, 1);
    // 08:30 is the first slot before 11:00 where three of four are free.
    CHECK(out[0].slot.start().to_iso() == "2024-03-04T08:30");
    CHECK(out[0].score.to_u64() == 1);
    CHECK(out[0].attendee_availability.at("p02") == false);
    CHECK(out[0].explanation == "This time satisfies: \"c1 text\".");
  }

  TEST_CASE("explanations") {
    std::vector<solver::PrioritizedConstraint> cs{constraint("c1", "all_free", 0),
                                                 constraint("c2", "all_free", 1)};
    const auto slot = grid_at_offsets({0})[0];
    solver::Suggestion s{slot, {}, {"c1"}, {"c2"}, {}, {}};
    CHECK(solver::explain(s, cs) == "This time satisfies: \"c1 text\", but does not satisfy: \"c2 text\".");
    s.satisfied = {};
    s.unsatisfied = {"c1", "c2"};
    CHECK(solver::explain(s, cs) == "This time does not satisfy: \"c1 text\", \"c2 text\".");
    s.attendee_availability = {{"p1", true}, {"p2", true}};
    CHECK(solver::explain(s, {}) == "All attendees are free at this time.");
  }
}
