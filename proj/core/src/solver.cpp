#include "meetmate/solver.hpp"

#include "meetmate/grid_eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace meetmate::solver {
namespace {

void require_grid(const TimeGrid& grid) {
  if (grid.empty()) throw Error(ErrorCode::kEmptyGrid, "no candidate times in the horizon");
}

std::vector<std::size_t> rank_order(std::span<const PrioritizedConstraint> constraints) {
  const auto n = constraints.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return constraints[a].rank < constraints[b].rank;
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (constraints[order[i]].rank != static_cast<int>(i)) {
      throw Error(ErrorCode::kInvalidArgument, "constraint ranks must be dense 0..n-1");
    }
  }
  return order;
}

void check_all_names(std::span<const PrioritizedConstraint> constraints,
                     const dsl::EvalContext& ctx) {
  if (!ctx.free_busy) return;
  for (const auto& c : constraints) dsl::check_names(c.expr, *ctx.free_busy);
}

std::map<std::string, bool> availability(const TimeSlot& slot, const dsl::EvalContext& ctx) {
  std::map<std::string, bool> out;
  if (!ctx.free_busy) return out;
  for (const auto& a : ctx.attendees) out[a] = ctx.free_busy->is_free(a, slot);
  return out;
}

Suggestion make_suggestion(const TimeSlot& slot,
                           std::span<const PrioritizedConstraint> constraints,
                           const dsl::EvalContext& ctx) {
  auto order = rank_order(constraints);
  dsl::EvalContext at = ctx;
  at.candidate = slot;
  Suggestion s{slot, Score{}, {}, {}, availability(slot, ctx), {}};
  const auto n = constraints.size();
  for (std::size_t i : order) {
    const auto& c = constraints[i];
    if (dsl::evaluate(c.expr, at)) {
      s.score.set_bit(n - 1 - static_cast<std::size_t>(c.rank));
      s.satisfied.push_back(c.id);
    } else {
      s.unsatisfied.push_back(c.id);
    }
  }
  s.explanation = explain(s, constraints);
  return s;
}

// Per-slot weighted scores from whole-grid constraint columns.
std::vector<Score> grid_scores(const TimeGrid& grid,
                               std::span<const PrioritizedConstraint> constraints,
                               const dsl::EvalContext& ctx) {
  auto order = rank_order(constraints);
  check_all_names(constraints, ctx);
  const auto n = constraints.size();
  dsl::GridEvaluator evaluator(grid, ctx);
  std::vector<Score> scores(grid.size());
  if (n <= 64) {
    std::vector<std::uint64_t> packed(grid.size(), 0);
    for (std::size_t i : order) {
      const auto& c = constraints[i];
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - static_cast<std::size_t>(c.rank));
      SlotMask col = evaluator.evaluate(c.expr);
      const auto& words = col.words();
      for (std::size_t w = 0; w < words.size(); ++w) {
        for (std::uint64_t word = words[w]; word != 0; word &= word - 1) {
          packed[w * 64 + static_cast<std::size_t>(std::countr_zero(word))] |= bit;
        }
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) scores[i] = Score::from_u64(packed[i]);
    return scores;
  }
  for (std::size_t i : order) {
    const auto& c = constraints[i];
    const std::size_t bit = n - 1 - static_cast<std::size_t>(c.rank);
    SlotMask col = evaluator.evaluate(c.expr);
    for (std::size_t slot = 0; slot < grid.size(); ++slot) {
      if (col.test(slot)) scores[slot].set_bit(bit);
    }
  }
  return scores;
}

std::vector<std::uint64_t> free_counts(const TimeGrid& grid,
                                       std::span<const std::string> attendees,
                                       const dsl::EvalContext& ctx) {
  if (!ctx.free_busy) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation context has no free/busy view");
  }
  std::vector<std::uint64_t> counts(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    counts[i] = static_cast<std::uint64_t>(ctx.free_busy->free_count(attendees, grid[i]));
  }
  return counts;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

PrioritizedConstraint make_constraint(std::string id, std::string nl_text, std::string source,
                                      int rank) {
  dsl::Expr expr = dsl::parse(source);
  return PrioritizedConstraint{std::move(id), rank, std::move(nl_text), std::move(source),
                               std::move(expr), 0};
}

void renumber(std::vector<PrioritizedConstraint>& constraints) {
  std::stable_sort(constraints.begin(), constraints.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    constraints[i].rank = static_cast<int>(i);
  }
}

std::vector<PrioritizedConstraint> assign_weights(std::vector<PrioritizedConstraint> constraints) {
  if (constraints.size() > kMaxWeightedConstraints) {
    throw Error(ErrorCode::kTooManyConstraints,
                "at most " + std::to_string(kMaxWeightedConstraints) +
                    " constraints are supported, got " + std::to_string(constraints.size()));
  }
  renumber(constraints);
  const auto n = constraints.size();
  for (auto& c : constraints) {
    c.weight = std::uint64_t{1} << (n - 1 - static_cast<std::size_t>(c.rank));
  }
  return constraints;
}

Score score(const TimeSlot& slot, std::span<const PrioritizedConstraint> constraints,
            const dsl::EvalContext& ctx) {
  auto order = rank_order(constraints);
  dsl::EvalContext at = ctx;
  at.candidate = slot;
  Score s;
  const auto n = constraints.size();
  for (std::size_t i : order) {
    if (dsl::evaluate(constraints[i].expr, at)) {
      s.set_bit(n - 1 - static_cast<std::size_t>(constraints[i].rank));
    }
  }
  return s;
}

Suggestion best_time(const TimeGrid& grid, std::span<const PrioritizedConstraint> constraints,
                     const dsl::EvalContext& ctx) {
  require_grid(grid);
  auto order = rank_order(constraints);
  check_all_names(constraints, ctx);
  // With weights 2^(n-1-rank) the argmax is the lexicographic maximum of the
  // satisfaction vectors: walk ranks in order and keep narrowing the live set
  // whenever some live slot satisfies the next constraint.
  dsl::GridEvaluator evaluator(grid, ctx);
  SlotMask live(grid.size(), true);
  for (std::size_t i : order) {
    SlotMask narrowed = evaluator.evaluate(constraints[i].expr);
    narrowed &= live;
    if (narrowed.any()) live = std::move(narrowed);
  }
  return make_suggestion(grid[live.first()], constraints, ctx);
}

Shortlist shortlist(std::span<const Score> scores, std::size_t k) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyGrid, "no candidate times in the horizon");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  Shortlist out;
  out.best = *std::max_element(scores.begin(), scores.end());
  if (scores.size() <= k) {
    out.threshold = *std::min_element(scores.begin(), scores.end());
  } else {
    std::vector<Score> sorted(scores.begin(), scores.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end(), std::greater<>{});
    out.threshold = sorted[k - 1];
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= out.threshold) out.members.push_back(i);
  }
  return out;
}

std::vector<std::size_t> greedy_diverse(const TimeGrid& grid, std::span<const Score> scores,
                                        const Shortlist& list, std::size_t k,
                                        const DistanceFn& dist) {
  std::vector<std::size_t> chosen;
  if (list.members.empty() || k == 0) return chosen;
  auto first = std::find_if(list.members.begin(), list.members.end(),
                            [&](std::size_t i) { return scores[i] == list.best; });
  chosen.push_back(*first);

  const std::size_t m = list.members.size();
  std::vector<double> sums(m, 0.0);
  std::vector<bool> taken(m, false);
  taken[static_cast<std::size_t>(first - list.members.begin())] = true;
  const std::size_t target = std::min(k, m);
  while (chosen.size() < target) {
    const TimeSlot& last = grid[chosen.back()];
    std::size_t pick = m;
    double pick_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (taken[j]) continue;
      sums[j] += dist(grid[list.members[j]], last);
      // Sums that agree to ~1e-9 relative are treated as ties so that the
      // earliest start wins regardless of rounding in the logarithms.
      const double tol = 1e-9 * std::max(1.0, std::abs(pick_sum));
      if (pick == m || sums[j] > pick_sum + tol) {
        pick = j;
        pick_sum = sums[j];
      }
    }
    taken[pick] = true;
    chosen.push_back(list.members[pick]);
  }
  return chosen;
}

std::vector<Suggestion> diverse_topk(const TimeGrid& grid,
                                     std::span<const PrioritizedConstraint> constraints,
                                     const dsl::EvalContext& ctx, std::size_t k) {
  require_grid(grid);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  auto scores = grid_scores(grid, constraints, ctx);
  auto list = shortlist(scores, k);
  std::vector<Suggestion> out;
  for (std::size_t idx : greedy_diverse(grid, scores, list, k)) {
    out.push_back(make_suggestion(grid[idx], constraints, ctx));
  }
  return out;
}

std::vector<Suggestion> initial_suggestion(const TimeGrid& grid,
                                           std::span<const std::string> attendees,
                                           const dsl::EvalContext& ctx, std::size_t k) {
  require_grid(grid);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  auto counts = free_counts(grid, attendees, ctx);
  std::vector<Score> scores;
  scores.reserve(counts.size());
  for (auto c : counts) scores.push_back(Score::from_u64(c));
  auto list = shortlist(scores, k);
  std::vector<Suggestion> out;
  for (std::size_t idx : greedy_diverse(grid, scores, list, k)) {
    Suggestion s{grid[idx], scores[idx], {}, {}, {}, {}};
    for (const auto& a : attendees) s.attendee_availability[a] = ctx.free_busy->is_free(a, s.slot);
    s.explanation = explain(s, {});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Suggestion> suggest(const TimeGrid& grid,
                                std::span<const PrioritizedConstraint> constraints,
                                const dsl::EvalContext& ctx, std::size_t k) {
  if (constraints.empty()) return initial_suggestion(grid, ctx.attendees, ctx, k);
  require_grid(grid);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  auto scores = grid_scores(grid, constraints, ctx);
  auto counts = free_counts(grid, ctx.attendees, ctx);
  const auto width = static_cast<std::size_t>(std::bit_width(ctx.attendees.size()));
  std::vector<Score> keys;
  keys.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    keys.push_back(scores[i].shifted_with(width, counts[i]));
  }
  auto list = shortlist(keys, k);
  std::vector<Suggestion> out;
  for (std::size_t idx : greedy_diverse(grid, keys, list, k)) {
    out.push_back(make_suggestion(grid[idx], constraints, ctx));
  }
  return out;
}

std::string explain(const Suggestion& suggestion,
                    std::span<const PrioritizedConstraint> constraints) {
  if (constraints.empty()) {
    const auto& avail = suggestion.attendee_availability;
    const auto free = std::count_if(avail.begin(), avail.end(), [](const auto& a) { return a.second; });
    if (avail.empty()) return "This time works for the selected attendees.";
    if (static_cast<std::size_t>(free) == avail.size()) return "All attendees are free at this time.";
    return std::to_string(free) + " of " + std::to_string(avail.size()) +
           " attendees are free at this time.";
  }
  auto text_of = [&](const std::vector<std::string>& ids) {
    std::vector<std::string> texts;
    for (const auto& id : ids) {
      auto it = std::find_if(constraints.begin(), constraints.end(),
                             [&](const auto& c) { return c.id == id; });
      std::string text = it == constraints.end() ? id : it->nl_text;
      while (!text.empty() && std::string_view(".!? ").find(text.back()) != std::string_view::npos) {
        text.pop_back();
      }
      texts.push_back("\"" + text + "\"");
    }
    return join(texts);
  };
  if (suggestion.unsatisfied.empty()) {
    return "This time satisfies: " + text_of(suggestion.satisfied) + ".";
  }
  if (suggestion.satisfied.empty()) {
    return "This time does not satisfy: " + text_of(suggestion.unsatisfied) + ".";
  }
  return "This time satisfies: " + text_of(suggestion.satisfied) +
         ", but does not satisfy: " + text_of(suggestion.unsatisfied) + ".";
}

}  // namespace meetmate::solver
