#pragma once

#include "meetmate/dsl.hpp"
#include "meetmate/score.hpp"
#include "meetmate/time.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace meetmate::solver {

/// Largest list for which power-of-two weights fit a 64-bit score.
inline constexpr std::size_t kMaxWeightedConstraints = 62;

struct PrioritizedConstraint {
  std::string id;
  int rank = 0;  // 0 = highest priority
  std::string nl_text;
  std::string source;  // constraint-language text
  dsl::Expr expr;
  std::uint64_t weight = 0;
};

/// Builds a constraint from source text; throws dsl::ParseError.
PrioritizedConstraint make_constraint(std::string id, std::string nl_text, std::string source,
                                      int rank = 0);

struct Suggestion {
  TimeSlot slot;
  Score score;
  std::vector<std::string> satisfied;    // constraint ids, rank order
  std::vector<std::string> unsatisfied;  // constraint ids, rank order
  std::map<std::string, bool> attendee_availability;
  std::string explanation;
};

/// Sorts by rank (stable) and renumbers ranks densely as 0..n-1 without
/// touching weights.
void renumber(std::vector<PrioritizedConstraint>& constraints);

/// renumber() followed by weight = 2^(n-1-rank). Throws kTooManyConstraints
/// when n exceeds kMaxWeightedConstraints.
std::vector<PrioritizedConstraint> assign_weights(std::vector<PrioritizedConstraint> constraints);

/// Σ 2^(n-1-rank) over the constraints satisfied at `slot`. Constraints must
/// carry dense ranks; this reads ranks, not the weight field, so it is
/// defined for any list length.
Score score(const TimeSlot& slot, std::span<const PrioritizedConstraint> constraints,
            const dsl::EvalContext& ctx);

/// Highest-scoring slot, earliest start on ties. Throws kEmptyGrid.
Suggestion best_time(const TimeGrid& grid, std::span<const PrioritizedConstraint> constraints,
                     const dsl::EvalContext& ctx);

/// Result of the score filter that precedes diverse selection.
struct Shortlist {
  Score best;
  Score threshold;           // k-th best score; every member scores >= threshold
  std::vector<std::size_t> members;  // ascending slot indices
};

/// Keeps the slots within epsilon of the best score, epsilon being the
/// smallest value that admits at least k slots (all slots when fewer than k).
Shortlist shortlist(std::span<const Score> scores, std::size_t k);

using DistanceFn = std::function<double(const TimeSlot&, const TimeSlot&)>;

/// Greedy max-sum diversification over a shortlist: start from the earliest
/// best-scoring member, then repeatedly add the member maximizing the summed
/// distance to those already chosen (earliest start on ties).
std::vector<std::size_t> greedy_diverse(const TimeGrid& grid, std::span<const Score> scores,
                                        const Shortlist& shortlist, std::size_t k,
                                        const DistanceFn& dist = distance);

/// min(k, |shortlist|) suggestions chosen for score first, then spread.
/// Throws kEmptyGrid or kInvalidArgument for k == 0.
std::vector<Suggestion> diverse_topk(const TimeGrid& grid,
                                     std::span<const PrioritizedConstraint> constraints,
                                     const dsl::EvalContext& ctx, std::size_t k);

/// diverse_topk where every attendee's availability counts 1 and the score
/// is the number of free attendees.
std::vector<Suggestion> initial_suggestion(const TimeGrid& grid,
                                           std::span<const std::string> attendees,
                                           const dsl::EvalContext& ctx, std::size_t k);

/// Suggestions for an interactive session. With no constraints this is the
/// initial suggestion. Otherwise slots are ranked by the weighted constraint
/// score, and attendee availability only breaks ties between equal scores.
std::vector<Suggestion> suggest(const TimeGrid& grid,
                                std::span<const PrioritizedConstraint> constraints,
                                const dsl::EvalContext& ctx, std::size_t k);

/// One-sentence summary of which constraints a suggestion meets; without
/// constraints, how many attendees are free.
std::string explain(const Suggestion& suggestion,
                    std::span<const PrioritizedConstraint> constraints);

}  // namespace meetmate::solver
