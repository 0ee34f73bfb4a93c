#pragma once

#include "meetmate/eval.hpp"
#include "meetmate/solver.hpp"
#include "meetmate/universe_gen.hpp"

#include <memory>
#include <string>
#include <vector>

namespace meetmate::bench {

// Generated universe plus in-filled reference constraints from the corpus.
struct Workload {
  Universe universe;
  std::vector<gen::MeetingInstance> instances;
  std::vector<std::string> sources;
  dsl::EvalContext ctx;
};

inline const Workload& workload() {
  static const Workload w = [] {
    Workload out{gen::generate_universe(gen::GenParams{1}), {}, {}, {}};
    out.instances = gen::generate_instances(out.universe, 1);
    const auto corpus = eval::load_corpus(std::string(MEETMATE_DATA_DIR) + "/corpus.jsonl");
    for (const auto& r : eval::build_dataset(corpus, out.instances, out.universe, 1)) {
      if (r.reference_dsl) out.sources.push_back(*r.reference_dsl);
    }
    const auto& inst = out.instances.front();
    out.ctx.organizer = inst.organizer;
    out.ctx.attendees = inst.attendees;
    out.ctx.duration_minutes = 30;
    out.ctx.free_busy = std::make_shared<const FreeBusyView>(out.universe);
    out.ctx.horizon_start = inst.horizon.start();
    out.ctx.now = inst.horizon.start();
    return out;
  }();
  return w;
}

inline std::vector<solver::PrioritizedConstraint> constraints(std::size_t n) {
  const auto& w = workload();
  std::vector<solver::PrioritizedConstraint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = w.sources[i % w.sources.size()];
    out.push_back(solver::make_constraint("c" + std::to_string(i + 1), src, src, static_cast<int>(i)));
  }
  return out;
}

// Exactly n consecutive 15-minute candidates starting at the workload horizon.
inline TimeGrid grid(std::size_t n) {
  const auto start = workload().ctx.horizon_start;
  const auto days = static_cast<int>(n / 90 + 2);
  const auto all = enumerate_candidates(TimeSlot(start, start.plus_days(days)), 30);
  std::vector<TimeSlot> slots(all.slots().begin(), all.slots().begin() + static_cast<std::ptrdiff_t>(n));
  const TimeSlot horizon(start, slots.back().end());
  return TimeGrid(horizon, 30, std::move(slots));
}

}  // namespace meetmate::bench
