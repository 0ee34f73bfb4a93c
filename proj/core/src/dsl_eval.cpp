#include "meetmate/dsl.hpp"

namespace meetmate::dsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const FreeBusyView& view_of(const EvalContext& ctx) {
  if (!ctx.free_busy) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation context has no free/busy view");
  }
  return *ctx.free_busy;
}

std::int64_t field_value(Field field, const EvalContext& ctx) {
  const TimeSlot& c = ctx.candidate;
  const std::int64_t start_mod = c.start().minute_of_day();
  // End is measured from the start day's midnight, so a slot ending at
  // midnight has end.time == 24:00.
  const std::int64_t end_mod = start_mod + c.duration_minutes();
  switch (field) {
    case Field::kStartHour: return start_mod / 60;
    case Field::kStartMinute: return start_mod % 60;
    case Field::kEndHour: return end_mod / 60;
    case Field::kEndMinute: return end_mod % 60;
    case Field::kStartTime: return start_mod;
    case Field::kEndTime: return end_mod;
    case Field::kDayIndex:
      return c.start().day_number() - ctx.horizon_start.day_number();
  }
  return 0;
}

}  // namespace

bool evaluate(const Expr& expr, const EvalContext& ctx) {
  return std::visit(
      Overloaded{
          [&](const Compare& c) { return apply(c.op, field_value(c.field, ctx), c.value); },
          [&](const DayIn& d) {
            return (d.days & (1u << static_cast<int>(ctx.candidate.start().weekday()))) != 0;
          },
          [&](const Free& f) {
            const auto& view = view_of(ctx);
            auto id = view.id_for_name(f.person_name);
            if (!id) {
              throw Error(ErrorCode::kUnknownPerson, "unknown person '" + f.person_name + "'");
            }
            return view.is_free(*id, ctx.candidate);
          },
          [&](const AllFree&) {
            const auto& view = view_of(ctx);
            for (const auto& a : ctx.attendees) {
              if (!view.is_free(a, ctx.candidate)) return false;
            }
            return true;
          },
          [&](const Gap& g) {
            const auto& view = view_of(ctx);
            int gap = g.side == GapSide::kBefore ? view.gap_before(ctx.organizer, ctx.candidate)
                                                 : view.gap_after(ctx.organizer, ctx.candidate);
            return apply(g.op, gap, g.minutes);
          },
          [&](const AvoidWindow& a) {
            const auto& c = ctx.candidate;
            const std::int64_t last_day = (c.end().minutes() - 1) / kMinutesPerDay;
            for (std::int64_t d = c.start().day_number(); d <= last_day; ++d) {
              const std::int64_t ws = d * kMinutesPerDay + a.start;
              const std::int64_t we = d * kMinutesPerDay + a.end;
              if (c.start().minutes() < we && ws < c.end().minutes()) return false;
            }
            return true;
          },
          [&](const WithinDays& w) {
            return ctx.candidate.start().minutes() <
                   ctx.horizon_start.minutes() + std::int64_t{w.days} * kMinutesPerDay;
          },
          [&](const OnDate& d) { return ctx.candidate.start().day_number() == d.day_number; },
          [&](const Not& n) { return !evaluate(n.operand, ctx); },
          [&](const BoolOp& b) {
            if (b.kind == BoolKind::kAnd) {
              for (const auto& o : b.operands) {
                if (!evaluate(o, ctx)) return false;
              }
              return true;
            }
            for (const auto& o : b.operands) {
              if (evaluate(o, ctx)) return true;
            }
            return false;
          },
      },
      expr.node().value);
}

}  // namespace meetmate::dsl
