#include "meetmate/dsl.hpp"

#include <cstdio>

namespace meetmate::dsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string clock(int minutes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

std::string quote(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool is_bool_op(const Expr& e) { return std::holds_alternative<BoolOp>(e.node().value); }

void render_into(const Expr& e, std::string& out);

void render_operand(const Expr& e, std::string& out) {
  if (is_bool_op(e)) {
    out.push_back('(');
    render_into(e, out);
    out.push_back(')');
  } else {
    render_into(e, out);
  }
}

void render_into(const Expr& e, std::string& out) {
  std::visit(
      Overloaded{
          [&](const Compare& c) {
            out += to_string(c.field);
            out += ' ';
            out += to_string(c.op);
            out += ' ';
            out += is_clock_field(c.field) ? clock(c.value) : std::to_string(c.value);
          },
          [&](const DayIn& d) {
            out += "day in {";
            bool first = true;
            for (int i = 0; i < 7; ++i) {
              if (!(d.days & (1u << i))) continue;
              if (!first) out += ", ";
              out += weekday_abbrev(static_cast<Weekday>(i));
              first = false;
            }
            out += '}';
          },
          [&](const Free& f) { out += "free(" + quote(f.person_name) + ")"; },
          [&](const AllFree&) { out += "all_free"; },
          [&](const Gap& g) {
            out += g.side == GapSide::kBefore ? "gap_before " : "gap_after ";
            out += to_string(g.op);
            out += ' ' + std::to_string(g.minutes) + "m";
          },
          [&](const AvoidWindow& a) {
            out += "avoid(" + clock(a.start) + "-" + clock(a.end) + ")";
          },
          [&](const WithinDays& w) { out += "within_days(" + std::to_string(w.days) + ")"; },
          [&](const OnDate& d) {
            out += "on(" + Instant(d.day_number * kMinutesPerDay).date_string() + ")";
          },
          [&](const Not& n) {
            out += "not ";
            render_operand(n.operand, out);
          },
          [&](const BoolOp& b) {
            const char* sep = b.kind == BoolKind::kAnd ? " and " : " or ";
            for (std::size_t i = 0; i < b.operands.size(); ++i) {
              if (i > 0) out += sep;
              render_operand(b.operands[i], out);
            }
          },
      },
      e.node().value);
}

void collect_names(const Expr& e, std::set<std::string>& out) {
  std::visit(Overloaded{
                 [&](const Free& f) { out.insert(f.person_name); },
                 [&](const Not& n) { collect_names(n.operand, out); },
                 [&](const BoolOp& b) {
                   for (const auto& o : b.operands) collect_names(o, out);
                 },
                 [](const auto&) {},
             },
             e.node().value);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kTypeError, what);
}

Expr bool_op(BoolKind kind, std::vector<Expr> operands) {
  require(!operands.empty(), "boolean operator needs operands");
  if (operands.size() == 1) return std::move(operands.front());
  return Expr(Node{BoolOp{kind, std::move(operands)}});
}

}  // namespace

std::string_view to_string(Field field) {
  switch (field) {
    case Field::kStartHour: return "start.hour";
    case Field::kStartMinute: return "start.minute";
    case Field::kEndHour: return "end.hour";
    case Field::kEndMinute: return "end.minute";
    case Field::kStartTime: return "start.time";
    case Field::kEndTime: return "end.time";
    case Field::kDayIndex: return "day_index";
  }
  return "?";
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::kLt: return "<";
    case RelOp::kLe: return "<=";
    case RelOp::kGt: return ">";
    case RelOp::kGe: return ">=";
    case RelOp::kEq: return "==";
    case RelOp::kNe: return "!=";
  }
  return "?";
}

bool is_clock_field(Field field) {
  return field == Field::kStartTime || field == Field::kEndTime;
}

bool apply(RelOp op, std::int64_t lhs, std::int64_t rhs) {
  switch (op) {
    case RelOp::kLt: return lhs < rhs;
    case RelOp::kLe: return lhs <= rhs;
    case RelOp::kGt: return lhs > rhs;
    case RelOp::kGe: return lhs >= rhs;
    case RelOp::kEq: return lhs == rhs;
    case RelOp::kNe: return lhs != rhs;
  }
  return false;
}

Expr::Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || *a.node_ == *b.node_;
}

Expr compare(Field field, RelOp op, int value) {
  if (is_clock_field(field)) {
    require(value >= 0 && value <= kMinutesPerDay, "clock literal out of range");
  } else {
    require(value >= 0, "integer literal must be non-negative");
  }
  return Expr(Node{Compare{field, op, value}});
}

Expr day_in(std::uint8_t days) {
  require(days != 0 && days < 0x80, "day set must name at least one weekday");
  return Expr(Node{DayIn{days}});
}

Expr person_free(std::string person_name) {
  require(!person_name.empty(), "free() needs a person name");
  return Expr(Node{Free{std::move(person_name)}});
}

Expr all_free() { return Expr(Node{AllFree{}}); }

Expr gap(GapSide side, RelOp op, int minutes) {
  require(minutes >= 0, "gap minutes must be non-negative");
  return Expr(Node{Gap{side, op, minutes}});
}

Expr avoid(int start_minute, int end_minute) {
  require(start_minute >= 0 && end_minute <= kMinutesPerDay && start_minute < end_minute,
          "avoid window must satisfy 00:00 <= start < end <= 24:00");
  return Expr(Node{AvoidWindow{start_minute, end_minute}});
}

Expr within_days(int days) {
  require(days >= 0, "within_days needs a non-negative day count");
  return Expr(Node{WithinDays{days}});
}

Expr on_date(std::int64_t day_number) {
  require(day_number >= 0, "date before the reference epoch");
  return Expr(Node{OnDate{day_number}});
}

Expr negate(Expr operand) { return Expr(Node{Not{std::move(operand)}}); }

Expr all_of(std::vector<Expr> operands) {
  return bool_op(BoolKind::kAnd, std::move(operands));
}

Expr any_of(std::vector<Expr> operands) {
  return bool_op(BoolKind::kOr, std::move(operands));
}

ParseError::ParseError(ErrorCode code, std::size_t offset, std::set<std::string> expected,
                       const std::string& message)
    : Error(code, message + " at offset " + std::to_string(offset)),
      offset_(offset),
      expected_(std::move(expected)) {}

std::string render(const Expr& expr) {
  std::string out;
  render_into(expr, out);
  return out;
}

std::set<std::string> referenced_names(const Expr& expr) {
  std::set<std::string> out;
  collect_names(expr, out);
  return out;
}

void check_names(const Expr& expr, const FreeBusyView& directory) {
  for (const auto& name : referenced_names(expr)) {
    if (!directory.id_for_name(name)) {
      throw Error(ErrorCode::kUnknownPerson, "unknown person '" + name + "'");
    }
  }
}

}  // namespace meetmate::dsl
