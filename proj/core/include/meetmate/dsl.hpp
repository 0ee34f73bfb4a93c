#pragma once

#include "meetmate/calendar.hpp"
#include "meetmate/common.hpp"
#include "meetmate/time.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// The constraint language: a closed boolean grammar over a candidate slot.
//
//   expr     := or_expr
//   or_expr  := and_expr { "or" and_expr }
//   and_expr := unary { "and" unary }
//   unary    := "not" unary | "(" expr ")" | atom
//   atom     := field relop literal | "day" "in" "{" DAY {"," DAY} "}"
//             | "free(" "\"name\"" ")" | "all_free"
//             | ("gap_before" | "gap_after") relop INT "m"
//             | "avoid(" HH:MM "-" HH:MM ")" | "within_days(" INT ")"
//             | "on(" YYYY-MM-DD ")"
//
// Keywords are case-insensitive; quoted names are not.
namespace meetmate::dsl {

enum class Field { kStartHour, kStartMinute, kEndHour, kEndMinute, kStartTime, kEndTime, kDayIndex };
enum class RelOp { kLt, kLe, kGt, kGe, kEq, kNe };

std::string_view to_string(Field field);
std::string_view to_string(RelOp op);
/// start.time and end.time take clock literals; every other field an integer.
bool is_clock_field(Field field);
bool apply(RelOp op, std::int64_t lhs, std::int64_t rhs);

struct Node;

/// Immutable, shareable syntax tree handle.
class Expr {
 public:
  explicit Expr(Node node);

  const Node& node() const { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

/// Clock values are minutes since midnight (0..1440).
struct Compare {
  Field field;
  RelOp op;
  int value;
  friend bool operator==(const Compare&, const Compare&) = default;
};

/// Bit i set = weekday i (MON = bit 0).
struct DayIn {
  std::uint8_t days;
  friend bool operator==(const DayIn&, const DayIn&) = default;
};

struct Free {
  std::string person_name;
  friend bool operator==(const Free&, const Free&) = default;
};

struct AllFree {
  friend bool operator==(const AllFree&, const AllFree&) = default;
};

enum class GapSide { kBefore, kAfter };

struct Gap {
  GapSide side;
  RelOp op;
  int minutes;
  friend bool operator==(const Gap&, const Gap&) = default;
};

struct AvoidWindow {
  int start;  // minutes since midnight
  int end;
  friend bool operator==(const AvoidWindow&, const AvoidWindow&) = default;
};

struct WithinDays {
  int days;
  friend bool operator==(const WithinDays&, const WithinDays&) = default;
};

struct OnDate {
  std::int64_t day_number;  // days since the reference epoch
  friend bool operator==(const OnDate&, const OnDate&) = default;
};

struct Not {
  Expr operand;
  friend bool operator==(const Not&, const Not&) = default;
};

enum class BoolKind { kAnd, kOr };

/// N-ary conjunction or disjunction, at least two operands.
struct BoolOp {
  BoolKind kind;
  std::vector<Expr> operands;
  friend bool operator==(const BoolOp&, const BoolOp&) = default;
};

struct Node {
  std::variant<Compare, DayIn, Free, AllFree, Gap, AvoidWindow, WithinDays, OnDate, Not,
               BoolOp>
      value;
  friend bool operator==(const Node&, const Node&) = default;
};

// Builders. They validate the same invariants the parser checks.
Expr compare(Field field, RelOp op, int value);
Expr day_in(std::uint8_t days);
Expr person_free(std::string person_name);
Expr all_free();
Expr gap(GapSide side, RelOp op, int minutes);
Expr avoid(int start_minute, int end_minute);
Expr within_days(int days);
Expr on_date(std::int64_t day_number);
Expr negate(Expr operand);
Expr all_of(std::vector<Expr> operands);
Expr any_of(std::vector<Expr> operands);

/// Syntax or type error with the byte offset where it was detected.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, std::set<std::string> expected,
             const std::string& message);

  std::size_t offset() const { return offset_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::set<std::string> expected_;
};

/// Throws ParseError with code kParseError (syntax) or kTypeError.
Expr parse(std::string_view source);

/// Canonical source text; parse(render(e)) == e.
std::string render(const Expr& expr);

/// Quoted names referenced through free(...).
std::set<std::string> referenced_names(const Expr& expr);

/// Throws kUnknownPerson when a referenced name is not in the directory.
void check_names(const Expr& expr, const FreeBusyView& directory);

struct EvalContext {
  std::string organizer;               // person id
  std::vector<std::string> attendees;  // person ids
  int duration_minutes = 0;
  TimeSlot candidate = TimeSlot(Instant(0), Instant(kSlotStepMinutes));
  std::shared_ptr<const FreeBusyView> free_busy;
  Instant horizon_start;
  Instant now;
};

/// Pure, deterministic truth value of `expr` for ctx.candidate.
/// Throws kUnknownPerson for unresolvable names.
bool evaluate(const Expr& expr, const EvalContext& ctx);

}  // namespace meetmate::dsl
