#include "meetmate/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <utility>

namespace meetmate::dsl {
namespace {

constexpr std::array<std::pair<std::string_view, Field>, 7> kFields = {{
    {"start.hour", Field::kStartHour},
    {"start.minute", Field::kStartMinute},
    {"end.hour", Field::kEndHour},
    {"end.minute", Field::kEndMinute},
    {"start.time", Field::kStartTime},
    {"end.time", Field::kEndTime},
    {"day_index", Field::kDayIndex},
}};

constexpr std::array<std::pair<std::string_view, RelOp>, 6> kRelOps = {{
    {"<", RelOp::kLt},
    {"<=", RelOp::kLe},
    {">", RelOp::kGt},
    {">=", RelOp::kGe},
    {"==", RelOp::kEq},
    {"!=", RelOp::kNe},
}};

const std::set<std::string> kRelOpNames = {"<", "<=", ">", ">=", "==", "!="};

const std::set<std::string> kAtomStarts = {
    "not",  "(",        "start.hour", "start.minute", "end.hour",   "end.minute",
    "start.time", "end.time", "day_index", "day", "free", "all_free", "gap_before",
    "gap_after", "avoid", "within_days", "on"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_word_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_op_char(char c) { return c == '<' || c == '>' || c == '=' || c == '!'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse_or();
    skip_ws();
    if (pos_ != src_.size()) {
      fail(pos_, {"and", "or", "end of input"}, "unexpected trailing input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, std::set<std::string> expected,
                         const std::string& what) const {
    std::string msg = what;
    if (!expected.empty()) {
      msg += " (expected ";
      bool first = true;
      for (const auto& e : expected) {
        if (!first) msg += ", ";
        msg += "'" + e + "'";
        first = false;
      }
      msg += ")";
    }
    throw ParseError(ErrorCode::kParseError, at, std::move(expected), msg);
  }

  [[noreturn]] void type_fail(std::size_t at, const std::string& what) const {
    throw ParseError(ErrorCode::kTypeError, at, {}, what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  // Lowercased word at the cursor without consuming it.
  std::string peek_word() {
    skip_ws();
    if (pos_ >= src_.size() || !is_word_start(src_[pos_])) return {};
    std::size_t end = pos_;
    while (end < src_.size() && is_word_char(src_[end])) ++end;
    return lower(src_.substr(pos_, end - pos_));
  }

  void consume_word() {
    skip_ws();
    while (pos_ < src_.size() && is_word_char(src_[pos_])) ++pos_;
  }

  bool accept_keyword(std::string_view kw) {
    if (peek_word() == kw) {
      consume_word();
      return true;
    }
    return false;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail(pos_, {std::string(kw)}, "expected keyword");
  }

  bool accept_char(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_char(char c) {
    if (!accept_char(c)) fail(pos_, {std::string(1, c)}, "unexpected input");
  }

  Expr parse_or() {
    std::vector<Expr> operands;
    operands.push_back(parse_and());
    while (accept_keyword("or")) operands.push_back(parse_and());
    if (operands.size() == 1) return std::move(operands.front());
    return Expr(Node{BoolOp{BoolKind::kOr, std::move(operands)}});
  }

  Expr parse_and() {
    std::vector<Expr> operands;
    operands.push_back(parse_unary());
    while (accept_keyword("and")) operands.push_back(parse_unary());
    if (operands.size() == 1) return std::move(operands.front());
    return Expr(Node{BoolOp{BoolKind::kAnd, std::move(operands)}});
  }

  Expr parse_unary() {
    if (accept_keyword("not")) return negate(parse_unary());
    if (accept_char('(')) {
      Expr inner = parse_or();
      expect_char(')');
      return inner;
    }
    return parse_atom();
  }

  Expr parse_atom() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string word = peek_word();
    if (word.empty()) fail(at, kAtomStarts, "expected a constraint");

    for (const auto& [name, field] : kFields) {
      if (word == name) {
        consume_word();
        return parse_compare(field);
      }
    }
    if (word == "day") {
      consume_word();
      expect_keyword("in");
      return parse_day_set();
    }
    if (word == "free") {
      consume_word();
      expect_char('(');
      std::string name = parse_string();
      expect_char(')');
      return person_free(std::move(name));
    }
    if (word == "all_free") {
      consume_word();
      return all_free();
    }
    if (word == "gap_before" || word == "gap_after") {
      consume_word();
      RelOp op = parse_relop();
      int minutes = parse_int();
      if (peek_word() != "m") fail(pos_, {"m"}, "expected minute unit");
      consume_word();
      return gap(word == "gap_before" ? GapSide::kBefore : GapSide::kAfter, op, minutes);
    }
    if (word == "avoid") {
      consume_word();
      expect_char('(');
      skip_ws();
      std::size_t start_at = pos_;
      int start = parse_clock();
      expect_char('-');
      int end = parse_clock();
      expect_char(')');
      if (start >= end) type_fail(start_at, "avoid window must start before it ends");
      return avoid(start, end);
    }
    if (word == "within_days") {
      consume_word();
      expect_char('(');
      int days = parse_int();
      expect_char(')');
      return within_days(days);
    }
    if (word == "on") {
      consume_word();
      expect_char('(');
      std::int64_t day = parse_date();
      expect_char(')');
      return on_date(day);
    }
    fail(at, kAtomStarts, "unknown constraint keyword '" + word + "'");
  }

  Expr parse_compare(Field field) {
    RelOp op = parse_relop();
    skip_ws();
    const std::size_t lit_at = pos_;
    if (pos_ >= src_.size() || !is_digit(src_[pos_])) {
      fail(lit_at, {"integer", "HH:MM"}, "expected a literal");
    }
    std::size_t scan = pos_;
    while (scan < src_.size() && is_digit(src_[scan])) ++scan;
    const bool is_clock = scan < src_.size() && src_[scan] == ':';
    if (is_clock_field(field) && !is_clock) {
      type_fail(lit_at, std::string(to_string(field)) + " compares against a clock literal (HH:MM)");
    }
    if (!is_clock_field(field) && is_clock) {
      type_fail(lit_at, std::string(to_string(field)) + " compares against an integer");
    }
    int value = is_clock ? parse_clock() : parse_int();
    return compare(field, op, value);
  }

  RelOp parse_relop() {
    skip_ws();
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_op_char(src_[end])) ++end;
    const auto text = src_.substr(pos_, end - pos_);
    for (const auto& [name, op] : kRelOps) {
      if (text == name) {
        pos_ = end;
        return op;
      }
    }
    fail(at, kRelOpNames,
         text.empty() ? "expected a comparison operator"
                      : "invalid operator '" + std::string(text) + "'");
  }

  int parse_int() {
    skip_ws();
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end == at) fail(at, {"integer"}, "expected an integer");
    int value = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, value);
    if (ec != std::errc{} || value > 1'000'000) type_fail(at, "integer literal out of range");
    pos_ = end;
    return value;
  }

  int parse_clock() {
    skip_ws();
    const std::size_t at = pos_;
    auto digits = [&](std::size_t from) {
      std::size_t e = from;
      while (e < src_.size() && is_digit(src_[e])) ++e;
      return e;
    };
    std::size_t h_end = digits(pos_);
    if (h_end == pos_ || h_end - pos_ > 2 || h_end >= src_.size() || src_[h_end] != ':') {
      fail(at, {"HH:MM"}, "expected a clock time");
    }
    std::size_t m_end = digits(h_end + 1);
    if (m_end - (h_end + 1) != 2) fail(at, {"HH:MM"}, "expected a clock time");
    int h = 0, m = 0;
    std::from_chars(src_.data() + pos_, src_.data() + h_end, h);
    std::from_chars(src_.data() + h_end + 1, src_.data() + m_end, m);
    if (m > 59 || h > 24 || (h == 24 && m != 0)) type_fail(at, "clock time out of range");
    pos_ = m_end;
    return h * 60 + m;
  }

  std::int64_t parse_date() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ + 10 > src_.size()) fail(at, {"YYYY-MM-DD"}, "expected a date");
    try {
      Instant day = Instant::parse_date(src_.substr(pos_, 10));
      pos_ += 10;
      return day.day_number();
    } catch (const Error&) {
      fail(at, {"YYYY-MM-DD"}, "expected a date");
    }
  }

  std::string parse_string() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size() || src_[pos_] != '"') fail(at, {"\""}, "expected a quoted name");
    ++pos_;
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      out.push_back(src_[pos_++]);
    }
    if (pos_ >= src_.size()) fail(at, {"\""}, "unterminated string");
    ++pos_;
    if (out.empty()) type_fail(at, "empty person name");
    return out;
  }

  Expr parse_day_set() {
    expect_char('{');
    std::uint8_t days = 0;
    do {
      skip_ws();
      const std::size_t at = pos_;
      const std::string w = peek_word();
      int idx = -1;
      for (int i = 0; i < 7; ++i) {
        if (w == lower(weekday_abbrev(static_cast<Weekday>(i)))) idx = i;
      }
      if (idx < 0) {
        fail(at, {"MON", "TUE", "WED", "THU", "FRI", "SAT", "SUN"}, "expected a weekday");
      }
      consume_word();
      days |= static_cast<std::uint8_t>(1u << idx);
    } while (accept_char(','));
    expect_char('}');
    return day_in(days);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) {
  Parser p(source);
  try {
    return p.parse_all();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    // Builder invariant violations surface as type errors without a location.
    throw ParseError(ErrorCode::kTypeError, source.size(), {}, e.what());
  }
}

}  // namespace meetmate::dsl
