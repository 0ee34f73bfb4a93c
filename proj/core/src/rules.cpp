// Offline stand-ins for the language-model components: the keyword
// capability checker, the rule-based coder and the mock translator.

#include "meetmate/io.hpp"
#include "meetmate/session.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace meetmate::session {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

bool is_word_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '\'';
}

// Whole-word (or whole-phrase) occurrence in already-lowercased text.
bool has_word(const std::string& text, const std::string& word) {
  if (word.empty()) return false;
  for (std::size_t pos = text.find(word); pos != std::string::npos;
       pos = text.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(text[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right = end == text.size() || !is_word_char(text[end]);
    if (left && right) return true;
  }
  return false;
}

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (is_word_char(ch)) {
      cur += ch;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string clock_text(int minutes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

std::string quoted(const std::string& name) {
  std::string out = "\"";
  for (char ch : name) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

// ---- time expressions ---------------------------------------------------

const std::string kClock =
    R"((noon|midday|(\d{1,2})(?::(\d{2}))?\s*(a\.?m\.?|p\.?m\.?)?))";

// Minutes since midnight for a clock match; bare hours up to 7 read as pm.
std::optional<int> clock_minutes(const std::smatch& m, std::size_t base) {
  if (m[base].matched && (m[base].str() == "noon" || m[base].str() == "midday")) return 12 * 60;
  if (!m[base + 1].matched) return std::nullopt;
  int hour = std::stoi(m[base + 1].str());
  const int minute = m[base + 2].matched ? std::stoi(m[base + 2].str()) : 0;
  const std::string suffix = m[base + 3].matched ? m[base + 3].str() : "";
  if (hour > 23 || minute > 59) return std::nullopt;
  if (!suffix.empty() && suffix[0] == 'p' && hour < 12) hour += 12;
  if (!suffix.empty() && suffix[0] == 'a' && hour == 12) hour = 0;
  if (suffix.empty() && hour >= 1 && hour <= 7) hour += 12;
  return hour * 60 + minute;
}

std::string start_before(int minutes) {
  if (minutes % 60 == 0) return "start.hour < " + std::to_string(minutes / 60);
  return "start.time < " + clock_text(minutes);
}

// "no earlier than 9" and "not before 9" bound the start from below.
std::string normalize_bounds(std::string t) {
  static const std::regex lower_bound(R"(\b(?:no earlier than|not before|not earlier than)\b)");
  static const std::regex upper_bound(R"(\b(?:not after|not later than)\b)");
  t = std::regex_replace(t, lower_bound, "after");
  return std::regex_replace(t, upper_bound, "before");
}

void time_atoms(const std::string& raw, std::vector<std::string>& atoms) {
  const std::string t = normalize_bounds(raw);
  static const std::regex between("between\\s+" + kClock + "\\s+(?:and|to|-)\\s+" + kClock);
  static const std::regex end_by(
      "(?:end|ends|ending|finish|finished|finishes|done|over|wrap(?:ped)? up|out)\\s+"
      "(?:by|before|no later than)\\s+" +
      kClock);
  static const std::regex before(
      "(?:before|earlier than|no later than|until|till|by)\\s+" + kClock);
  static const std::regex after(
      "(?:after|later than|from|starting at|start at|starts at)\\s+" + kClock);
  static const std::regex at("(?:^|\\s)at\\s+" + kClock);

  std::smatch m;
  if (std::regex_search(t, m, between)) {
    auto a = clock_minutes(m, 1);
    auto b = clock_minutes(m, 5);
    if (a && b) {
      atoms.push_back("start.time >= " + clock_text(*a));
      atoms.push_back("end.time <= " + clock_text(*b));
      return;
    }
  }
  bool ended = false;
  if (std::regex_search(t, m, end_by)) {
    if (auto v = clock_minutes(m, 1)) {
      atoms.push_back("end.time <= " + clock_text(*v));
      ended = true;
    }
  }
  if (!ended && std::regex_search(t, m, before)) {
    if (auto v = clock_minutes(m, 1)) atoms.push_back(start_before(*v));
  }
  if (std::regex_search(t, m, after)) {
    if (auto v = clock_minutes(m, 1)) atoms.push_back("start.time >= " + clock_text(*v));
  }
  if (atoms.empty() && std::regex_search(t, m, at)) {
    if (auto v = clock_minutes(m, 1)) atoms.push_back("start.time == " + clock_text(*v));
  }
}

bool negated_context(const std::string& t) {
  static const char* const kCues[] = {"not ",    "no meeting", "no-meeting", "avoid",
                                      "except",  "can't",      "cannot",     "don't",
                                      "isn't",   "off on",     "out on",     "out of office",
                                      "away on", "unavailable", "never",     "no calls",
                                      "anything but", "other than"};
  return std::any_of(std::begin(kCues), std::end(kCues),
                     [&](const char* cue) { return contains(t, cue); });
}

void day_part_atoms(const std::string& t, std::vector<std::string>& atoms) {
  const bool neg = negated_context(t);
  if (has_word(t, "lunch") || has_word(t, "lunchtime")) {
    if (contains(t, "over lunch") || contains(t, "during lunch") || contains(t, "at lunch") ||
        contains(t, "lunch meeting")) {
      atoms.push_back("start.time >= 11:30 and end.time <= 13:30");
    } else {
      atoms.push_back("avoid(12:00-13:00)");
    }
  }
  if (has_word(t, "morning") || has_word(t, "mornings")) {
    atoms.push_back(neg ? "start.hour >= 12" : "start.hour < 12");
  } else if (has_word(t, "afternoon") || has_word(t, "afternoons")) {
    atoms.push_back(neg ? "start.hour < 12" : "start.hour >= 12");
  } else if (has_word(t, "evening") || contains(t, "end of the day") ||
             contains(t, "late in the day")) {
    atoms.push_back(neg ? "start.hour < 16" : "start.hour >= 16");
  } else if (contains(t, "first thing") || contains(t, "early in the day")) {
    atoms.push_back(neg ? "start.hour >= 10" : "start.hour < 10");
  }
}

void weekday_atoms(const std::string& t, std::vector<std::string>& atoms) {
  static const char* const kNames[] = {"monday", "tuesday",  "wednesday", "thursday",
                                       "friday", "saturday", "sunday"};
  std::vector<std::string> days;
  for (int i = 0; i < 7; ++i) {
    const std::string name = kNames[i];
    if (has_word(t, name) || has_word(t, name + "s")) {
      days.emplace_back(weekday_abbrev(static_cast<Weekday>(i)));
    }
  }
  if (days.empty()) {
    if (has_word(t, "weekend") || has_word(t, "weekends")) {
      days = {"SAT", "SUN"};
    } else if (has_word(t, "weekday") || has_word(t, "weekdays")) {
      days = {"MON", "TUE", "WED", "THU", "FRI"};
    } else {
      return;
    }
  }
  std::string set = "day in {";
  for (std::size_t i = 0; i < days.size(); ++i) set += (i ? ", " : "") + days[i];
  set += "}";
  atoms.push_back(negated_context(t) ? "not " + set : set);
}

void attendance_atoms(const std::string& t, const CoderContext& ctx,
                      std::vector<std::string>& atoms) {
  if (has_word(t, "everyone") || has_word(t, "everybody") || contains(t, "all attendees") ||
      contains(t, "all of us") || contains(t, "whole team") || contains(t, "all participants")) {
    atoms.push_back("all_free");
    return;
  }
  for (const auto& name : ctx.attendee_names) {
    const std::string full = lower(name);
    const std::string first = lower(name.substr(0, name.find(' ')));
    if (has_word(t, full) || has_word(t, first) || has_word(t, first + "'s")) {
      atoms.push_back("free(" + quoted(name) + ")");
    }
  }
}

void gap_atoms(const std::string& t, std::vector<std::string>& atoms) {
  static const std::regex amount(
      R"((\d+)\s*(?:-\s*)?(minutes?|mins?|m|hours?|hrs?)\b)");
  const bool gapish = has_word(t, "break") || has_word(t, "gap") || has_word(t, "buffer") ||
                      contains(t, "breather") || contains(t, "back-to-back") ||
                      contains(t, "back to back");
  if (!gapish) return;
  int minutes = 15;
  std::smatch m;
  if (std::regex_search(t, m, amount)) {
    minutes = std::stoi(m[1].str());
    if (m[2].str()[0] == 'h') minutes *= 60;
  }
  const bool before = has_word(t, "before");
  const bool after = has_word(t, "after");
  const std::string n = std::to_string(minutes) + "m";
  if (before && !after) {
    atoms.push_back("gap_before >= " + n);
  } else if (after && !before) {
    atoms.push_back("gap_after >= " + n);
  } else {
    atoms.push_back("gap_before >= " + n + " and gap_after >= " + n);
  }
}

void horizon_atoms(const std::string& t, std::vector<std::string>& atoms) {
  static const std::regex within(
      R"((?:within|in|during)\s+(?:the\s+)?(?:next\s+)?(\d+)\s+(?:business\s+|working\s+|calendar\s+)?days?)");
  std::smatch m;
  if (std::regex_search(t, m, within)) {
    atoms.push_back("within_days(" + m[1].str() + ")");
  } else if (has_word(t, "tomorrow")) {
    atoms.push_back(negated_context(t) ? "day_index != 1" : "day_index == 1");
  } else if (has_word(t, "today")) {
    atoms.push_back(negated_context(t) ? "day_index != 0" : "day_index == 0");
  } else if (has_word(t, "asap") || contains(t, "as soon as possible")) {
    atoms.push_back("within_days(1)");
  }
}

// ---- translator helpers -------------------------------------------------

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    cur += ch;
    if (ch == '.' || ch == '!' || ch == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] == ' ') ++j;
      const bool boundary =
          i + 1 == text.size() ||
          (j > i + 1 && j < text.size() && std::isupper(static_cast<unsigned char>(text[j])));
      if (boundary) {
        if (auto s = trim(cur); !s.empty()) out.push_back(s);
        cur.clear();
      }
    }
  }
  if (auto s = trim(cur); !s.empty()) out.push_back(s);
  return out;
}

int seq_of(const std::string& id) {
  if (id.size() > 1 && id[0] == 'c') {
    try {
      return std::stoi(id.substr(1));
    } catch (const std::exception&) {
    }
  }
  return 0;
}

const std::set<std::string>& stop_words() {
  static const std::set<std::string> kWords = {
      "the",   "and",     "for",    "with",   "that",   "this",    "need",    "needs",
      "needed", "must",   "has",    "have",   "meeting", "meetings", "meet",  "something",
      "really", "should", "please", "want",   "would",  "like",    "make",    "sure",
      "can",   "will",    "our",    "you",    "are",    "all",     "not",     "it's",
      "its",   "time",    "before", "after",  "between", "during", "around",  "from",
      "until", "there",   "here",   "absolutely", "definitely", "important", "them",
      "him",   "her",     "they",   "join",   "attend", "come",    "able",    "his",
      "hers",  "just",    "also",   "still",  "actually", "one"};
  return kWords;
}

bool is_query(const std::string& t) {
  auto w = words_of(t);
  if (w.empty()) return false;
  if (w[0] == "why") return true;
  if (w[0] == "what") return !(w.size() > 1 && w[1] == "about");
  return false;
}

}  // namespace

CapabilityConfig CapabilityConfig::defaults() {
  return CapabilityConfig{{
      {"facility", {"room", "building", "conference room"}},
      {"weather", {"sunny", "rain", "weather"}},
      {"travel", {"commute", "drive", "transit"}},
      {"external-person", {"timezone of"}},
  }};
}

CapabilityConfig CapabilityConfig::from_json(const Json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "capability config must be a JSON object");
  }
  CapabilityConfig cfg;
  for (const auto& [name, phrases] : doc.items()) {
    std::vector<std::string> list;
    for (const auto& p : phrases) {
      auto phrase = p.get<std::string>();
      if (!phrase.empty()) list.push_back(std::move(phrase));
    }
    if (!list.empty()) cfg.unsupported_classes.emplace_back(name, std::move(list));
  }
  if (cfg.unsupported_classes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "capability config defines no trigger phrases");
  }
  return cfg;
}

CapabilityConfig CapabilityConfig::load(const std::string& path) {
  try {
    return from_json(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

CheckResult info_check(std::string_view nl_text, const CapabilityConfig& config) {
  const std::string t = lower(nl_text);
  for (const auto& [name, phrases] : config.unsupported_classes) {
    for (const auto& phrase : phrases) {
      if (contains(t, lower(phrase))) {
        return CheckResult{false,
                           "this depends on " + name +
                               " information, which free/busy calendars do not provide "
                               "(matched \"" + phrase + "\").",
                           name};
      }
    }
  }
  return CheckResult{true, "the preference only needs meeting times and free/busy data.", ""};
}

std::string RuleCoder::code(std::string_view nl_text, const CoderContext& context) const {
  const std::string t = lower(nl_text);
  std::vector<std::string> atoms;
  time_atoms(t, atoms);
  day_part_atoms(t, atoms);
  weekday_atoms(t, atoms);
  attendance_atoms(t, context, atoms);
  gap_atoms(t, atoms);
  horizon_atoms(t, atoms);
  if (atoms.empty()) {
    throw Error(ErrorCode::kCoderFailure,
                "no recognizable time, day, attendee or spacing condition");
  }
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) out += " and ";
    out += atoms.size() > 1 && contains(atoms[i], " and ") ? "(" + atoms[i] + ")" : atoms[i];
  }
  return out;
}

std::vector<Action> MockTranslator::translate(const Session& session, std::string_view user_text,
                                              const FreeBusyView& directory) const {
  // Constraint ids still present while the batch is being built, oldest first.
  std::vector<const solver::PrioritizedConstraint*> live;
  for (const auto& c : session.constraints) live.push_back(&c);
  std::sort(live.begin(), live.end(),
            [](const auto* a, const auto* b) { return seq_of(a->id) < seq_of(b->id); });

  std::vector<std::string> attendee_names;
  for (const auto& a : session.request.attendees) {
    if (directory.has_person(a)) attendee_names.push_back(directory.name_of(a));
  }

  std::vector<Action> actions;
  for (const auto& sentence : split_sentences(user_text)) {
    const std::string t = lower(sentence);

    if (contains(t, "never mind") || contains(t, "nevermind") || has_word(t, "undo") ||
        contains(t, "remove that")) {
      if (live.empty()) {
        actions.push_back(MessageUser{"There is no preference to remove yet."});
      } else {
        actions.push_back(DeleteConstraint{live.back()->id});
        live.pop_back();
      }
      continue;
    }

    if (has_word(t, "must") || contains(t, "need") || has_word(t, "has to")) {
      const solver::PrioritizedConstraint* target = nullptr;
      for (const auto& name : attendee_names) {
        const std::string full = lower(name);
        const std::string first = lower(name.substr(0, name.find(' ')));
        if (!has_word(t, full) && !has_word(t, first)) continue;
        for (const auto* c : live) {
          const auto refs = dsl::referenced_names(c->expr);
          const std::string text = lower(c->nl_text);
          if (refs.contains(name) || has_word(text, full) || has_word(text, first)) {
            target = c;
            break;
          }
        }
        if (target) break;
      }
      if (!target) {
        for (const auto& w : words_of(t)) {
          if (w.size() < 3 || stop_words().contains(w)) continue;
          for (const auto* c : live) {
            if (has_word(lower(c->nl_text), w)) {
              target = c;
              break;
            }
          }
          if (target) break;
        }
      }
      if (target) {
        actions.push_back(ChangePriority{target->id, 0});
        continue;
      }
    }

    if (contains(t, "if possible") || has_word(t, "ideally") || contains(t, "would be nice")) {
      actions.push_back(AddConstraint{sentence, RankHint::bottom()});
      continue;
    }

    if (is_query(t)) {
      actions.push_back(MessageUser{
          "I suggest times from everyone's free/busy calendars. You can ask for times of "
          "day, weekdays, who must attend, breaks around other meetings, or how soon the "
          "meeting should happen, and say how important each preference is."});
      continue;
    }

    actions.push_back(AddConstraint{sentence, RankHint::top()});
  }
  return actions;
}

}  // namespace meetmate::session
