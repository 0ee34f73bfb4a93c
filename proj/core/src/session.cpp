#include "meetmate/session.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>

namespace meetmate::session {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string slot_text(const TimeSlot& slot) {
  return slot.start().to_iso() + " to " + slot.end().to_iso();
}

std::string reply_text(const Reply& reply) {
  std::string out;
  if (reply.message) out = *reply.message;
  if (reply.suggestions) {
    for (std::size_t i = 0; i < reply.suggestions->size(); ++i) {
      const auto& s = (*reply.suggestions)[i];
      if (!out.empty()) out += "\n";
      out += "Suggestion " + std::to_string(i + 1) + ": " + slot_text(s.slot) + ". " +
             s.explanation;
    }
  }
  return out;
}

std::vector<solver::PrioritizedConstraint>::iterator find_constraint(
    std::vector<solver::PrioritizedConstraint>& list, const std::string& id) {
  auto it = std::find_if(list.begin(), list.end(), [&](const auto& c) { return c.id == id; });
  if (it == list.end()) {
    throw Error(ErrorCode::kUnknownConstraint, "no constraint with id '" + id + "'");
  }
  return it;
}

int clamp_rank(int rank, std::size_t size) {
  return std::clamp(rank, 0, static_cast<int>(size));
}

void place(std::vector<solver::PrioritizedConstraint>& list, solver::PrioritizedConstraint c,
           int position) {
  list.insert(list.begin() + position, std::move(c));
  for (std::size_t i = 0; i < list.size(); ++i) list[i].rank = static_cast<int>(i);
  list = solver::assign_weights(std::move(list));
}

std::vector<solver::Suggestion> compute_suggestions(const Session& s, const Universe& universe) {
  auto view = std::make_shared<const FreeBusyView>(universe);
  auto grid = session_grid(s.request);
  auto ctx = session_context(s.request, view);
  return solver::suggest(grid, s.constraints, ctx, s.request.k);
}

}  // namespace

void validate(const MeetingRequest& request, const FreeBusyView& directory) {
  if (request.duration_minutes <= 0 || request.duration_minutes % kSlotStepMinutes != 0) {
    throw Error(ErrorCode::kInvalidDuration,
                "duration must be a positive multiple of 15 minutes, got " +
                    std::to_string(request.duration_minutes));
  }
  if (request.attendees.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "attendee list is empty");
  }
  if (request.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::set<std::string> seen;
  for (const auto& a : request.attendees) {
    if (!directory.has_person(a)) {
      throw Error(ErrorCode::kUnknownPerson, "unknown person '" + a + "'");
    }
    if (!seen.insert(a).second) {
      throw Error(ErrorCode::kInvalidArgument, "attendee '" + a + "' listed twice");
    }
  }
  if (!directory.has_person(request.organizer)) {
    throw Error(ErrorCode::kUnknownPerson, "unknown person '" + request.organizer + "'");
  }
  if (!seen.contains(request.organizer)) {
    throw Error(ErrorCode::kInvalidArgument, "organizer must be one of the attendees");
  }
}

Json to_json(const MeetingRequest& request) {
  return Json{{"organizer", request.organizer},
              {"attendees", request.attendees},
              {"duration_minutes", request.duration_minutes},
              {"horizon_start", request.horizon.start().to_iso()},
              {"horizon_end", request.horizon.end().to_iso()},
              {"k", request.k}};
}

MeetingRequest request_from_json(const Json& doc) {
  try {
    MeetingRequest r;
    r.organizer = doc.at("organizer").get<std::string>();
    r.attendees = doc.at("attendees").get<std::vector<std::string>>();
    r.duration_minutes = doc.at("duration_minutes").get<int>();
    r.horizon = TimeSlot(Instant::parse_iso(doc.at("horizon_start").get<std::string>()),
                         Instant::parse_iso(doc.at("horizon_end").get<std::string>()));
    if (doc.contains("k") && !doc.at("k").is_null()) {
      const auto k = doc.at("k").get<std::int64_t>();
      if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
      r.k = static_cast<std::size_t>(k);
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed meeting request: ") + e.what());
  }
}

TimeGrid session_grid(const MeetingRequest& request) {
  return enumerate_candidates(request.horizon, request.duration_minutes,
                              DailyWindow::business_hours());
}

dsl::EvalContext session_context(const MeetingRequest& request,
                                 std::shared_ptr<const FreeBusyView> view) {
  dsl::EvalContext ctx;
  ctx.organizer = request.organizer;
  ctx.attendees = request.attendees;
  ctx.duration_minutes = request.duration_minutes;
  ctx.free_busy = std::move(view);
  ctx.horizon_start = request.horizon.start();
  ctx.now = request.horizon.start();
  return ctx;
}

std::string describe(const Action& action) {
  return std::visit(
      Overloaded{
          [](const AddConstraint& a) {
            std::string hint = a.hint.kind == RankHint::Kind::kTop      ? "top"
                               : a.hint.kind == RankHint::Kind::kBottom ? "bottom"
                                                                        : std::to_string(a.hint.rank);
            return "ADD(" + a.nl_text + ", " + hint + ")";
          },
          [](const ChangePriority& a) {
            return "CHANGE_PRIORITY(" + a.constraint_id + ", " + std::to_string(a.rank) + ")";
          },
          [](const DeleteConstraint& a) { return "DELETE(" + a.constraint_id + ")"; },
          [](const MessageUser& a) { return "MESSAGE(" + a.text + ")"; },
          [](const GenerateSuggestion&) { return std::string("SUGGEST"); },
      },
      action);
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOpen: return "open";
    case Status::kScheduled: return "scheduled";
    case Status::kAbandoned: return "abandoned";
  }
  return "open";
}

Status status_from_string(std::string_view text) {
  if (text == "open") return Status::kOpen;
  if (text == "scheduled") return Status::kScheduled;
  if (text == "abandoned") return Status::kAbandoned;
  throw Error(ErrorCode::kInvalidArgument, "unknown session status '" + std::string(text) + "'");
}

Json to_json(const solver::Suggestion& s) {
  Json availability = Json::object();
  for (const auto& [id, free] : s.attendee_availability) availability[id] = free;
  Json score = s.score.fits_u64() ? Json(s.score.to_u64()) : Json(s.score.to_string());
  return Json{{"start", s.slot.start().to_iso()},
              {"end", s.slot.end().to_iso()},
              {"score", score},
              {"satisfied", s.satisfied},
              {"unsatisfied", s.unsatisfied},
              {"availability", availability},
              {"explanation", s.explanation}};
}

solver::Suggestion suggestion_from_json(const Json& doc) {
  const auto& score = doc.at("score");
  if (!score.is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidArgument, "suggestion score must be a 64-bit integer");
  }
  solver::Suggestion s{TimeSlot(Instant::parse_iso(doc.at("start").get<std::string>()),
                                Instant::parse_iso(doc.at("end").get<std::string>())),
                       Score::from_u64(score.get<std::uint64_t>()),
                       doc.at("satisfied").get<std::vector<std::string>>(),
                       doc.at("unsatisfied").get<std::vector<std::string>>(),
                       {},
                       doc.at("explanation").get<std::string>()};
  for (const auto& [id, free] : doc.at("availability").items()) {
    s.attendee_availability[id] = free.get<bool>();
  }
  return s;
}

Json to_json(const Session& session) {
  Json constraints = Json::array();
  for (const auto& c : session.constraints) {
    constraints.push_back(
        Json{{"id", c.id}, {"rank", c.rank}, {"nl_text", c.nl_text}, {"dsl_source", c.source}});
  }
  Json chat = Json::array();
  for (const auto& e : session.chat) {
    chat.push_back(Json{{"turn", e.turn}, {"speaker", e.speaker}, {"text", e.text}});
  }
  Json suggestions = Json::array();
  for (const auto& s : session.last_suggestions) suggestions.push_back(to_json(s));
  return Json{{"id", session.id},
              {"status", to_string(session.status)},
              {"request", to_json(session.request)},
              {"constraints", constraints},
              {"chat", chat},
              {"last_suggestions", suggestions},
              {"next_constraint_seq", session.next_constraint_seq},
              {"turn", session.turn}};
}

Session session_from_json(const Json& doc) {
  try {
    Session s;
    s.id = doc.at("id").get<std::string>();
    s.status = status_from_string(doc.at("status").get<std::string>());
    s.request = request_from_json(doc.at("request"));
    for (const auto& c : doc.at("constraints")) {
      s.constraints.push_back(solver::make_constraint(
          c.at("id").get<std::string>(), c.at("nl_text").get<std::string>(),
          c.at("dsl_source").get<std::string>(), c.at("rank").get<int>()));
    }
    s.constraints = solver::assign_weights(std::move(s.constraints));
    for (const auto& e : doc.at("chat")) {
      s.chat.push_back(ChatEntry{e.at("turn").get<int>(), e.at("speaker").get<std::string>(),
                                 e.at("text").get<std::string>()});
    }
    for (const auto& sug : doc.at("last_suggestions")) {
      s.last_suggestions.push_back(suggestion_from_json(sug));
    }
    s.next_constraint_seq = doc.at("next_constraint_seq").get<int>();
    s.turn = doc.at("turn").get<int>();
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed session: ") + e.what());
  }
}

CoderContext coder_context(const MeetingRequest& request, const FreeBusyView& directory) {
  CoderContext ctx;
  ctx.organizer_name = directory.name_of(request.organizer);
  ctx.attendee_names.push_back(ctx.organizer_name);
  for (const auto& a : request.attendees) {
    if (a != request.organizer) ctx.attendee_names.push_back(directory.name_of(a));
  }
  ctx.duration_minutes = request.duration_minutes;
  return ctx;
}

Json to_json(const Reply& reply) {
  Json out = Json::object();
  if (reply.message) out["message"] = *reply.message;
  if (reply.suggestions) {
    Json list = Json::array();
    for (const auto& s : *reply.suggestions) list.push_back(to_json(s));
    out["suggestions"] = list;
  }
  return out;
}

Session open_session(std::string id, MeetingRequest request, const Universe& universe) {
  auto view = std::make_shared<const FreeBusyView>(universe);
  validate(request, *view);
  Session s;
  s.id = std::move(id);
  s.request = std::move(request);
  auto grid = session_grid(s.request);
  auto ctx = session_context(s.request, view);
  s.last_suggestions = solver::initial_suggestion(grid, s.request.attendees, ctx, s.request.k);
  return s;
}

Outcome dispatch(const Session& session, const std::vector<Action>& actions,
                 const Universe& universe, const InfoChecker& checker, const Coder& coder) {
  Session next = session;
  FreeBusyView directory(universe);
  std::vector<std::string> messages;
  bool mutated = false;
  bool generate = false;

  for (const auto& action : actions) {
    std::visit(
        Overloaded{
            [&](const AddConstraint& a) {
              session::CheckResult verdict;
              try {
                verdict = checker.check(a.nl_text);
              } catch (const Error& e) {
                messages.push_back("I couldn't check whether \"" + a.nl_text +
                                   "\" can be handled: " + e.what());
                return;
              }
              if (!verdict.supported) {
                messages.push_back("I can't take \"" + a.nl_text +
                                   "\" into account: " + verdict.rationale);
                return;
              }
              if (next.constraints.size() >= solver::kMaxWeightedConstraints) {
                messages.push_back("I can't keep more than " +
                                   std::to_string(solver::kMaxWeightedConstraints) +
                                   " preferences for one meeting.");
                return;
              }
              std::string source;
              std::optional<solver::PrioritizedConstraint> made;
              try {
                source = coder.code(a.nl_text, coder_context(next.request, directory));
                const std::string id = "c" + std::to_string(next.next_constraint_seq);
                made = solver::make_constraint(id, a.nl_text, source);
                dsl::check_names(made->expr, directory);
              } catch (const Error& e) {
                messages.push_back("I couldn't turn \"" + a.nl_text +
                                   "\" into a constraint: " + e.what());
                return;
              }
              int position = 0;
              switch (a.hint.kind) {
                case RankHint::Kind::kTop: position = 0; break;
                case RankHint::Kind::kBottom:
                  position = static_cast<int>(next.constraints.size());
                  break;
                case RankHint::Kind::kExplicit:
                  position = clamp_rank(a.hint.rank, next.constraints.size());
                  break;
              }
              ++next.next_constraint_seq;
              place(next.constraints, std::move(*made), position);
              mutated = true;
            },
            [&](const ChangePriority& a) {
              auto it = find_constraint(next.constraints, a.constraint_id);
              auto moved = std::move(*it);
              next.constraints.erase(it);
              place(next.constraints, std::move(moved),
                    clamp_rank(a.rank, next.constraints.size()));
              mutated = true;
            },
            [&](const DeleteConstraint& a) {
              next.constraints.erase(find_constraint(next.constraints, a.constraint_id));
              next.constraints = solver::assign_weights(std::move(next.constraints));
              mutated = true;
            },
            [&](const MessageUser& a) { messages.push_back(a.text); },
            [&](const GenerateSuggestion&) { generate = true; },
        },
        action);
  }

  Reply reply;
  if (!messages.empty()) {
    std::string joined;
    for (const auto& m : messages) joined += (joined.empty() ? "" : "\n") + m;
    reply.message = joined;
  }
  if (mutated || generate) {
    next.last_suggestions = compute_suggestions(next, universe);
    reply.suggestions = next.last_suggestions;
  }
  return Outcome{std::move(next), std::move(reply)};
}

Outcome handle_message(const Session& session, std::string_view user_text,
                       const Translator& translator, const Universe& universe,
                       const InfoChecker& checker, const Coder& coder) {
  if (session.status != Status::kOpen) {
    throw Error(ErrorCode::kSessionClosed, "session " + session.id + " is already closed");
  }
  const bool blank = std::all_of(user_text.begin(), user_text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (blank) {
    Reply reply;
    reply.message = "Tell me a scheduling preference, for example \"before 11am\".";
    return Outcome{session, std::move(reply)};
  }

  Session base = session;
  base.turn += 1;
  base.chat.push_back(ChatEntry{base.turn, "user", std::string(user_text)});

  Outcome out{base, {}};
  const std::string apology = "Sorry, I couldn't process that message. Please try rephrasing it.";
  try {
    FreeBusyView directory(universe);
    auto actions = translator.translate(base, user_text, directory);
    out = dispatch(base, actions, universe, checker, coder);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTranslatorFailure && e.code() != ErrorCode::kUnknownConstraint &&
        e.code() != ErrorCode::kTransport) {
      throw;
    }
    out = Outcome{base, {}};
    out.reply.message = apology;
  }
  if (!out.reply.message && !out.reply.suggestions) {
    out.reply.message = "Noted. Nothing changed in the current plan.";
  }
  out.session.chat.push_back(ChatEntry{out.session.turn, "assistant", reply_text(out.reply)});
  return out;
}

Finalized finalize(const Session& session, std::size_t index, const Universe& universe) {
  if (session.status != Status::kOpen) {
    throw Error(ErrorCode::kSessionClosed, "session " + session.id + " is already closed");
  }
  if (index >= session.last_suggestions.size()) {
    throw Error(ErrorCode::kInvalidIndex,
                "suggestion index " + std::to_string(index) + " out of range (have " +
                    std::to_string(session.last_suggestions.size()) + ")");
  }
  Session next = session;
  next.status = Status::kScheduled;
  Universe updated = commit_meeting(universe, session.request.attendees,
                                    session.last_suggestions[index].slot);
  return Finalized{std::move(next), std::move(updated)};
}

}  // namespace meetmate::session
