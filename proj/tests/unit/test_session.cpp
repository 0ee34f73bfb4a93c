#include "meetmate/session.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace meetmate;
using namespace meetmate::session;

namespace {

struct Fixture {
  Universe universe = mmtest::golden_universe();
  MeetingRequest request = request_from_json(mmtest::read_json(mmtest::fixture_path("golden_request.json")));
  RuleChecker checker;
  RuleCoder coder;
  MockTranslator translator;

  Session open() const { return open_session("s0001", request, universe); }
  Outcome say(const Session& s, const std::string& text) const {
    return handle_message(s, text, translator, universe, checker, coder);
  }
};

class FailingTranslator final : public Translator {
 public:
  explicit FailingTranslator(ErrorCode code) : code_(code) {}
  std::vector<Action> translate(const Session&, std::string_view, const FreeBusyView&) const override {
    throw Error(code_, "scripted failure");
  }

 private:
  ErrorCode code_;
};

class ThrowingChecker final : public InfoChecker {
 public:
  CheckResult check(std::string_view) const override {
    throw Error(ErrorCode::kTranslatorFailure, "no verdict");
  }
};

std::vector<std::string> ids_in_rank_order(const Session& s) {
  std::vector<std::string> out;
  for (const auto& c : s.constraints) out.push_back(c.id);
  return out;
}

void check_dense(const Session& s) {
  const auto n = s.constraints.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(s.constraints[i].rank == static_cast<int>(i));
    CHECK(s.constraints[i].weight == std::uint64_t{1} << (n - 1 - i));
  }
}

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("opening a session yields the initial suggestion") {
    Fixture f;
    const auto s = f.open();
    CHECK(s.status == Status::kOpen);
    CHECK(s.constraints.empty());
    CHECK(s.chat.empty());
    REQUIRE(s.last_suggestions.size() == 2);
    CHECK(s.last_suggestions[0].slot.start().to_iso() == "2024-03-04T11:00");
    CHECK(s.last_suggestions[0].score.to_u64() == 4);
  }

  TEST_CASE("invalid requests are rejected") {
    Fixture f;
    auto r = f.request;
    r.duration_minutes = 20;
    CHECK_THROWS_AS(open_session("x", r, f.universe), Error);
    r = f.request;
    r.attendees.push_back("p77");
    try {
      open_session("x", r, f.universe);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownPerson);
    }
    r = f.request;
    r.horizon = TimeSlot(Instant::parse_iso("2024-03-09T00:00"), Instant::parse_iso("2024-03-11T00:00"));
    try {
      open_session("x", r, f.universe);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptyGrid);
    }
  }

  TEST_CASE("the golden conversation") {
    Fixture f;
    auto s = f.open();
    const auto& msgs = mmtest::golden_messages();

    auto out = f.say(s, msgs[0]);
    s = out.session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c1"});
    CHECK(s.constraints[0].source == "start.hour < 11");
    REQUIRE(out.reply.suggestions);
    const auto after_first = *out.reply.suggestions;

    out = f.say(s, msgs[1]);
    s = out.session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c1", "c2"});
    CHECK(s.constraints[1].source == "free(\"Anton Novak\")");

    out = f.say(s, msgs[2]);
    s = out.session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c2", "c1"});
    check_dense(s);
    REQUIRE(out.reply.suggestions);
    CHECK(out.reply.suggestions->front().attendee_availability.at("p02"));

    out = f.say(s, msgs[3]);
    s = out.session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c1"});
    REQUIRE(out.reply.suggestions);
    REQUIRE(out.reply.suggestions->size() == after_first.size());
    for (std::size_t i = 0; i < after_first.size(); ++i) {
      CHECK(session::to_json((*out.reply.suggestions)[i]) == session::to_json(after_first[i]));
    }
    CHECK(s.turn == 4);
    CHECK(s.chat.size() == 8);
    CHECK(s.next_constraint_seq == 3);

    const auto booked = finalize(s, 0, f.universe);
    CHECK(booked.session.status == Status::kScheduled);
    CHECK(booked.universe.busy().size() == f.universe.busy().size() + 4);

    CHECK(mmtest::matches_golden("conversation_session.json",
                                 session::to_json(booked.session).dump(2) + "\n"));
  }

  TEST_CASE("replaying the conversation is deterministic") {
    auto run = [] {
      Fixture f;
      auto s = f.open();
      for (const auto& m : mmtest::golden_messages()) s = f.say(s, m).session;
      return session::to_json(finalize(s, 0, f.universe).session).dump(2);
    };
    CHECK(run() == run());
  }

  TEST_CASE("session json round trip") {
    Fixture f;
    auto s = f.open();
    for (const auto& m : mmtest::golden_messages()) s = f.say(s, m).session;
    const auto text = session::to_json(s).dump();
    const auto back = session_from_json(Json::parse(text));
    CHECK(session::to_json(back).dump() == text);
  }

  TEST_CASE("blank messages change nothing") {
    Fixture f;
    const auto s = f.open();
    for (const char* blank : {"", "   ", "\t\n"}) {
      const auto out = f.say(s, blank);
      CHECK(session::to_json(out.session) == session::to_json(s));
      REQUIRE(out.reply.message);
      CHECK_FALSE(out.reply.suggestions);
    }
  }

  TEST_CASE("unsupported preferences are declined without mutation") {
    Fixture f;
    const auto s = f.open();
    const auto out = f.say(s, "Book the big conference room.");
    CHECK(out.session.constraints.empty());
    CHECK(out.session.next_constraint_seq == 1);
    REQUIRE(out.reply.message);
    CHECK(out.reply.message->find("conference room") != std::string::npos);
    CHECK_FALSE(out.reply.suggestions);
    CHECK(out.session.turn == 1);
    CHECK(out.session.chat.back().speaker == "assistant");
  }

  TEST_CASE("translator failures become an apology") {
    Fixture f;
    const auto s = f.open();
    for (auto code : {ErrorCode::kTranslatorFailure, ErrorCode::kTransport, ErrorCode::kUnknownConstraint}) {
      FailingTranslator t(code);
      const auto out = handle_message(s, "before noon", t, f.universe, f.checker, f.coder);
      CHECK(out.session.constraints.empty());
      REQUIRE(out.reply.message);
      CHECK(out.reply.message->rfind("Sorry", 0) == 0);
      CHECK(out.session.chat.size() == 2);
    }
  }

  TEST_CASE("checker errors are reported, not thrown") {
    Fixture f;
    ThrowingChecker checker;
    const auto out = handle_message(f.open(), "before noon", f.translator, f.universe, checker, f.coder);
    CHECK(out.session.constraints.empty());
    REQUIRE(out.reply.message);
    CHECK(out.reply.message->find("couldn't check") != std::string::npos);
  }

  TEST_CASE("coder failures are reported") {
    Fixture f;
    const auto out = f.say(f.open(), "Make it a productive meeting.");
    CHECK(out.session.constraints.empty());
    REQUIRE(out.reply.message);
    CHECK(out.reply.message->find("couldn't turn") != std::string::npos);
  }

  TEST_CASE("dispatch is atomic") {
    Fixture f;
    auto s = f.say(f.open(), "before noon").session;
    const auto before = session::to_json(s);
    std::vector<Action> batch{AddConstraint{"on Tuesday", RankHint::top()}, DeleteConstraint{"c9"}};
    try {
      dispatch(s, batch, f.universe, f.checker, f.coder);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownConstraint);
    }
    CHECK(session::to_json(s) == before);
    CHECK_THROWS_AS(dispatch(s, {ChangePriority{"c7", 0}}, f.universe, f.checker, f.coder), Error);
  }

  TEST_CASE("ranks stay dense under random edits") {
    Fixture f;
    mmtest::mm::gen::Rng rng(12);
    const std::vector<std::string> texts = {"before 11am", "after 9am", "on Tuesday", "not on Monday",
                                            "Anton should attend", "not in the afternoon",
                                            "leave 15 minutes before"};
    for (int round = 0; round < 20; ++round) {
      auto s = f.open();
      for (int step = 0; step < 25; ++step) {
        std::vector<Action> batch;
        const auto kind = rng.uniform(0, 3);
        if (kind == 0 || s.constraints.empty()) {
          const auto& t = texts[static_cast<std::size_t>(rng.uniform(0, 6))];
          const auto h = rng.uniform(0, 2);
          batch.push_back(AddConstraint{t, h == 0 ? RankHint::top()
                                               : h == 1 ? RankHint::bottom()
                                                        : RankHint::at(static_cast<int>(rng.uniform(0, 9)))});
        } else {
          const auto& c = s.constraints[static_cast<std::size_t>(
              rng.uniform(0, static_cast<std::int64_t>(s.constraints.size()) - 1))];
          if (kind == 1) {
            batch.push_back(DeleteConstraint{c.id});
          } else {
            batch.push_back(ChangePriority{c.id, static_cast<int>(rng.uniform(0, 9))});
          }
        }
        s = dispatch(s, batch, f.universe, f.checker, f.coder).session;
        check_dense(s);
      }
    }
  }

  TEST_CASE("explicit ranks place the constraint") {
    Fixture f;
    auto s = f.open();
    s = dispatch(s, {AddConstraint{"before 11am", RankHint::top()},
                     AddConstraint{"on Tuesday", RankHint::bottom()},
                     AddConstraint{"after 9am", RankHint::at(1)}},
                 f.universe, f.checker, f.coder)
            .session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c1", "c3", "c2"});
    s = dispatch(s, {ChangePriority{"c1", 5}}, f.universe, f.checker, f.coder).session;
    CHECK(ids_in_rank_order(s) == std::vector<std::string>{"c3", "c2", "c1"});
  }

  TEST_CASE("adding then deleting restores the suggestions") {
    Fixture f;
    mmtest::mm::gen::Rng rng(3);
    const std::vector<std::string> texts = {"before 11am", "on Tuesday", "after 2pm", "Lauren should attend"};
    auto s = f.say(f.open(), "not on Monday").session;
    for (const auto& t : texts) {
      const auto added = dispatch(s, {AddConstraint{t, RankHint::top()}}, f.universe, f.checker, f.coder).session;
      const auto id = "c" + std::to_string(added.next_constraint_seq - 1);
      const auto removed = dispatch(added, {DeleteConstraint{id}}, f.universe, f.checker, f.coder);
      REQUIRE(removed.reply.suggestions);
      const auto again = dispatch(s, {GenerateSuggestion{}}, f.universe, f.checker, f.coder);
      CHECK(session::to_json(removed.session).at("last_suggestions") ==
            session::to_json(again.session).at("last_suggestions"));
    }
  }

  TEST_CASE("questions get a message and no suggestions") {
    Fixture f;
    const auto out = f.say(f.open(), "Why did you pick that time?");
    REQUIRE(out.reply.message);
    CHECK_FALSE(out.reply.suggestions);
    CHECK(out.session.constraints.empty());
  }

  TEST_CASE("closed sessions refuse messages and bookings") {
    Fixture f;
    const auto s = f.open();
    try {
      finalize(s, 5, f.universe);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidIndex);
    }
    const auto done = finalize(s, 1, f.universe).session;
    try {
      f.say(done, "before noon");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSessionClosed);
    }
    CHECK_THROWS_AS(finalize(done, 0, f.universe), Error);
  }

  TEST_CASE("assistant chat text lists the suggestions") {
    Fixture f;
    const auto out = f.say(f.open(), "Let's meet before 11am.");
    const auto& text = out.session.chat.back().text;
    CHECK(text.find("Suggestion 1: 2024-03-04T08:30 to 2024-03-04T09:00.") != std::string::npos);
  }

  TEST_CASE("request json") {
    Fixture f;
    const auto doc = to_json(f.request);
    CHECK(request_from_json(doc).attendees == f.request.attendees);
    auto bad = doc;
    bad["k"] = 0;
    CHECK_THROWS_AS(request_from_json(bad), Error);
    bad = doc;
    bad.erase("organizer");
    CHECK_THROWS_AS(request_from_json(bad), Error);
  }
}
