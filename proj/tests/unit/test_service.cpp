#include "meetmate/io.hpp"
#include "meetmate/service.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <set>
#include <sstream>
#include <thread>

using namespace meetmate;
using namespace meetmate::service;

namespace {

Json golden_request() { return mmtest::read_json(mmtest::fixture_path("golden_request.json")); }

Engine make_engine(const std::filesystem::path& dir) {
  return Engine(mmtest::golden_universe(), dir, Components::offline());
}

// Runs an HttpService on a free port for the lifetime of the object.
struct LiveServer {
  explicit LiveServer(Engine& engine) : http(engine) {
    port = http.bind("127.0.0.1", 0);
    thread = std::thread([this] { http.listen(); });
  }
  ~LiveServer() {
    http.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_connection_timeout(5);
    c.set_read_timeout(30);
    return c;
  }

  HttpService http;
  int port = 0;
  std::thread thread;
};

struct Call {
  int status = 0;
  Json body;
};

Call post(httplib::Client& c, const std::string& path, const std::string& body) {
  auto res = c.Post(path, body, "application/json");
  REQUIRE(res);
  return {res->status, res->body.empty() ? Json() : Json::parse(res->body)};
}

Call get(httplib::Client& c, const std::string& path) {
  auto res = c.Get(path);
  REQUIRE(res);
  return {res->status, Json::parse(res->body)};
}

std::string golden_session_text() {
  return read_text_file(mmtest::golden_path("conversation_session.json"));
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("error codes map to HTTP statuses") {
    CHECK(http_status(ErrorCode::kInvalidArgument) == 400);
    CHECK(http_status(ErrorCode::kInvalidDuration) == 400);
    CHECK(http_status(ErrorCode::kInvalidIndex) == 400);
    CHECK(http_status(ErrorCode::kNotFound) == 404);
    CHECK(http_status(ErrorCode::kUnknownConstraint) == 404);
    CHECK(http_status(ErrorCode::kSessionClosed) == 409);
    CHECK(http_status(ErrorCode::kEmptyGrid) == 409);
    CHECK(http_status(ErrorCode::kUnknownPerson) == 422);
    CHECK(http_status(ErrorCode::kIo) == 500);
    const auto body = error_body(Error(ErrorCode::kNotFound, "gone"));
    CHECK(body.at("code") == "not-found");
    CHECK(body.at("message") == "gone");
  }

  TEST_CASE("store ids continue after a restart") {
    const auto dir = mmtest::scratch_dir("store");
    {
      auto engine = make_engine(dir);
      CHECK(engine.create_session(golden_request()).at("session_id") == "s0001");
      CHECK(engine.create_session(golden_request()).at("session_id") == "s0002");
    }
    SessionStore store(dir);
    CHECK(store.exists("s0002"));
    CHECK_FALSE(store.exists("s0003"));
    CHECK_FALSE(store.exists("../etc"));
    CHECK(store.next_id() == "s0003");
    CHECK(store.load("s0001").request.attendees.size() == 4);
    CHECK_THROWS_AS(store.load("s0042"), Error);
  }

  TEST_CASE("engine defaults k and rejects a zero default") {
    const auto dir = mmtest::scratch_dir("engine-k");
    CHECK_THROWS_AS(Engine(mmtest::golden_universe(), dir, Components::offline(), 0), Error);
    Engine engine(mmtest::golden_universe(), dir, Components::offline(), 3);
    auto req = golden_request();
    req.erase("k");
    CHECK(engine.create_session(req).at("suggestions").size() == 3);
  }

  TEST_CASE("engine persists every turn and the booked meeting") {
    const auto dir = mmtest::scratch_dir("engine");
    {
      auto engine = make_engine(dir);
      const auto id = engine.create_session(golden_request()).at("session_id").get<std::string>();
      const auto reply = engine.post_message(id, "Let's meet before 11am.");
      REQUIRE(reply.at("constraints").size() == 1);
      CHECK(reply.at("constraints")[0].at("dsl_source") == "start.hour < 11");
      CHECK(reply.at("suggestions").size() == 2);
      CHECK(engine.get_session(id).at("constraints").size() == 1);

      const auto booked = engine.schedule(id, 0);
      CHECK(booked.at("status") == "scheduled");
      CHECK(booked.at("start") == "2024-03-04T08:30");
      CHECK(booked.at("end") == "2024-03-04T09:00");
      CHECK_THROWS_AS(engine.post_message(id, "Another thought."), Error);
    }
    // A restarted engine sees the meeting even when handed the original universe.
    auto engine = make_engine(dir);
    const auto fb = engine.freebusy("p03", "2024-03-04T00:00", "2024-03-05T00:00");
    REQUIRE(fb.at("busy").size() == 2);
    CHECK(fb.at("busy")[0] == Json{{"start", "2024-03-04T08:30"}, {"end", "2024-03-04T09:00"}});
  }

  TEST_CASE("concurrent session creation hands out distinct ids") {
    const auto dir = mmtest::scratch_dir("concurrent");
    auto engine = make_engine(dir);
    std::vector<std::thread> threads;
    std::vector<std::string> ids(8);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      threads.emplace_back([&, i] {
        ids[i] = engine.create_session(golden_request()).at("session_id").get<std::string>();
      });
    }
    for (auto& t : threads) t.join();
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
  }

  TEST_CASE("HTTP routes and status codes") {
    const auto dir = mmtest::scratch_dir("http");
    auto engine = make_engine(dir);
    LiveServer server(engine);
    auto c = server.client();

    auto r = post(c, "/sessions", golden_request().dump());
    CHECK(r.status == 201);
    CHECK(r.body.at("session_id") == "s0001");
    CHECK(r.body.at("suggestions").size() == 2);
    CHECK(r.body.at("constraints") == Json::array());
    for (const auto& s : r.body.at("suggestions")) {
      CHECK(s.contains("start"));
      CHECK(s.contains("end"));
      CHECK(s.contains("explanation"));
    }

    CHECK(post(c, "/sessions", "{not json").status == 400);
    auto bad = golden_request();
    bad["duration_minutes"] = 20;
    CHECK(post(c, "/sessions", bad.dump()).status == 400);
    bad = golden_request();
    bad["attendees"].push_back("p99");
    r = post(c, "/sessions", bad.dump());
    CHECK(r.status == 422);
    CHECK(r.body.at("code") == "unknown-person");

    r = post(c, "/sessions/s0001/messages", R"({"text": "Let's meet before 11am."})");
    CHECK(r.status == 200);
    CHECK(r.body.at("constraints")[0].at("id") == "c1");
    CHECK(post(c, "/sessions/s0001/messages", R"({"txt": "x"})").status == 400);
    CHECK(post(c, "/sessions/s0404/messages", R"({"text": "hi"})").status == 404);

    r = post(c, "/sessions/s0001/messages", R"({"text": "Why is that the best time?"})");
    CHECK(r.status == 200);
    CHECK(r.body.contains("message"));

    const auto doc = get(c, "/sessions/s0001");
    CHECK(doc.status == 200);
    CHECK(doc.body == Json::parse(read_text_file((dir / "s0001.json").string())));
    CHECK(get(c, "/sessions/nope").status == 404);

    CHECK(post(c, "/sessions/s0001/schedule", R"({"suggestion_index": 7})").status == 400);
    CHECK(post(c, "/sessions/s0001/schedule", R"({"suggestion_index": -1})").status == 400);
    CHECK(post(c, "/sessions/s0001/schedule", R"({"index": 0})").status == 400);
    r = post(c, "/sessions/s0001/schedule", R"({"suggestion_index": 1})");
    CHECK(r.status == 200);
    CHECK(r.body.at("status") == "scheduled");
    CHECK(post(c, "/sessions/s0001/schedule", R"({"suggestion_index": 0})").status == 409);
    CHECK(post(c, "/sessions/s0001/messages", R"({"text": "hello"})").status == 409);
  }

  TEST_CASE("HTTP free/busy returns merged intervals only") {
    const auto dir = mmtest::scratch_dir("http-fb");
    auto engine = make_engine(dir);
    LiveServer server(engine);
    auto c = server.client();

    auto r = get(c, "/universe/freebusy?person=p06&from=2024-03-04T00:00&to=2024-03-05T00:00");
    CHECK(r.status == 200);
    CHECK(r.body == Json{{"person", "p06"},
                         {"busy", Json::array({Json{{"start", "2024-03-04T12:00"},
                                                    {"end", "2024-03-04T13:00"}}})}});

    r = get(c, "/universe/freebusy?person=p02&from=2024-03-04T09:00&to=2024-03-05T09:00");
    CHECK(r.status == 200);
    REQUIRE(r.body.at("busy").size() == 3);
    CHECK(r.body.at("busy")[0].at("start") == "2024-03-04T08:00");
    for (const auto& b : r.body.at("busy")) CHECK(b.size() == 2);

    CHECK(get(c, "/universe/freebusy?person=p02&from=2024-03-04T00:00").status == 400);
    CHECK(get(c, "/universe/freebusy?person=p02&from=yesterday&to=2024-03-05T00:00").status == 400);
    CHECK(get(c, "/universe/freebusy?person=p02&from=2024-03-05T00:00&to=2024-03-04T00:00").status ==
          400);
    CHECK(get(c, "/universe/freebusy?person=p77&from=2024-03-04T00:00&to=2024-03-05T00:00").status ==
          404);
  }

  TEST_CASE("the golden conversation over HTTP persists the golden session") {
    const auto dir = mmtest::scratch_dir("http-golden");
    auto engine = make_engine(dir);
    LiveServer server(engine);
    auto c = server.client();
    const auto id = post(c, "/sessions", golden_request().dump()).body.at("session_id").get<std::string>();
    for (const auto& m : mmtest::golden_messages()) {
      CHECK(post(c, "/sessions/" + id + "/messages", Json{{"text", m}}.dump()).status == 200);
    }
    CHECK(post(c, "/sessions/" + id + "/schedule", R"({"suggestion_index": 0})").status == 200);
    CHECK(read_text_file((dir / (id + ".json")).string()) == golden_session_text());
  }

  TEST_CASE("the REPL transcript and persisted session are golden") {
    const auto dir = mmtest::scratch_dir("repl");
    auto engine = make_engine(dir);
    std::string script;
    for (const auto& m : mmtest::golden_messages()) script += m + "\n";
    script += ":show\n:schedule 1\n";
    std::istringstream in(script);
    std::ostringstream out;
    CHECK(run_repl(engine, golden_request(), in, out) == 0);
    CHECK(mmtest::matches_golden("repl_transcript.txt", out.str()));
    CHECK(read_text_file((dir / "s0001.json").string()) == golden_session_text());
  }

  TEST_CASE("REPL commands and input errors") {
    const auto dir = mmtest::scratch_dir("repl-cmds");
    auto engine = make_engine(dir);
    std::istringstream in(":schedule\n:schedule 0\n:schedule 9\n:quit\nignored\n");
    std::ostringstream out;
    CHECK(run_repl(engine, golden_request(), in, out) == 0);
    const auto text = out.str();
    CHECK(text.find("usage: :schedule N") != std::string::npos);
    CHECK(text.find("suggestions are numbered from 1") != std::string::npos);
    CHECK(text.find("error: ") != std::string::npos);
    CHECK(text.ends_with("bye\n"));

    std::istringstream eof("");
    std::ostringstream out2;
    CHECK(run_repl(engine, golden_request(), eof, out2) == 0);
    CHECK(out2.str().find("session s0002") != std::string::npos);

    auto bad = golden_request();
    bad["organizer"] = "nobody";
    std::istringstream none("");
    std::ostringstream out3;
    CHECK(run_repl(engine, bad, none, out3) == 1);
  }
}
