#include "meetmate/service.hpp"

#include "meetmate/io.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

namespace meetmate::service {
namespace fs = std::filesystem;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidDuration:
    case ErrorCode::kInvalidIndex:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kTooManyConstraints:
    case ErrorCode::kParseError:
    case ErrorCode::kTypeError:
      return 400;
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownConstraint:
      return 404;
    case ErrorCode::kEmptyGrid:
    case ErrorCode::kSessionClosed:
      return 409;
    case ErrorCode::kUnknownPerson:
      return 422;
    default:
      return 500;
  }
}

Json error_body(const Error& error) {
  return Json{{"code", std::string(to_string(error.code()))}, {"message", error.what()}};
}

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create store " + dir_.string() + ": " + ec.message());
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.size() == 10 && name[0] == 's' && name.ends_with(".json")) {
      try {
        next_seq_ = std::max(next_seq_, std::stoi(name.substr(1, 4)) + 1);
      } catch (const std::exception&) {
      }
    }
  }
}

std::string SessionStore::next_id() {
  std::lock_guard lock(mu_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%04d", next_seq_++);
  return buf;
}

fs::path SessionStore::path_for(const std::string& id) const {
  const bool safe = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char ch) {
    return std::isalnum(ch) || ch == '-' || ch == '_';
  });
  if (!safe) throw Error(ErrorCode::kNotFound, "no session '" + id + "'");
  return dir_ / (id + ".json");
}

void SessionStore::save(const session::Session& session) {
  write_file_atomic(path_for(session.id).string(), session::to_json(session).dump(2) + "\n");
}

bool SessionStore::exists(const std::string& id) const {
  try {
    return fs::exists(path_for(id));
  } catch (const Error&) {
    return false;
  }
}

session::Session SessionStore::load(const std::string& id) const {
  if (!exists(id)) throw Error(ErrorCode::kNotFound, "no session '" + id + "'");
  try {
    return session::session_from_json(Json::parse(read_text_file(path_for(id).string())));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, "session file for " + id + " is corrupt: " + e.what());
  }
}

Components Components::offline(session::CapabilityConfig capabilities) {
  return Components{std::make_shared<session::MockTranslator>(),
                    std::make_shared<session::RuleChecker>(std::move(capabilities)),
                    std::make_shared<session::RuleCoder>()};
}

Json constraints_json(const session::Session& s) {
  Json out = Json::array();
  for (const auto& c : s.constraints) {
    out.push_back(
        Json{{"id", c.id}, {"rank", c.rank}, {"nl_text", c.nl_text}, {"dsl_source", c.source}});
  }
  return out;
}

Engine::Engine(Universe universe, fs::path store_dir, Components components, std::size_t default_k)
    : store_(std::move(store_dir)), components_(std::move(components)), default_k_(default_k) {
  if (default_k_ == 0) throw Error(ErrorCode::kInvalidArgument, "default k must be at least 1");
  const auto saved = store_.dir() / "universe.json";
  universe_ = fs::exists(saved) ? std::make_shared<const Universe>(load_universe(saved.string()))
                                : std::make_shared<const Universe>(std::move(universe));
}

std::shared_ptr<const Universe> Engine::universe() const {
  std::lock_guard lock(universe_mu_);
  return universe_;
}

std::shared_ptr<std::mutex> Engine::session_lock(const std::string& id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

Json Engine::create_session(const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be an object");
  Json request_doc = body;
  if (!request_doc.contains("k") || request_doc.at("k").is_null()) request_doc["k"] = default_k_;
  auto request = session::request_from_json(request_doc);
  auto universe = this->universe();
  auto s = session::open_session(store_.next_id(), std::move(request), *universe);
  store_.save(s);
  Json suggestions = Json::array();
  for (const auto& sug : s.last_suggestions) suggestions.push_back(session::to_json(sug));
  return Json{{"session_id", s.id}, {"suggestions", suggestions}, {"constraints", Json::array()}};
}

Json Engine::post_message(const std::string& id, const std::string& text) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  auto s = store_.load(id);
  auto universe = this->universe();
  auto outcome = session::handle_message(s, text, *components_.translator, *universe,
                                         *components_.checker, *components_.coder);
  store_.save(outcome.session);
  Json out = session::to_json(outcome.reply);
  out["constraints"] = constraints_json(outcome.session);
  return out;
}

Json Engine::schedule(const std::string& id, std::size_t index) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  auto s = store_.load(id);
  std::lock_guard universe_guard(universe_mu_);
  auto done = session::finalize(s, index, *universe_);
  auto updated = std::make_shared<const Universe>(std::move(done.universe));
  save_universe(*updated, (store_.dir() / "universe.json").string());
  store_.save(done.session);
  universe_ = std::move(updated);
  const auto& slot = s.last_suggestions[index].slot;
  return Json{{"status", std::string(session::to_string(done.session.status))},
              {"start", slot.start().to_iso()},
              {"end", slot.end().to_iso()}};
}

Json Engine::get_session(const std::string& id) const { return session::to_json(store_.load(id)); }

Json Engine::freebusy(const std::string& person, const std::string& from,
                      const std::string& to) const {
  auto universe = this->universe();
  FreeBusyView view(*universe);
  if (!view.has_person(person)) throw Error(ErrorCode::kNotFound, "no person '" + person + "'");
  const auto a = Instant::parse_iso(from);
  const auto b = Instant::parse_iso(to);
  if (!(a < b)) throw Error(ErrorCode::kInvalidArgument, "'from' must be before 'to'");
  Json busy = Json::array();
  for (const auto& slot : view.busy_between(person, a, b)) {
    busy.push_back(Json{{"start", slot.start().to_iso()}, {"end", slot.end().to_iso()}});
  }
  return Json{{"person", person}, {"busy", busy}};
}

struct HttpService::Impl {
  explicit Impl(Engine& e) : engine(e) {}
  Engine& engine;
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class Fn>
void guarded(httplib::Response& res, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    send(res, http_status(e.code()), error_body(e));
  } catch (const Json::exception& e) {
    send(res, 400, Json{{"code", "invalid-argument"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    send(res, 500, Json{{"code", "internal"}, {"message", e.what()}});
  }
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("body is not valid JSON: ") + e.what());
  }
}

}  // namespace

HttpService::HttpService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {
  auto& srv = impl_->server;
  Engine& eng = impl_->engine;

  srv.Post("/sessions", [&eng](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 201, eng.create_session(parse_body(req))); });
  });
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/messages)",
           [&eng](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto body = parse_body(req);
               if (!body.is_object() || !body.contains("text") || !body.at("text").is_string()) {
                 throw Error(ErrorCode::kInvalidArgument, "body needs a string field \"text\"");
               }
               send(res, 200, eng.post_message(req.matches[1], body.at("text").get<std::string>()));
             });
           });
  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/schedule)",
           [&eng](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto body = parse_body(req);
               if (!body.is_object() || !body.contains("suggestion_index") ||
                   !body.at("suggestion_index").is_number_integer()) {
                 throw Error(ErrorCode::kInvalidArgument,
                             "body needs an integer field \"suggestion_index\"");
               }
               const auto index = body.at("suggestion_index").get<std::int64_t>();
               if (index < 0) throw Error(ErrorCode::kInvalidIndex, "suggestion_index is negative");
               send(res, 200, eng.schedule(req.matches[1], static_cast<std::size_t>(index)));
             });
           });
  srv.Get(R"(/sessions/([A-Za-z0-9_-]+))",
          [&eng](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send(res, 200, eng.get_session(req.matches[1])); });
          });
  srv.Get("/universe/freebusy", [&eng](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      for (const char* key : {"person", "from", "to"}) {
        if (!req.has_param(key)) {
          throw Error(ErrorCode::kInvalidArgument, std::string("missing query parameter ") + key);
        }
      }
      send(res, 200,
           eng.freebusy(req.get_param_value("person"), req.get_param_value("from"),
                        req.get_param_value("to")));
    });
  });
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }
void HttpService::stop() { impl_->server.stop(); }

namespace {

void print_suggestions(std::ostream& out, const Json& suggestions) {
  for (std::size_t i = 0; i < suggestions.size(); ++i) {
    const auto& s = suggestions[i];
    out << "  [" << (i + 1) << "] " << s.at("start").get<std::string>() << " - "
        << s.at("end").get<std::string>() << "  " << s.at("explanation").get<std::string>()
        << "\n";
  }
}

void print_constraints(std::ostream& out, const Json& constraints) {
  if (constraints.empty()) {
    out << "  (no preferences)\n";
    return;
  }
  for (const auto& c : constraints) {
    out << "  " << (c.at("rank").get<int>() + 1) << ". " << c.at("nl_text").get<std::string>()
        << "  {" << c.at("dsl_source").get<std::string>() << "}\n";
  }
}

}  // namespace

int run_repl(Engine& engine, const Json& request, std::istream& in, std::ostream& out) {
  Json created;
  try {
    created = engine.create_session(request);
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
  const auto id = created.at("session_id").get<std::string>();
  out << "session " << id << "\n";
  print_suggestions(out, created.at("suggestions"));

  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) {
      out << "\nbye\n";
      return 0;
    }
    try {
      if (line == ":quit") {
        out << "bye\n";
        return 0;
      }
      if (line == ":show") {
        const auto s = engine.get_session(id);
        print_constraints(out, s.at("constraints"));
        print_suggestions(out, s.at("last_suggestions"));
        continue;
      }
      if (line.rfind(":schedule", 0) == 0) {
        const auto arg = line.substr(9);
        std::size_t n = 0;
        try {
          n = static_cast<std::size_t>(std::stoul(arg));
        } catch (const std::exception&) {
          out << "usage: :schedule N\n";
          continue;
        }
        if (n == 0) {
          out << "suggestions are numbered from 1\n";
          continue;
        }
        const auto res = engine.schedule(id, n - 1);
        out << "scheduled " << res.at("start").get<std::string>() << " - "
            << res.at("end").get<std::string>() << "\n";
        return 0;
      }
      const auto reply = engine.post_message(id, line);
      if (reply.contains("message")) out << reply.at("message").get<std::string>() << "\n";
      if (reply.contains("suggestions")) print_suggestions(out, reply.at("suggestions"));
      print_constraints(out, reply.at("constraints"));
    } catch (const Error& e) {
      out << "error: " << e.what() << "\n";
    }
  }
}

}  // namespace meetmate::service
