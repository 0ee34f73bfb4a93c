#pragma once

#include "meetmate/calendar.hpp"
#include "meetmate/common.hpp"
#include "meetmate/session.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace meetmate::service {

/// HTTP status used for each error code.
int http_status(ErrorCode code);
Json error_body(const Error& error);

/// One JSON file per session under a directory, replaced atomically.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  /// "s0001", "s0002", ... continuing after the highest id on disk.
  std::string next_id();
  void save(const session::Session& session);
  /// Throws Error(kNotFound).
  session::Session load(const std::string& id) const;
  bool exists(const std::string& id) const;
  std::filesystem::path path_for(const std::string& id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  int next_seq_ = 1;
};

struct Components {
  std::shared_ptr<const session::Translator> translator;
  std::shared_ptr<const session::InfoChecker> checker;
  std::shared_ptr<const session::Coder> coder;

  /// Mock translator, keyword checker and rule coder.
  static Components offline(session::CapabilityConfig capabilities =
                                session::CapabilityConfig::defaults());
};

/// Shared request handling for the HTTP service and the REPL. Calls on
/// different sessions may run concurrently; calls on one session are
/// serialized by a per-session lock.
class Engine {
 public:
  /// Uses <store_dir>/universe.json when present (it holds meetings booked
  /// by earlier runs), otherwise `universe`.
  Engine(Universe universe, std::filesystem::path store_dir, Components components,
         std::size_t default_k = 1);

  /// Body {organizer, attendees, duration_minutes, horizon_start, horizon_end, k?}.
  /// Returns {session_id, suggestions, constraints}.
  Json create_session(const Json& body);
  /// Returns {message?, suggestions?, constraints}.
  Json post_message(const std::string& id, const std::string& text);
  /// index is 0-based. Returns {status, start, end}.
  Json schedule(const std::string& id, std::size_t index);
  Json get_session(const std::string& id) const;
  /// Merged busy intervals only: {person, busy: [{start, end}]}.
  Json freebusy(const std::string& person, const std::string& from, const std::string& to) const;

  std::shared_ptr<const Universe> universe() const;
  const SessionStore& store() const { return store_; }

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& id);

  SessionStore store_;
  Components components_;
  std::size_t default_k_;
  mutable std::mutex universe_mu_;
  std::shared_ptr<const Universe> universe_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

Json constraints_json(const session::Session& session);

/// HTTP front end over an Engine.
class HttpService {
 public:
  explicit HttpService(Engine& engine);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Terminal loop over one new session. Lines are user messages except
/// ":schedule N" (1-based), ":show" and ":quit"; end of input also quits.
/// Returns a process exit code.
int run_repl(Engine& engine, const Json& request, std::istream& in, std::ostream& out);

}  // namespace meetmate::service
