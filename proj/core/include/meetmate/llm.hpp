#pragma once

#include "meetmate/common.hpp"
#include "meetmate/session.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meetmate::llm {

struct LlmConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;   // never logged
  std::string model;
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_seconds = 30;
  int retries = 2;  // extra attempts after a malformed reply

  /// MEETMATE_LLM_ENDPOINT, MEETMATE_LLM_KEY, MEETMATE_LLM_MODEL. Returns
  /// nullopt unless endpoint and model are both set.
  static std::optional<LlmConfig> from_env();
};

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Moves one POST request. Throws Error(kTransport) on connection failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const Headers& headers,
                            const std::string& body, int timeout_seconds) = 0;
};

/// Real network transport (http, and https when built with OpenSSL).
class HttpTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                    int timeout_seconds) override;
};

/// Replays a recorded transcript: {"exchanges": [{"expect": [substrings],
/// "status": 200, "response": {...chat completion...}}]}. Each post consumes
/// the next exchange; the request body must contain every "expect" string.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(Json transcript);
  static FixtureTransport load(const std::string& path);

  HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                    int timeout_seconds) override;

  std::size_t consumed() const;
  std::vector<std::string> request_bodies() const;

 private:
  Json exchanges_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  std::vector<std::string> bodies_;
};

/// Templates sent to the model. Placeholders are written {{NAME}}.
struct PromptBundle {
  std::string manager;
  std::string checker;
  std::string coder;
  std::string rephraser;

  static PromptBundle defaults();
};

/// Substitutes {{KEY}} placeholders; throws kInvalidArgument if any remain.
std::string render_prompt(std::string_view tmpl,
                          const std::vector<std::pair<std::string, std::string>>& values);

/// Thin chat-completion client (OpenAI-style request and response schema).
class ChatClient {
 public:
  ChatClient(LlmConfig config, std::shared_ptr<Transport> transport);

  /// Content of the first choice. Throws Error(kTransport).
  std::string complete(const std::string& system, const std::string& user) const;
  const LlmConfig& config() const { return config_; }

 private:
  LlmConfig config_;
  std::shared_ptr<Transport> transport_;
};

/// Top-level {...} objects embedded in free text, in order. Unparseable
/// fragments are skipped.
std::vector<Json> extract_objects(std::string_view text);

/// Actions from {"ACTION": ..., "INPUT": ...} objects. Priorities are 1-based
/// on the wire. Throws Error(kTranslatorFailure) when the reply is malformed or
/// references unknown constraint ids.
std::vector<session::Action> parse_actions(std::string_view reply,
                                           const session::Session& session);

class LlmTranslator final : public session::Translator {
 public:
  LlmTranslator(std::shared_ptr<const ChatClient> client,
                PromptBundle prompts = PromptBundle::defaults());
  std::vector<session::Action> translate(const session::Session& session,
                                         std::string_view user_text,
                                         const FreeBusyView& directory) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptBundle prompts_;
};

class LlmChecker final : public session::InfoChecker {
 public:
  LlmChecker(std::shared_ptr<const ChatClient> client,
             PromptBundle prompts = PromptBundle::defaults());
  /// Throws Error(kTranslatorFailure) when no well-formed verdict arrives.
  session::CheckResult check(std::string_view nl_text) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptBundle prompts_;
};

class LlmCoder final : public session::Coder {
 public:
  LlmCoder(std::shared_ptr<const ChatClient> client, bool rephrase_first = false,
           PromptBundle prompts = PromptBundle::defaults());
  /// Returns source that parses; throws Error(kCoderFailure) otherwise.
  std::string code(std::string_view nl_text, const session::CoderContext& context) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  bool rephrase_first_;
  PromptBundle prompts_;
};

/// Strips code fences, a leading "return" and surrounding whitespace.
std::string clean_source(std::string_view reply);

}  // namespace meetmate::llm
