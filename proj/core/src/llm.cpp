#include "meetmate/llm.hpp"

#include "meetmate/dsl.hpp"
#include "meetmate/io.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace meetmate::llm {
namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kTransport, "endpoint must be an absolute http(s) URL");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string constraints_block(const session::Session& s) {
  if (s.constraints.empty()) return "(none)";
  std::string out;
  for (const auto& c : s.constraints) {
    out += std::to_string(c.rank + 1) + ". [" + c.id + "] " + c.nl_text + "\n";
  }
  return trim(out);
}

std::string history_block(const session::Session& s) {
  if (s.chat.empty()) return "(empty)";
  std::string out;
  for (const auto& e : s.chat) out += e.speaker + ": " + e.text + "\n";
  return trim(out);
}

int priority_of(const Json& input) {
  if (!input.contains("priority")) return 1;
  const auto& p = input.at("priority");
  if (p.is_number_integer()) return p.get<int>();
  if (p.is_string()) return std::stoi(p.get<std::string>());
  throw Error(ErrorCode::kTranslatorFailure, "priority must be an integer");
}

std::string id_of(const Json& input) {
  if (input.is_string()) return input.get<std::string>();
  for (const char* key : {"id", "constraint_id"}) {
    if (input.contains(key)) return input.at(key).get<std::string>();
  }
  throw Error(ErrorCode::kTranslatorFailure, "action is missing a constraint id");
}

}  // namespace

std::optional<LlmConfig> LlmConfig::from_env() {
  LlmConfig cfg;
  cfg.endpoint = env_or_empty("MEETMATE_LLM_ENDPOINT");
  cfg.api_key = env_or_empty("MEETMATE_LLM_KEY");
  cfg.model = env_or_empty("MEETMATE_LLM_MODEL");
  if (cfg.endpoint.empty() || cfg.model.empty()) return std::nullopt;
  return cfg;
}

HttpResponse HttpTransport::post(const std::string& url, const Headers& headers,
                                 const std::string& body, int timeout_seconds) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  httplib::Headers hs;
  for (const auto& [k, v] : headers) hs.emplace(k, v);
  auto res = client.Post(parts.path, hs, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kTransport,
                "request to " + parts.origin + " failed: " + httplib::to_string(res.error()));
  }
  return HttpResponse{res->status, res->body};
}

FixtureTransport::FixtureTransport(Json transcript) {
  if (!transcript.contains("exchanges") || !transcript.at("exchanges").is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "fixture transcript needs an \"exchanges\" array");
  }
  exchanges_ = std::move(transcript.at("exchanges"));
}

FixtureTransport FixtureTransport::load(const std::string& path) {
  try {
    return FixtureTransport(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

HttpResponse FixtureTransport::post(const std::string&, const Headers&, const std::string& body,
                                    int) {
  std::lock_guard lock(mu_);
  bodies_.push_back(body);
  if (next_ >= exchanges_.size()) {
    throw Error(ErrorCode::kTransport, "fixture transcript exhausted after " +
                                           std::to_string(exchanges_.size()) + " exchanges");
  }
  const auto& ex = exchanges_.at(next_++);
  if (ex.contains("expect")) {
    for (const auto& needle : ex.at("expect")) {
      if (body.find(needle.get<std::string>()) == std::string::npos) {
        throw Error(ErrorCode::kTransport, "request " + std::to_string(next_) +
                                               " does not match the recording: missing \"" +
                                               needle.get<std::string>() + "\"");
      }
    }
  }
  const auto& response = ex.at("response");
  return HttpResponse{ex.value("status", 200),
                      response.is_string() ? response.get<std::string>() : response.dump()};
}

std::size_t FixtureTransport::consumed() const {
  std::lock_guard lock(mu_);
  return next_;
}

std::vector<std::string> FixtureTransport::request_bodies() const {
  std::lock_guard lock(mu_);
  return bodies_;
}

PromptBundle PromptBundle::defaults() {
  PromptBundle p;
  p.manager =
      R"(You maintain the scheduling preferences of a meeting organizer as an ordered list.
Position 1 is the preference that matters most; later positions give way when preferences conflict.

Answer each organizer message with one JSON object per line and nothing else. Each object has the
form {"ACTION": <name>, "INPUT": <argument>} with one of these actions:
  ADD              INPUT {"constraint": <short preference text>, "priority": <position>}
                   Firm wording ("I have to", "must") goes to position 1; soft wording
                   ("if possible", "ideally") goes after every existing preference.
  CHANGE_PRIORITY  INPUT {"id": <constraint id>, "priority": <new position>}
  DELETE           INPUT {"id": <constraint id>}
  MESSAGE          INPUT <text shown to the organizer>, for questions and for anything
                   outside scheduling.
  SUGGEST          INPUT null, to refresh the suggested times without editing the list.

Example. Current list: (none). Organizer: "Could we keep it before 11am?"
{"ACTION": "ADD", "INPUT": {"constraint": "Meeting before 11am", "priority": 1}}

Example. Current list: 1. [c1] Meeting before 11am, 2. [c2] Anton attends.
Organizer: "Anton really has to be there."
{"ACTION": "CHANGE_PRIORITY", "INPUT": {"id": "c2", "priority": 1}}

Example. Current list: 1. [c3] No meetings on Friday. Organizer: "Scratch that."
{"ACTION": "DELETE", "INPUT": {"id": "c3"}}

Current list:
{{CONSTRAINTS}}

Conversation so far:
{{HISTORY}})";
  p.checker =
      R"(You decide whether a scheduling assistant can honor a preference. The assistant only knows
each person's busy and free intervals, the names of the attendees, the meeting length and the
calendar (dates, weekdays and clock times). It knows nothing about rooms, buildings, weather,
travel, or anyone's location or timezone.

Reply with a single JSON object: {"response": "yes" or "no", "rationale": <one sentence>}.)";
  p.coder =
      R"(Translate a scheduling preference into one boolean expression of the constraint language
below. Reply with the expression only.

Fields: start.hour, start.minute, end.hour, end.minute (integers), start.time, end.time (HH:MM),
day_index (days since the first day of the search window).
Comparisons: < <= > >= == !=.
Atoms: day in {MON, TUE, ...}; free("Full Name"); all_free; gap_before >= 30m; gap_after >= 15m;
avoid(12:00-13:00); within_days(3); on(2024-03-05).
Combine with and, or, not and parentheses.

Meeting organizer: {{ORGANIZER}}
Attendees: {{ATTENDEES}}
Meeting length: {{DURATION}} minutes

Example: "Meeting before 11am" -> start.hour < 11
Example: "Not on Mondays" -> not day in {MON})";
  p.rephraser =
      R"(Restate the message below as one short scheduling preference, keeping every time, day and
person it mentions. Reply with the restated preference only.)";
  return p;
}

std::string render_prompt(std::string_view tmpl,
                          const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(tmpl);
  for (const auto& [key, value] : values) {
    const std::string marker = "{{" + key + "}}";
    for (auto pos = out.find(marker); pos != std::string::npos;
         pos = out.find(marker, pos + value.size())) {
      out.replace(pos, marker.size(), value);
    }
  }
  if (auto pos = out.find("{{"); pos != std::string::npos) {
    const auto end = out.find("}}", pos);
    throw Error(ErrorCode::kInvalidArgument,
                "unresolved prompt placeholder " +
                    out.substr(pos, end == std::string::npos ? 2 : end - pos + 2));
  }
  return out;
}

ChatClient::ChatClient(LlmConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) throw Error(ErrorCode::kInvalidArgument, "chat client needs a transport");
}

std::string ChatClient::complete(const std::string& system, const std::string& user) const {
  Json body = {{"model", config_.model},
               {"temperature", config_.temperature},
               {"max_tokens", config_.max_tokens},
               {"messages",
                Json::array({Json{{"role", "system"}, {"content", system}},
                             Json{{"role", "user"}, {"content", user}}})}};
  Headers headers = {{"Content-Type", "application/json"}};
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

  const auto res = transport_->post(config_.endpoint, headers, body.dump(), config_.timeout_seconds);
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::kTransport,
                "completion endpoint returned HTTP " + std::to_string(res.status));
  }
  try {
    const auto doc = Json::parse(res.body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kTransport, std::string("unexpected completion payload: ") + e.what());
  }
}

std::vector<Json> extract_objects(std::string_view text) {
  std::vector<Json> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      ++i;
      continue;
    }
    int depth = 0;
    bool in_string = false;
    std::size_t j = i;
    for (; j < text.size(); ++j) {
      const char ch = text[j];
      if (in_string) {
        if (ch == '\\') {
          ++j;
        } else if (ch == '"') {
          in_string = false;
        }
      } else if (ch == '"') {
        in_string = true;
      } else if (ch == '{') {
        ++depth;
      } else if (ch == '}' && --depth == 0) {
        break;
      }
    }
    if (j >= text.size()) {
      ++i;  // unbalanced opener; later objects may still close
      continue;
    }
    try {
      out.push_back(Json::parse(text.substr(i, j - i + 1)));
      i = j + 1;
    } catch (const Json::exception&) {
      ++i;
    }
  }
  return out;
}

std::vector<session::Action> parse_actions(std::string_view reply,
                                           const session::Session& session) {
  const auto objects = extract_objects(reply);
  if (objects.empty()) {
    throw Error(ErrorCode::kTranslatorFailure, "reply contains no action objects");
  }
  auto known = [&](const std::string& id) {
    return std::any_of(session.constraints.begin(), session.constraints.end(),
                       [&](const auto& c) { return c.id == id; });
  };
  std::vector<session::Action> actions;
  try {
    for (const auto& obj : objects) {
      if (!obj.is_object() || !obj.contains("ACTION")) {
        throw Error(ErrorCode::kTranslatorFailure, "object without an ACTION field");
      }
      const auto name = lower(obj.at("ACTION").get<std::string>());
      const Json input = obj.value("INPUT", Json());
      if (name == "add") {
        const std::string text =
            input.is_string() ? input.get<std::string>() : input.at("constraint").get<std::string>();
        if (trim(text).empty()) throw Error(ErrorCode::kTranslatorFailure, "empty ADD text");
        const int priority = input.is_object() ? priority_of(input) : 1;
        const int n = static_cast<int>(session.constraints.size());
        session::RankHint hint = priority <= 1       ? session::RankHint::top()
                                 : priority > n      ? session::RankHint::bottom()
                                                     : session::RankHint::at(priority - 1);
        actions.push_back(session::AddConstraint{text, hint});
      } else if (name == "change_priority") {
        const auto id = id_of(input);
        if (!known(id)) throw Error(ErrorCode::kTranslatorFailure, "unknown constraint " + id);
        actions.push_back(session::ChangePriority{id, std::max(0, priority_of(input) - 1)});
      } else if (name == "delete") {
        const auto id = id_of(input);
        if (!known(id)) throw Error(ErrorCode::kTranslatorFailure, "unknown constraint " + id);
        actions.push_back(session::DeleteConstraint{id});
      } else if (name == "message") {
        actions.push_back(session::MessageUser{
            input.is_string() ? input.get<std::string>() : input.at("text").get<std::string>()});
      } else if (name == "suggest") {
        actions.push_back(session::GenerateSuggestion{});
      } else {
        throw Error(ErrorCode::kTranslatorFailure, "unknown action " + name);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kTranslatorFailure, std::string("malformed action: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::kTranslatorFailure, "priority is not a number");
  }
  return actions;
}

LlmTranslator::LlmTranslator(std::shared_ptr<const ChatClient> client, PromptBundle prompts)
    : client_(std::move(client)), prompts_(std::move(prompts)) {}

std::vector<session::Action> LlmTranslator::translate(const session::Session& session,
                                                      std::string_view user_text,
                                                      const FreeBusyView&) const {
  const auto system = render_prompt(prompts_.manager, {{"CONSTRAINTS", constraints_block(session)},
                                                       {"HISTORY", history_block(session)}});
  std::string last_error;
  for (int attempt = 0; attempt <= client_->config().retries; ++attempt) {
    const auto reply = client_->complete(system, std::string(user_text));
    try {
      return parse_actions(reply, session);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kTranslatorFailure,
              "no usable reply after " + std::to_string(client_->config().retries + 1) +
                  " attempts: " + last_error);
}

LlmChecker::LlmChecker(std::shared_ptr<const ChatClient> client, PromptBundle prompts)
    : client_(std::move(client)), prompts_(std::move(prompts)) {}

session::CheckResult LlmChecker::check(std::string_view nl_text) const {
  const auto system = render_prompt(prompts_.checker, {});
  for (int attempt = 0; attempt <= client_->config().retries; ++attempt) {
    const auto reply = client_->complete(system, std::string(nl_text));
    for (const auto& obj : extract_objects(reply)) {
      if (!obj.is_object() || !obj.contains("response") || !obj.at("response").is_string()) {
        continue;
      }
      const auto verdict = lower(obj.at("response").get<std::string>());
      const auto rationale =
          obj.contains("rationale") && obj.at("rationale").is_string()
              ? obj.at("rationale").get<std::string>()
              : std::string();
      if (verdict == "yes") return {true, rationale, ""};
      if (verdict == "no") return {false, rationale, "model"};
    }
  }
  throw Error(ErrorCode::kTranslatorFailure, "checker gave no yes/no verdict");
}

LlmCoder::LlmCoder(std::shared_ptr<const ChatClient> client, bool rephrase_first,
                   PromptBundle prompts)
    : client_(std::move(client)), rephrase_first_(rephrase_first), prompts_(std::move(prompts)) {}

std::string clean_source(std::string_view reply) {
  std::string text = trim(reply);
  if (text.rfind("```", 0) == 0) {
    const auto first_newline = text.find('\n');
    const auto closing = text.rfind("```");
    if (first_newline != std::string::npos && closing > first_newline) {
      text = trim(text.substr(first_newline + 1, closing - first_newline - 1));
    }
  }
  if (lower(text).rfind("return ", 0) == 0) text = trim(text.substr(7));
  if (!text.empty() && text.back() == ';') text.pop_back();
  return trim(text);
}

std::string LlmCoder::code(std::string_view nl_text, const session::CoderContext& context) const {
  std::string preference(nl_text);
  if (rephrase_first_) {
    preference = trim(client_->complete(render_prompt(prompts_.rephraser, {}), preference));
  }
  std::string attendees;
  for (const auto& name : context.attendee_names) {
    attendees += (attendees.empty() ? "" : ", ") + name;
  }
  const auto system = render_prompt(prompts_.coder,
                                    {{"ORGANIZER", context.organizer_name},
                                     {"ATTENDEES", attendees},
                                     {"DURATION", std::to_string(context.duration_minutes)}});
  const auto source = clean_source(client_->complete(system, preference));
  try {
    (void)dsl::parse(source);
  } catch (const dsl::ParseError& e) {
    throw Error(ErrorCode::kCoderFailure, "model output is not a valid constraint (" +
                                              std::string(e.what()) + "): " + source);
  }
  return source;
}

}  // namespace meetmate::llm
