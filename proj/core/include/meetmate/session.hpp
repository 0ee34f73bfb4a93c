#pragma once

#include "meetmate/calendar.hpp"
#include "meetmate/common.hpp"
#include "meetmate/solver.hpp"
#include "meetmate/time.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace meetmate::session {

struct MeetingRequest {
  std::string organizer;               // person id
  std::vector<std::string> attendees;  // person ids, organizer included
  int duration_minutes = 30;
  TimeSlot horizon = TimeSlot(Instant(0), Instant(kMinutesPerDay));
  std::size_t k = 1;
};

/// Throws kInvalidDuration, kInvalidArgument or kUnknownPerson.
void validate(const MeetingRequest& request, const FreeBusyView& directory);

Json to_json(const MeetingRequest& request);
MeetingRequest request_from_json(const Json& doc);

/// Candidate slots offered in a session: business hours within the horizon.
TimeGrid session_grid(const MeetingRequest& request);
dsl::EvalContext session_context(const MeetingRequest& request,
                                 std::shared_ptr<const FreeBusyView> view);

struct RankHint {
  enum class Kind { kTop, kBottom, kExplicit };
  Kind kind = Kind::kTop;
  int rank = 0;  // used with kExplicit

  static RankHint top() { return {Kind::kTop, 0}; }
  static RankHint bottom() { return {Kind::kBottom, 0}; }
  static RankHint at(int rank) { return {Kind::kExplicit, rank}; }
  friend bool operator==(const RankHint&, const RankHint&) = default;
};

struct AddConstraint {
  std::string nl_text;
  RankHint hint;
  friend bool operator==(const AddConstraint&, const AddConstraint&) = default;
};
struct ChangePriority {
  std::string constraint_id;
  int rank = 0;
  friend bool operator==(const ChangePriority&, const ChangePriority&) = default;
};
struct DeleteConstraint {
  std::string constraint_id;
  friend bool operator==(const DeleteConstraint&, const DeleteConstraint&) = default;
};
struct MessageUser {
  std::string text;
  friend bool operator==(const MessageUser&, const MessageUser&) = default;
};
struct GenerateSuggestion {
  friend bool operator==(const GenerateSuggestion&, const GenerateSuggestion&) = default;
};

using Action =
    std::variant<AddConstraint, ChangePriority, DeleteConstraint, MessageUser, GenerateSuggestion>;

std::string describe(const Action& action);

enum class Status { kOpen, kScheduled, kAbandoned };
std::string_view to_string(Status status);

struct ChatEntry {
  int turn = 0;  // logical clock: one tick per user message
  std::string speaker;  // "user" or "assistant"
  std::string text;
  friend bool operator==(const ChatEntry&, const ChatEntry&) = default;
};

struct Session {
  std::string id;
  MeetingRequest request;
  std::vector<solver::PrioritizedConstraint> constraints;  // rank order
  std::vector<ChatEntry> chat;
  std::vector<solver::Suggestion> last_suggestions;
  Status status = Status::kOpen;
  int next_constraint_seq = 1;
  int turn = 0;
};

Json to_json(const solver::Suggestion& suggestion);
solver::Suggestion suggestion_from_json(const Json& doc);
Json to_json(const Session& session);
Session session_from_json(const Json& doc);

struct CheckResult {
  bool supported = true;
  std::string rationale;
  std::string category;  // matched class when unsupported
};

/// Decides whether a preference can be expressed with the available data.
class InfoChecker {
 public:
  virtual ~InfoChecker() = default;
  virtual CheckResult check(std::string_view nl_text) const = 0;
};

/// What a coder may know about the meeting being scheduled.
struct CoderContext {
  std::string organizer_name;
  std::vector<std::string> attendee_names;  // display names, organizer first
  int duration_minutes = 30;
};

CoderContext coder_context(const MeetingRequest& request, const FreeBusyView& directory);

/// Turns a supported preference into constraint-language source.
/// Throws Error(kCoderFailure) when it cannot.
class Coder {
 public:
  virtual ~Coder() = default;
  virtual std::string code(std::string_view nl_text, const CoderContext& context) const = 0;
};

/// Maps a user message to actions. Throws Error(kTranslatorFailure).
class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::vector<Action> translate(const Session& session, std::string_view user_text,
                                        const FreeBusyView& directory) const = 0;
};

/// Trigger phrases per unsupported information class.
struct CapabilityConfig {
  std::vector<std::pair<std::string, std::vector<std::string>>> unsupported_classes;

  static CapabilityConfig defaults();
  /// {"class": ["phrase", ...], ...}; throws kInvalidArgument when empty.
  static CapabilityConfig from_json(const Json& doc);
  static CapabilityConfig load(const std::string& path);
};

/// Case-insensitive substring match against the trigger phrases.
CheckResult info_check(std::string_view nl_text, const CapabilityConfig& config);

class RuleChecker final : public InfoChecker {
 public:
  explicit RuleChecker(CapabilityConfig config = CapabilityConfig::defaults())
      : config_(std::move(config)) {}
  CheckResult check(std::string_view nl_text) const override {
    return info_check(nl_text, config_);
  }

 private:
  CapabilityConfig config_;
};

/// Keyword-driven coder covering times of day, weekdays, attendance, lunch,
/// buffers around meetings and how soon the meeting happens.
class RuleCoder final : public Coder {
 public:
  std::string code(std::string_view nl_text, const CoderContext& context) const override;
};

/// Deterministic first-match rule translator used for offline operation and
/// every golden test.
class MockTranslator final : public Translator {
 public:
  std::vector<Action> translate(const Session& session, std::string_view user_text,
                                const FreeBusyView& directory) const override;
};

struct Reply {
  std::optional<std::string> message;
  std::optional<std::vector<solver::Suggestion>> suggestions;
};

Json to_json(const Reply& reply);

struct Outcome {
  Session session;
  Reply reply;
};

/// Creates an open session holding the initial suggestion.
/// Throws kUnknownPerson, kInvalidDuration, kInvalidArgument or kEmptyGrid.
Session open_session(std::string id, MeetingRequest request, const Universe& universe);

/// Applies a batch of actions atomically. Throws kUnknownConstraint for ids
/// that do not exist; the input session is never modified.
Outcome dispatch(const Session& session, const std::vector<Action>& actions,
                 const Universe& universe, const InfoChecker& checker, const Coder& coder);

/// One conversational turn. Throws kSessionClosed unless the session is open.
Outcome handle_message(const Session& session, std::string_view user_text,
                       const Translator& translator, const Universe& universe,
                       const InfoChecker& checker, const Coder& coder);

struct Finalized {
  Session session;
  Universe universe;
};

/// Books last_suggestions[index]. Throws kSessionClosed or kInvalidIndex.
Finalized finalize(const Session& session, std::size_t index, const Universe& universe);

}  // namespace meetmate::session
