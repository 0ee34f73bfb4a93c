#pragma once

#include "meetmate/calendar.hpp"
#include "meetmate/session.hpp"
#include "meetmate/time.hpp"
#include "meetmate/universe_gen.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meetmate::eval {

enum class Category {
  kTemporal,
  kExistingCalendar,
  kExternalInformation,
  kRelational,
  kAttendance,
  kDuration,
  kFacility,
};

std::string_view to_string(Category category);
Category category_from_string(std::string_view text);

/// A preference with placeholders: [WEEKDAY], [TIME], [ATTENDEE],
/// [DURATION_MIN], [N_DAYS]. reference_dsl is present iff supported.
struct PreferenceTemplate {
  std::string id;
  std::string text;
  Category category = Category::kTemporal;
  bool supported = true;
  std::optional<std::string> reference_dsl;
};

/// One template per line. Throws kInvalidArgument on malformed lines.
std::vector<PreferenceTemplate> parse_corpus(std::string_view jsonl);
std::vector<PreferenceTemplate> load_corpus(const std::string& path);

struct EvalRecord {
  std::string id;
  std::string template_id;
  Category category = Category::kTemporal;
  std::string nl_text;
  std::string instance_id;
  bool supported = true;
  std::optional<std::string> reference_dsl;  // in-filled
};

inline constexpr int kVariantsPerTemplate = 3;

/// Three in-filled variants of a template for one instance. Meeting-specific
/// placeholders come from the instance, the rest are sampled uniformly.
/// Throws kUncoverablePlaceholder.
std::vector<EvalRecord> infill(const PreferenceTemplate& tmpl, const gen::MeetingInstance& instance,
                               const Universe& universe, std::uint64_t seed);

/// Every template in-filled against a seeded choice of instance.
std::vector<EvalRecord> build_dataset(const std::vector<PreferenceTemplate>& corpus,
                                      const std::vector<gen::MeetingInstance>& instances,
                                      const Universe& universe, std::uint64_t seed);

/// Answers with the dataset's own labels.
class LabelChecker final : public session::InfoChecker {
 public:
  explicit LabelChecker(const std::vector<EvalRecord>& records);
  session::CheckResult check(std::string_view nl_text) const override;

 private:
  std::map<std::string, bool, std::less<>> labels_;
};

/// Returns the dataset's reference source for each text.
class ReferenceCoder final : public session::Coder {
 public:
  explicit ReferenceCoder(const std::vector<EvalRecord>& records);
  std::string code(std::string_view nl_text, const session::CoderContext& context) const override;

 private:
  std::map<std::string, std::string, std::less<>> sources_;
};

/// Wraps a coder and mirrors every inequality operator (< with >, <= with >=).
class InequalityFlipCoder final : public session::Coder {
 public:
  explicit InequalityFlipCoder(const session::Coder& inner) : inner_(inner) {}
  std::string code(std::string_view nl_text, const session::CoderContext& context) const override;

 private:
  const session::Coder& inner_;
};

std::string flip_inequalities(std::string_view source);

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::optional<double> precision() const;
  std::optional<double> recall() const;
  Confusion& operator+=(const Confusion& other);
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct MetricsReport {
  std::uint64_t safeguard_correct = 0;
  std::uint64_t safeguard_total = 0;
  std::uint64_t compiled = 0;
  std::uint64_t codegen_total = 0;
  Confusion general;
  Confusion example;

  std::optional<double> safeguard_accuracy() const;
  std::optional<double> compilation() const;
};

struct SafeguardResult {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
};

SafeguardResult eval_safeguard(const session::InfoChecker& checker,
                               const std::vector<EvalRecord>& records);

/// Days covered by the general grid, counted from the instance horizon start.
inline constexpr int kGeneralGridDays = 50;

TimeGrid general_grid(const gen::MeetingInstance& instance);
TimeGrid example_grid(const gen::MeetingInstance& instance);

struct CodegenResult {
  std::uint64_t compiled = 0;
  std::uint64_t total = 0;
  Confusion general;
  Confusion example;
};

/// Scores coder output against the references on supported records.
/// Failures are counted, never thrown.
CodegenResult eval_codegen(const session::Coder& coder, const std::vector<EvalRecord>& records,
                           const std::vector<gen::MeetingInstance>& instances,
                           const Universe& universe);

/// Per-slot confusion between two expressions on one grid.
Confusion compare_on_grid(const dsl::Expr& reference, const dsl::Expr& candidate,
                          const TimeGrid& grid, const dsl::EvalContext& ctx);

MetricsReport evaluate(const session::InfoChecker& checker, const session::Coder& coder,
                       const std::vector<EvalRecord>& records,
                       const std::vector<gen::MeetingInstance>& instances,
                       const Universe& universe);

/// Percentage with one decimal, rounded half-up; "n/a" for zero denominators.
std::string percent(std::uint64_t numerator, std::uint64_t denominator);

/// Fixed-width table with the six metric columns plus the raw counts.
std::string render_report(const MetricsReport& report, const std::string& label);

}  // namespace meetmate::eval
