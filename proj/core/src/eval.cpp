#include "meetmate/eval.hpp"

#include "meetmate/grid_eval.hpp"
#include "meetmate/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <memory>

namespace meetmate::eval {
namespace {

constexpr std::array<std::pair<Category, std::string_view>, 7> kCategories = {{
    {Category::kTemporal, "Temporal"},
    {Category::kExistingCalendar, "ExistingCalendar"},
    {Category::kExternalInformation, "ExternalInformation"},
    {Category::kRelational, "Relational"},
    {Category::kAttendance, "Attendance"},
    {Category::kDuration, "Duration"},
    {Category::kFacility, "Facility"},
}};

void replace_all(std::string& text, std::string_view from, const std::string& to) {
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

// Any "[UPPER_CASE]" token left in the text.
std::optional<std::string> leftover_placeholder(const std::string& text) {
  for (auto open = text.find('['); open != std::string::npos; open = text.find('[', open + 1)) {
    auto close = text.find(']', open);
    if (close == std::string::npos) break;
    const auto token = text.substr(open, close - open + 1);
    bool upper = token.size() > 2;
    for (std::size_t i = 1; i + 1 < token.size(); ++i) {
      const char ch = token[i];
      if (!(std::isupper(static_cast<unsigned char>(ch)) || ch == '_')) upper = false;
    }
    if (upper) return token;
  }
  return std::nullopt;
}

std::string nl_hour(int hour) {
  if (hour == 12) return "12pm";
  if (hour > 12) return std::to_string(hour - 12) + "pm";
  return std::to_string(hour) + "am";
}

std::string dsl_hour(int hour) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:00", hour);
  return buf;
}

bool uses(const PreferenceTemplate& t, std::string_view placeholder) {
  return t.text.find(placeholder) != std::string::npos ||
         (t.reference_dsl && t.reference_dsl->find(placeholder) != std::string::npos);
}

dsl::EvalContext instance_context(const gen::MeetingInstance& inst,
                                  std::shared_ptr<const FreeBusyView> view) {
  dsl::EvalContext ctx;
  ctx.organizer = inst.organizer;
  ctx.attendees = inst.attendees;
  ctx.duration_minutes = inst.duration_minutes;
  ctx.free_busy = std::move(view);
  ctx.horizon_start = inst.horizon.start();
  ctx.now = inst.horizon.start();
  return ctx;
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view to_string(Category category) {
  for (const auto& [c, name] : kCategories) {
    if (c == category) return name;
  }
  return "Temporal";
}

Category category_from_string(std::string_view text) {
  for (const auto& [c, name] : kCategories) {
    if (name == text) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown category '" + std::string(text) + "'");
}

std::vector<PreferenceTemplate> parse_corpus(std::string_view jsonl) {
  std::vector<PreferenceTemplate> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto doc = Json::parse(line);
      PreferenceTemplate t;
      t.id = doc.at("id").get<std::string>();
      t.text = doc.at("text").get<std::string>();
      t.category = category_from_string(doc.at("category").get<std::string>());
      t.supported = doc.at("supported").get<bool>();
      if (doc.contains("reference_dsl") && !doc.at("reference_dsl").is_null()) {
        t.reference_dsl = doc.at("reference_dsl").get<std::string>();
      }
      if (t.supported != t.reference_dsl.has_value()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "template " + t.id + ": reference_dsl must be present iff supported");
      }
      out.push_back(std::move(t));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PreferenceTemplate> load_corpus(const std::string& path) {
  return parse_corpus(read_text_file(path));
}

std::vector<EvalRecord> infill(const PreferenceTemplate& tmpl, const gen::MeetingInstance& instance,
                               const Universe& universe, std::uint64_t seed) {
  std::vector<std::string> others;
  for (const auto& a : instance.attendees) {
    if (a != instance.organizer) others.push_back(universe.person(a).name);
  }
  if (uses(tmpl, "[ATTENDEE]") && others.empty()) {
    throw Error(ErrorCode::kUncoverablePlaceholder,
                "template " + tmpl.id + " needs an attendee other than the organizer");
  }

  gen::Rng rng(seed);
  std::vector<EvalRecord> out;
  for (int v = 0; v < kVariantsPerTemplate; ++v) {
    std::string nl = tmpl.text;
    std::optional<std::string> dsl = tmpl.reference_dsl;
    auto fill = [&](std::string_view placeholder, const std::string& nl_value,
                    const std::string& dsl_value) {
      replace_all(nl, placeholder, nl_value);
      if (dsl) replace_all(*dsl, placeholder, dsl_value);
    };
    // Draw every placeholder in a fixed order so variants depend only on the seed.
    const auto day = static_cast<Weekday>(rng.uniform(0, 4));
    const auto hour = static_cast<int>(rng.uniform(8, 17));
    const auto duration = static_cast<int>(15 * rng.uniform(1, 4));
    const auto n_days = rng.uniform(1, 7);
    const auto who = others.empty()
                         ? std::string()
                         : others[static_cast<std::size_t>(
                               rng.uniform(0, static_cast<std::int64_t>(others.size()) - 1))];
    fill("[WEEKDAY]", std::string(weekday_name(day)), std::string(weekday_abbrev(day)));
    fill("[TIME]", nl_hour(hour), dsl_hour(hour));
    fill("[ATTENDEE]", who, who);
    fill("[DURATION_MIN]", std::to_string(duration), std::to_string(duration));
    fill("[N_DAYS]", std::to_string(n_days), std::to_string(n_days));

    for (const auto* text : {&nl, dsl ? &*dsl : nullptr}) {
      if (!text) continue;
      if (auto left = leftover_placeholder(*text)) {
        throw Error(ErrorCode::kUncoverablePlaceholder,
                    "template " + tmpl.id + " uses unknown placeholder " + *left);
      }
    }
    out.push_back(EvalRecord{tmpl.id + "-" + instance.id + "-" + std::to_string(v + 1), tmpl.id,
                             tmpl.category, nl, instance.id, tmpl.supported, dsl});
  }
  return out;
}

std::vector<EvalRecord> build_dataset(const std::vector<PreferenceTemplate>& corpus,
                                      const std::vector<gen::MeetingInstance>& instances,
                                      const Universe& universe, std::uint64_t seed) {
  if (instances.empty()) throw Error(ErrorCode::kInvalidArgument, "no meeting instances");
  gen::Rng rng(seed);
  std::vector<EvalRecord> out;
  for (const auto& t : corpus) {
    const auto& inst = instances[static_cast<std::size_t>(
        rng.uniform(0, static_cast<std::int64_t>(instances.size()) - 1))];
    const auto sub_seed = rng.next();
    for (auto& r : infill(t, inst, universe, sub_seed)) out.push_back(std::move(r));
  }
  return out;
}

LabelChecker::LabelChecker(const std::vector<EvalRecord>& records) {
  for (const auto& r : records) labels_[r.nl_text] = r.supported;
}

session::CheckResult LabelChecker::check(std::string_view nl_text) const {
  auto it = labels_.find(nl_text);
  if (it == labels_.end()) return {true, "no label recorded", ""};
  if (it->second) return {true, "labelled supported", ""};
  return {false, "labelled unsupported", "label"};
}

ReferenceCoder::ReferenceCoder(const std::vector<EvalRecord>& records) {
  for (const auto& r : records) {
    if (r.reference_dsl) sources_[r.nl_text] = *r.reference_dsl;
  }
}

std::string ReferenceCoder::code(std::string_view nl_text, const session::CoderContext&) const {
  auto it = sources_.find(nl_text);
  if (it == sources_.end()) {
    throw Error(ErrorCode::kCoderFailure, "no reference for \"" + std::string(nl_text) + "\"");
  }
  return it->second;
}

std::string flip_inequalities(std::string_view source) {
  std::string out;
  bool in_string = false;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const char ch = source[i];
    if (in_string) {
      out += ch;
      if (ch == '\\' && i + 1 < source.size()) {
        out += source[++i];
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') in_string = true;
    out += ch == '<' ? '>' : ch == '>' ? '<' : ch;
  }
  return out;
}

std::string InequalityFlipCoder::code(std::string_view nl_text,
                                      const session::CoderContext& context) const {
  return flip_inequalities(inner_.code(nl_text, context));
}

std::optional<double> Confusion::precision() const { return ratio(tp, tp + fp); }
std::optional<double> Confusion::recall() const { return ratio(tp, tp + fn); }

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

std::optional<double> MetricsReport::safeguard_accuracy() const {
  return ratio(safeguard_correct, safeguard_total);
}
std::optional<double> MetricsReport::compilation() const { return ratio(compiled, codegen_total); }

SafeguardResult eval_safeguard(const session::InfoChecker& checker,
                               const std::vector<EvalRecord>& records) {
  SafeguardResult out;
  for (const auto& r : records) {
    ++out.total;
    bool predicted = true;
    try {
      predicted = checker.check(r.nl_text).supported;
    } catch (const Error&) {
      continue;  // a checker that cannot answer is wrong for this record
    }
    if (predicted == r.supported) ++out.correct;
  }
  return out;
}

TimeGrid general_grid(const gen::MeetingInstance& instance) {
  const auto start = instance.horizon.start();
  return enumerate_candidates(TimeSlot(start, start.plus_days(kGeneralGridDays)),
                              instance.duration_minutes, DailyWindow::weekdays_all_day());
}

TimeGrid example_grid(const gen::MeetingInstance& instance) {
  return enumerate_candidates(instance.horizon, instance.duration_minutes);
}

Confusion compare_on_grid(const dsl::Expr& reference, const dsl::Expr& candidate,
                          const TimeGrid& grid, const dsl::EvalContext& ctx) {
  dsl::GridEvaluator evaluator(grid, ctx);
  const SlotMask ref = evaluator.evaluate(reference);
  const SlotMask got = evaluator.evaluate(candidate);
  Confusion c;
  for (std::size_t w = 0; w < ref.words().size(); ++w) {
    const auto r = ref.words()[w];
    const auto g = got.words()[w];
    c.tp += static_cast<std::uint64_t>(std::popcount(r & g));
    c.fp += static_cast<std::uint64_t>(std::popcount(~r & g));
    c.fn += static_cast<std::uint64_t>(std::popcount(r & ~g));
  }
  return c;
}

CodegenResult eval_codegen(const session::Coder& coder, const std::vector<EvalRecord>& records,
                           const std::vector<gen::MeetingInstance>& instances,
                           const Universe& universe) {
  std::map<std::string, const gen::MeetingInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;
  auto view = std::make_shared<const FreeBusyView>(universe);

  CodegenResult out;
  for (const auto& r : records) {
    if (!r.supported || !r.reference_dsl) continue;
    auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument, "record " + r.id + " names unknown instance " +
                                                   r.instance_id);
    }
    const auto& inst = *it->second;
    ++out.total;

    const dsl::Expr reference = dsl::parse(*r.reference_dsl);
    std::optional<dsl::Expr> produced;
    try {
      session::MeetingRequest request{inst.organizer, inst.attendees, inst.duration_minutes,
                                      inst.horizon, 1};
      auto source = coder.code(r.nl_text, session::coder_context(request, *view));
      produced = dsl::parse(source);
      dsl::check_names(*produced, *view);
    } catch (const std::exception&) {
      continue;
    }
    ++out.compiled;
    const auto ctx = instance_context(inst, view);
    out.general += compare_on_grid(reference, *produced, general_grid(inst), ctx);
    out.example += compare_on_grid(reference, *produced, example_grid(inst), ctx);
  }
  return out;
}

MetricsReport evaluate(const session::InfoChecker& checker, const session::Coder& coder,
                       const std::vector<EvalRecord>& records,
                       const std::vector<gen::MeetingInstance>& instances,
                       const Universe& universe) {
  MetricsReport report;
  const auto safeguard = eval_safeguard(checker, records);
  report.safeguard_correct = safeguard.correct;
  report.safeguard_total = safeguard.total;
  const auto codegen = eval_codegen(coder, records, instances, universe);
  report.compiled = codegen.compiled;
  report.codegen_total = codegen.total;
  report.general = codegen.general;
  report.example = codegen.example;
  return report;
}

std::string percent(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) return "n/a";
  // Tenths of a percent, rounded half-up in integer arithmetic.
  const std::uint64_t tenths = (numerator * 2000 + denominator) / (2 * denominator);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

std::string render_report(const MetricsReport& report, const std::string& label) {
  const std::array<std::string, 7> headers = {"Run",           "Safeguard",  "Compilation",
                                              "Prec. (gen)",   "Rec. (gen)", "Prec. (ex)",
                                              "Rec. (ex)"};
  const std::array<std::string, 7> cells = {
      label,
      percent(report.safeguard_correct, report.safeguard_total),
      percent(report.compiled, report.codegen_total),
      percent(report.general.tp, report.general.tp + report.general.fp),
      percent(report.general.tp, report.general.tp + report.general.fn),
      percent(report.example.tp, report.example.tp + report.example.fp),
      percent(report.example.tp, report.example.tp + report.example.fn)};

  std::array<std::size_t, 7> width{};
  for (std::size_t i = 0; i < 7; ++i) width[i] = std::max(headers[i].size(), cells[i].size());

  auto row = [&](const std::array<std::string, 7>& values) {
    std::string line = "|";
    for (std::size_t i = 0; i < 7; ++i) {
      const auto pad = std::string(width[i] - values[i].size(), ' ');
      line += " " + (i == 0 ? values[i] + pad : pad + values[i]) + " |";
    }
    return line + "\n";
  };
  std::string rule = "|";
  for (std::size_t i = 0; i < 7; ++i) rule += std::string(width[i] + 2, '-') + "|";
  rule += "\n";

  std::string out;
  out += "General grid: " + std::to_string(kGeneralGridDays) +
         " calendar days from each horizon start, weekdays only, 15-minute starts, slots ending by midnight.\n";
  out += "Example grid: each instance's own horizon, same slot rule.\n";
  out += "Precision and recall are micro-averaged over compiled records.\n\n";
  out += row(headers) + rule + row(cells) + "\n";
  out += "safeguard:   " + std::to_string(report.safeguard_correct) + " / " +
         std::to_string(report.safeguard_total) + " correct\n";
  out += "compilation: " + std::to_string(report.compiled) + " / " +
         std::to_string(report.codegen_total) + " supported records\n";
  auto counts = [](const Confusion& c) {
    return "tp=" + std::to_string(c.tp) + " fp=" + std::to_string(c.fp) +
           " fn=" + std::to_string(c.fn) + "\n";
  };
  out += "general:     " + counts(report.general);
  out += "example:     " + counts(report.example);
  return out;
}

}  // namespace meetmate::eval
