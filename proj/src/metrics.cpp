#include "augcap/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "augcap/cug.hpp"
#include "augcap/errors.hpp"
#include "augcap/text.hpp"

namespace augcap {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '\'';
}

// Scans s[0, size) for yes/no tokens; offsets are shifted by `base`.
ExtractedAnswer scan(std::string_view s, std::size_t base, TokenRule rule) {
  ExtractedAnswer found;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !is_word_char(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && is_word_char(s[i])) ++i;
    if (i == start) continue;
    const std::string token = text::to_lower_ascii(s.substr(start, i - start));
    Answer value = Answer::kUnknown;
    if (token == "yes") value = Answer::kYes;
    if (token == "no") value = Answer::kNo;
    if (value == Answer::kUnknown) continue;
    found.value = value;
    found.matched_span = std::make_pair(base + start, base + i);
    if (rule == TokenRule::kFirst) return found;
  }
  return found;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string percent_cell(const std::optional<PolicyCell>& cell) {
  if (!cell || cell->n == 0) return "\xE2\x80\x94";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", cell->accuracy * 100.0);
  return buf;
}

// Display width, counting each code point once.
std::size_t width(std::string_view s) { return text::utf8_length(s); }

std::string pad(std::string_view s, std::size_t w) {
  std::string out(s);
  out.append(w > width(s) ? w - width(s) : 0, ' ');
  return out;
}

}  // namespace

std::string_view to_string(Answer answer) {
  switch (answer) {
    case Answer::kYes:
      return "yes";
    case Answer::kNo:
      return "no";
    case Answer::kUnknown:
      return "unknown";
  }
  return "unknown";
}

ExtractedAnswer extract_answer(std::string_view response, bool cug_mode, TokenRule rule) {
  if (cug_mode) {
    const SplitResponse parts = split_response_heuristic(response);
    const std::size_t base = response.size() - parts.answer_part.size();
    ExtractedAnswer in_answer = scan(parts.answer_part, base, rule);
    if (in_answer.value != Answer::kUnknown) return in_answer;
  }
  return scan(response, 0, rule);
}

MetricsReport compute_metrics(std::span<const LabeledAnswer> pairs) {
  MetricsReport report;
  Confusion& c = report.confusion;
  for (const auto& [answer, label] : pairs) {
    if (label == Label::kOpen) throw InputError("metrics need yes/no ground-truth labels");
    const bool positive_truth = label == Label::kYes;
    const bool predicted_yes = answer.value == Answer::kYes;
    if (answer.value == Answer::kUnknown) ++c.unknown;
    if (predicted_yes && positive_truth) ++c.tp;
    if (predicted_yes && !positive_truth) ++c.fp;
    if (!predicted_yes && positive_truth) ++c.fn;
    if (!predicted_yes && !positive_truth) ++c.tn;
    if (answer.value != Answer::kUnknown && predicted_yes == positive_truth) ++c.correct;
  }
  report.n = pairs.size();
  report.unknown_count = c.unknown;
  report.accuracy = ratio(c.correct, report.n);
  report.precision = ratio(c.tp, c.tp + c.fp);
  report.recall = ratio(c.tp, c.tp + c.fn);
  const double denom = report.precision + report.recall;
  report.f1 = denom > 0.0 ? 2.0 * report.precision * report.recall / denom : 0.0;
  return report;
}

PolicyReport per_policy_report(std::span<const EvalRecord> records, bool cug_mode,
                               TokenRule rule) {
  std::vector<LabeledAnswer> augmented;
  std::vector<LabeledAnswer> original;
  std::map<std::optional<Policy>, PolicyCell> cells;
  for (const auto& r : records) {
    const ExtractedAnswer answer = extract_answer(r.model_response, cug_mode, rule);
    (r.policy ? augmented : original).emplace_back(answer, r.gt_label);
    PolicyCell& cell = cells[r.policy];
    ++cell.n;
    const bool correct = answer.value != Answer::kUnknown &&
                         (answer.value == Answer::kYes) == (r.gt_label == Label::kYes);
    if (correct) ++cell.correct;
  }
  for (auto& [policy, cell] : cells) cell.accuracy = ratio(cell.correct, cell.n);

  PolicyReport report;
  report.augmented = compute_metrics(augmented);
  report.original = compute_metrics(original);
  report.augmented.per_policy = cells;
  report.original.per_policy = cells;
  return report;
}

std::string render_policy_table(const PolicyReport& report, std::string_view row_label) {
  std::vector<std::string> header{"Method"};
  std::vector<std::string> accuracy{std::string(row_label)};
  std::vector<std::string> counts{"n"};
  const auto& cells = report.augmented.per_policy;
  for (Policy p : all_policies()) {
    header.emplace_back(display_name(p));
    auto it = cells.find(p);
    std::optional<PolicyCell> cell;
    if (it != cells.end()) cell = it->second;
    accuracy.push_back(percent_cell(cell));
    counts.push_back(std::to_string(cell ? cell->n : 0));
  }
  header.emplace_back("Overall");
  PolicyCell overall{report.augmented.n, report.augmented.confusion.correct,
                     report.augmented.accuracy};
  accuracy.push_back(percent_cell(overall));
  counts.push_back(std::to_string(overall.n));

  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    widths[i] = std::max({width(header[i]), width(accuracy[i]), width(counts[i])});
  }
  std::ostringstream out;
  auto row = [&](const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i == 0 ? "" : " | ") << pad(cols[i], widths[i]);
    }
    out << '\n';
  };
  row(header);
  std::size_t total = 0;
  for (std::size_t w : widths) total += w;
  out << std::string(total + 3 * (widths.size() - 1), '-') << '\n';
  row(accuracy);
  row(counts);

  auto orig = cells.find(std::nullopt);
  std::optional<PolicyCell> orig_cell;
  if (orig != cells.end()) orig_cell = orig->second;
  out << "Original prompts: " << percent_cell(orig_cell) << " (n=" << report.original.n << ")\n";
  return out.str();
}

OrderedJson metrics_to_json(const MetricsReport& report) {
  const Confusion& c = report.confusion;
  return OrderedJson{{"n", report.n},
                     {"accuracy", report.accuracy},
                     {"precision", report.precision},
                     {"recall", report.recall},
                     {"f1", report.f1},
                     {"unknown_count", report.unknown_count},
                     {"confusion",
                      {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"correct", c.correct}}}};
}

OrderedJson report_to_json(const PolicyReport& report) {
  OrderedJson per_policy = OrderedJson::object();
  const auto& cells = report.augmented.per_policy;
  auto emit = [&](const std::optional<Policy>& key) {
    auto it = cells.find(key);
    const PolicyCell cell = it == cells.end() ? PolicyCell{} : it->second;
    per_policy[policy_tag(key)] = {
        {"n", cell.n}, {"correct", cell.correct},
        {"accuracy", cell.n == 0 ? OrderedJson(nullptr) : OrderedJson(cell.accuracy)}};
  };
  for (Policy p : all_policies()) emit(p);
  emit(std::nullopt);
  return OrderedJson{{"overall", metrics_to_json(report.augmented)},
                     {"original", metrics_to_json(report.original)},
                     {"per_policy", std::move(per_policy)}};
}

}  // namespace augcap
