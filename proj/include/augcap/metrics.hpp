#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "augcap/policy.hpp"
#include "augcap/records.hpp"

namespace augcap {

enum class Answer { kYes, kNo, kUnknown };

std::string_view to_string(Answer answer);

struct ExtractedAnswer {
  Answer value = Answer::kUnknown;
  // Byte range [first, second) of the matched token in the full response.
  std::optional<std::pair<std::size_t, std::size_t>> matched_span;

  friend bool operator==(const ExtractedAnswer&, const ExtractedAnswer&) = default;
};

enum class TokenRule { kFirst, kLast };

// Finds a standalone "yes" or "no" token (case-insensitive). With cug_mode the leading
// caption sentence is skipped first, falling back to the whole response if the
// remainder has no yes/no token.
ExtractedAnswer extract_answer(std::string_view response, bool cug_mode,
                               TokenRule rule = TokenRule::kFirst);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;  // includes Unknown predictions on "no" items
  std::size_t fn = 0;  // includes Unknown predictions on "yes" items
  std::size_t unknown = 0;
  std::size_t correct = 0;  // known predictions that match the label

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct PolicyCell {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;

  friend bool operator==(const PolicyCell&, const PolicyCell&) = default;
};

// Positive class is "yes". Unknown answers are wrong for accuracy and count as negative
// predictions for precision and recall.
struct MetricsReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t unknown_count = 0;
  Confusion confusion;
  // Keyed by policy; std::nullopt is the ORIGINAL prompt.
  std::map<std::optional<Policy>, PolicyCell> per_policy;
};

using LabeledAnswer = std::pair<ExtractedAnswer, Label>;

// Throws InputError if any label is not yes/no.
MetricsReport compute_metrics(std::span<const LabeledAnswer> pairs);

struct PolicyReport {
  // Top-level metrics over augmented records; this is the Overall column.
  MetricsReport augmented;
  // Metrics over ORIGINAL records.
  MetricsReport original;
};

PolicyReport per_policy_report(std::span<const EvalRecord> records, bool cug_mode,
                               TokenRule rule = TokenRule::kFirst);

// Aligned text table with columns Hard Easy Short Long Rewrite Spell Append Overall.
std::string render_policy_table(const PolicyReport& report, std::string_view row_label = "model");

OrderedJson report_to_json(const PolicyReport& report);
OrderedJson metrics_to_json(const MetricsReport& report);

}  // namespace augcap
