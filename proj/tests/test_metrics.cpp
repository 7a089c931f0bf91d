#include <random>

#include "doctest.h"

#include "augcap/errors.hpp"
#include "augcap/metrics.hpp"

using namespace augcap;

namespace {

struct BruteForce {
  double accuracy, precision, recall, f1;
  std::size_t tp, fp, tn, fn;
};

// Enumerates the 3x2 table of (prediction, label) cells directly.
BruteForce brute_force(const std::vector<LabeledAnswer>& pairs) {
  std::size_t cell[3][2] = {{0, 0}, {0, 0}, {0, 0}};
  for (const auto& [a, l] : pairs) {
    const int row = a.value == Answer::kYes ? 0 : (a.value == Answer::kNo ? 1 : 2);
    cell[row][l == Label::kYes ? 0 : 1] += 1;
  }
  BruteForce b{};
  b.tp = cell[0][0];
  b.fp = cell[0][1];
  b.fn = cell[1][0] + cell[2][0];
  b.tn = cell[1][1] + cell[2][1];
  const double n = static_cast<double>(pairs.size());
  b.accuracy = n == 0 ? 0.0 : static_cast<double>(cell[0][0] + cell[1][1]) / n;
  b.precision = b.tp + b.fp == 0 ? 0.0 : static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fp);
  b.recall = b.tp + b.fn == 0 ? 0.0 : static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fn);
  b.f1 = b.precision + b.recall == 0.0 ? 0.0
                                       : 2.0 * b.precision * b.recall / (b.precision + b.recall);
  return b;
}

ExtractedAnswer answer(Answer a) { return ExtractedAnswer{a, std::nullopt}; }

}  // namespace

TEST_CASE("answer extraction takes the first yes or no token") {
  CHECK(extract_answer("Yes, there is.", false).value == Answer::kYes);
  CHECK(extract_answer("no.", false).value == Answer::kNo);
  CHECK(extract_answer("I think NO, not yes", false).value == Answer::kNo);
  CHECK(extract_answer("I think NO, not yes", false, TokenRule::kLast).value == Answer::kYes);
  CHECK(extract_answer("Nobody knows, yesterday", false).value == Answer::kUnknown);
  CHECK(extract_answer("", false).value == Answer::kUnknown);
  const ExtractedAnswer span = extract_answer("Well, yes.", false);
  REQUIRE(span.matched_span.has_value());
  CHECK(span.matched_span->first == 6);
  CHECK(span.matched_span->second == 9);
}

TEST_CASE("caption mode skips a leading caption sentence") {
  const std::string r = "A sign that says no parking. Yes, it does.";
  CHECK(extract_answer(r, false).value == Answer::kNo);
  CHECK(extract_answer(r, true).value == Answer::kYes);
  CHECK(extract_answer("No. ", true).value == Answer::kNo);
}

TEST_CASE("hand worked example gives one half everywhere") {
  const std::vector<LabeledAnswer> pairs{{answer(Answer::kYes), Label::kYes},
                                         {answer(Answer::kYes), Label::kNo},
                                         {answer(Answer::kNo), Label::kNo},
                                         {answer(Answer::kNo), Label::kYes}};
  const MetricsReport m = compute_metrics(pairs);
  CHECK(m.accuracy == 0.5);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == 0.5);
}

TEST_CASE("unknown answers count as wrong and as negative predictions") {
  const std::vector<LabeledAnswer> pairs{{answer(Answer::kUnknown), Label::kYes},
                                         {answer(Answer::kUnknown), Label::kNo},
                                         {answer(Answer::kYes), Label::kYes}};
  const MetricsReport m = compute_metrics(pairs);
  CHECK(m.accuracy == doctest::Approx(1.0 / 3.0));
  CHECK(m.unknown_count == 2);
  CHECK(m.confusion.fn == 1);
  CHECK(m.confusion.tn == 1);
  CHECK(m.recall == 0.5);
  CHECK(m.precision == 1.0);
}

TEST_CASE("degenerate inputs yield zeros") {
  CHECK(compute_metrics(std::vector<LabeledAnswer>{}).accuracy == 0.0);
  const std::vector<LabeledAnswer> none_yes{{answer(Answer::kNo), Label::kNo}};
  const MetricsReport m = compute_metrics(none_yes);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.accuracy == 1.0);
  const std::vector<LabeledAnswer> open{{answer(Answer::kNo), Label::kOpen}};
  CHECK_THROWS_AS(compute_metrics(open), InputError);
}

TEST_CASE("compute_metrics matches the brute force reference") {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 300; ++t) {
    std::vector<LabeledAnswer> pairs(gen() % 40);
    for (auto& p : pairs) {
      p.first = answer(static_cast<Answer>(gen() % 3));
      p.second = gen() % 2 ? Label::kYes : Label::kNo;
    }
    const MetricsReport m = compute_metrics(pairs);
    const BruteForce b = brute_force(pairs);
    CHECK(m.accuracy == b.accuracy);
    CHECK(m.precision == b.precision);
    CHECK(m.recall == b.recall);
    CHECK(m.f1 == b.f1);
    CHECK(m.confusion.tp == b.tp);
    CHECK(m.confusion.fp == b.fp);
    CHECK(m.confusion.tn == b.tn);
    CHECK(m.confusion.fn == b.fn);
  }
}

TEST_CASE("per policy table shows every column and dashes for empty cells") {
  std::vector<EvalRecord> records;
  auto add = [&](std::optional<Policy> p, const char* response, Label label) {
    records.push_back({"r", "i", p, "q", label, response});
  };
  add(std::nullopt, "Yes", Label::kYes);
  add(std::nullopt, "No", Label::kYes);
  add(Policy::kHard, "Yes", Label::kYes);
  add(Policy::kHard, "Yes", Label::kNo);
  add(Policy::kSpell, "No", Label::kNo);
  const PolicyReport report = per_policy_report(records, false);
  CHECK(report.augmented.n == 3);
  CHECK(report.original.n == 2);
  CHECK(report.augmented.accuracy == doctest::Approx(2.0 / 3.0));

  const std::string table = render_policy_table(report, "toy");
  for (const char* col : {"Hard", "Easy", "Short", "Long", "Rewrite", "Spell", "Append", "Overall"}) {
    CHECK(table.find(col) != std::string::npos);
  }
  CHECK(table.find("50.0%") != std::string::npos);
  CHECK(table.find("100.0%") != std::string::npos);
  CHECK(table.find("66.7%") != std::string::npos);
  CHECK(table.find("\xE2\x80\x94") != std::string::npos);
  CHECK(table.find("Original prompts: 50.0% (n=2)") != std::string::npos);

  const OrderedJson j = report_to_json(report);
  CHECK(j["per_policy"]["easy"]["accuracy"].is_null());
  CHECK(j["per_policy"]["hard"]["n"] == 2);
}
