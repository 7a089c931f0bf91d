#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "augcap/augmenter.hpp"
#include "augcap/cug.hpp"
#include "augcap/errors.hpp"
#include "augcap/policy.hpp"
#include "augcap/sampler.hpp"
#include "json.hpp"

namespace augcap {

enum class Label { kYes, kNo, kOpen };

std::string_view to_string(Label label);
Label parse_label(std::string_view name);

// One QA instruct-tuning item.
struct PromptRecord {
  std::string id;
  std::string image_id;
  std::string prompt;
  std::string response;
  Label label = Label::kOpen;
  std::string source;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

// One training row carrying everything the composite loss needs.
struct ManifestRecord {
  std::string record_id;
  std::string image_id;
  std::string original_prompt;
  std::vector<AugmentedPrompt> pool;
  SampleOutcome sampled;
  Caption caption;
  CugTarget target;
  double epsilon = 0.5;
  double lambda = 0.5;
  std::uint64_t build_seed = 0;
  std::uint64_t record_seed = 0;

  // Thresholded scores in pool order; missing scores read as 0.
  std::vector<double> scores() const;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// One row of an evaluation set. policy == std::nullopt marks the original prompt.
struct EvalRecord {
  std::string record_id;
  std::string image_id;
  std::optional<Policy> policy;
  std::string prompt_shown;
  Label gt_label = Label::kYes;
  std::string model_response;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

inline constexpr std::string_view kOriginalTag = "original";

std::string policy_tag(const std::optional<Policy>& policy);
std::optional<Policy> parse_policy_tag(std::string_view tag);

// Intermediate row written by the stage-wise subcommands (augment, score, sample).
struct PoolRecord {
  PromptRecord record;
  std::vector<AugmentedPrompt> pool;
  std::optional<double> epsilon;
  std::optional<SampleOutcome> sampled;

  friend bool operator==(const PoolRecord&, const PoolRecord&) = default;
};

// ---------------------------------------------------------------------------
// JSON conversion. Field names follow the type definitions above.

using OrderedJson = nlohmann::ordered_json;

OrderedJson to_json(const PromptRecord& r);
OrderedJson to_json(const AugmentedPrompt& item);
OrderedJson to_json(const SampleOutcome& s);
OrderedJson to_json(const Caption& c);
OrderedJson to_json(const CugTarget& t);
OrderedJson to_json(const ManifestRecord& r);
OrderedJson to_json(const EvalRecord& r);
OrderedJson to_json(const PoolRecord& r);

// Each throws DataError describing the first missing or mistyped field.
PromptRecord prompt_record_from_json(const nlohmann::json& j);
AugmentedPrompt augmented_prompt_from_json(const nlohmann::json& j, std::string_view parent_id);
SampleOutcome sample_outcome_from_json(const nlohmann::json& j);
Caption caption_from_json(const nlohmann::json& j);
ManifestRecord manifest_record_from_json(const nlohmann::json& j);
EvalRecord eval_record_from_json(const nlohmann::json& j);
PoolRecord pool_record_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// JSON-lines files. Output files start with a {"header": {...}} line holding the
// resolved run configuration; readers skip it.

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

class MalformedInputError : public DataError {
 public:
  MalformedInputError(const std::string& message, std::vector<LineError> errors)
      : DataError(message), errors_(std::move(errors)) {}
  const std::vector<LineError>& errors() const noexcept { return errors_; }

 private:
  std::vector<LineError> errors_;
};

struct QaLoadResult {
  std::vector<PromptRecord> records;
  std::vector<LineError> errors;
};

inline constexpr double kMaxMalformedFraction = 0.01;

// Malformed lines are collected with their line numbers. More than
// `max_malformed_fraction` of non-blank lines malformed raises MalformedInputError;
// duplicate ids raise DuplicateIdError; an unreadable file raises DataError.
QaLoadResult load_qa_pairs(const std::filesystem::path& path,
                           double max_malformed_fraction = kMaxMalformedFraction);

enum class CaptionFormat { kCocoAnnotations, kPlainJsonl };

std::string_view to_string(CaptionFormat format);
CaptionFormat parse_caption_format(std::string_view name);

using CaptionIndex = std::map<std::string, std::vector<Caption>>;

// coco_annotations: {"annotations": [{"id", "image_id", "caption"}, ...]}.
// plain_jsonl: one {"image_id", "caption", "source"?, "id"?} per line.
// Empty caption text raises DataError.
CaptionIndex load_captions(const std::filesystem::path& path, CaptionFormat format,
                           CaptionSource default_source = CaptionSource::kHuman);

// Reads every non-header line as JSON. Throws DataError on unreadable files or lines.
struct JsonLines {
  std::optional<nlohmann::json> header;
  std::vector<nlohmann::json> rows;
};
JsonLines read_json_lines(const std::filesystem::path& path);

// Writes the header line (when given) and one compact JSON document per row.
void write_json_lines(const std::filesystem::path& path, const std::optional<OrderedJson>& header,
                      const std::vector<OrderedJson>& rows);

template <typename T>
std::vector<OrderedJson> to_json_rows(const std::vector<T>& items) {
  std::vector<OrderedJson> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(to_json(item));
  return rows;
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
std::vector<EvalRecord> read_eval_records(const std::filesystem::path& path);
std::vector<PoolRecord> read_pool_records(const std::filesystem::path& path);

}  // namespace augcap
