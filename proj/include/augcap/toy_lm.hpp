#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augcap/cug.hpp"
#include "augcap/records.hpp"
#include "json.hpp"

namespace augcap {

// Reserved symbols (Unicode private use area) that frame a conditioning context:
//   <img> image_id <prompt> prompt <target> target <end>
// The image-id token stands in for the visual features of the image.
namespace lm_token {
inline constexpr char32_t kImage = U'\uE000';
inline constexpr char32_t kPrompt = U'\uE001';
inline constexpr char32_t kTarget = U'\uE002';
inline constexpr char32_t kPad = U'\uE003';
inline constexpr char32_t kEnd = U'\uE004';
inline constexpr char32_t kUnknown = U'\uE005';
}  // namespace lm_token

struct CorpusEntry {
  std::string image_id;
  std::string prompt;
  std::string target;
};

std::u32string conditioning_context(std::string_view image_id, std::string_view prompt);

// Character-level n-gram model with add-k smoothing, trained only on target
// positions, so it models p(target | image_id, prompt).
class NgramModel {
 public:
  // Throws InputError for order < 1, k <= 0 or an empty corpus.
  static NgramModel fit(std::span<const CorpusEntry> corpus, int order, double k);

  int order() const noexcept { return order_; }
  double smoothing() const noexcept { return k_; }
  const std::vector<char32_t>& vocabulary() const noexcept { return vocabulary_; }

  // p(next | the last order-1 symbols of history), history left-padded with <pad>.
  double probability(std::u32string_view history, char32_t next) const;

  // Mean per-character negative log-likelihood of `target`, teacher-forced.
  double sequence_nll(std::string_view image_id, std::string_view prompt,
                      std::string_view target) const;

  // Greedy continuation after context + forced_prefix, stopping at <end> or max_chars.
  // Ties go to the lowest code point.
  std::string greedy_decode(std::string_view image_id, std::string_view prompt,
                            std::string_view forced_prefix, std::size_t max_chars = 256) const;

  nlohmann::json to_json() const;
  static NgramModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NgramModel load(const std::filesystem::path& path);

  friend bool operator==(const NgramModel&, const NgramModel&) = default;

 private:
  NgramModel() = default;

  char32_t symbol(char32_t c) const;
  std::u32string context_key(std::u32string_view history) const;
  // Sums -ln p over `target` following `history`, appending as it goes.
  double total_nll(std::u32string history, std::u32string_view target) const;

  int order_ = 1;
  double k_ = 1.0;
  std::vector<char32_t> vocabulary_;  // sorted
  std::map<std::u32string, std::map<char32_t, std::uint64_t>> counts_;
  std::map<std::u32string, std::uint64_t> totals_;
};

double sequence_nll(const NgramModel& model, std::string_view image_id, std::string_view prompt,
                    std::string_view target);
// Caption characters are scored first, then the answer, in one left-to-right pass.
double sequence_nll(const NgramModel& model, std::string_view image_id, std::string_view prompt,
                    const CugTarget& target);

enum class LossMode { kExact, kMonteCarlo };

struct LossOptions {
  LossMode mode = LossMode::kExact;
  std::uint64_t seed = 0;
  std::size_t draws = 200000;
};

struct LossBreakdown {
  double base = 0.0;
  double augmented = 0.0;
  double total = 0.0;
  double lambda = 0.0;
  LossMode mode = LossMode::kExact;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  // Standard error of the Monte-Carlo mean; 0 in exact mode.
  double std_error = 0.0;
};

std::string_view to_string(LossMode mode);

// total = base + lambda * augmented, where base scores the original prompt and
// augmented is the expected loss over prompts drawn from the scored pool. An all-zero
// pool falls back to the original prompt, giving total = (1 + lambda) * base.
LossBreakdown composite_loss(const NgramModel& model, const ManifestRecord& record,
                             const LossOptions& options = {});

OrderedJson to_json(const LossBreakdown& loss);

}  // namespace augcap
