#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augcap/augmenter.hpp"
#include "augcap/evaluator.hpp"
#include "augcap/rng.hpp"

namespace augcap {

struct SampleOutcome {
  std::string chosen_text;
  // std::nullopt is the ORIGINAL sentinel: every score was zero.
  std::optional<std::size_t> chosen_index;
  // Normalized weights over the pool; empty when ORIGINAL was chosen.
  std::vector<double> probabilities;
  std::uint64_t seed = 0;

  bool is_original() const noexcept { return !chosen_index.has_value(); }

  friend bool operator==(const SampleOutcome&, const SampleOutcome&) = default;
};

// scores / sum(scores), or an empty vector when the sum is zero.
std::vector<double> exact_distribution(std::span<const double> scores);

// Draws indices with probability proportional to the scores. The draw compares one
// uniform variate against the cumulative normalized weights, so zero-weight entries are
// never returned.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> scores);

  bool empty() const noexcept { return probabilities_.empty(); }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

  // Precondition: !empty().
  std::size_t draw(Rng& rng) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  std::size_t last_support_ = 0;
};

// Throws InputError when scores and pool have different lengths.
SampleOutcome sample_prompt(const PromptPool& pool, const ScoreVector& scores,
                            std::uint64_t rng_seed);

}  // namespace augcap
