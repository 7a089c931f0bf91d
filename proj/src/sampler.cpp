#include "augcap/sampler.hpp"

#include <algorithm>

#include "augcap/errors.hpp"

namespace augcap {

std::vector<double> exact_distribution(std::span<const double> scores) {
  double total = 0.0;
  for (double s : scores) {
    if (s > 0.0) total += s;
  }
  if (total <= 0.0) return {};
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s > 0.0 ? s / total : 0.0);
  return out;
}

WeightedSampler::WeightedSampler(std::span<const double> scores)
    : probabilities_(exact_distribution(scores)) {
  double running = 0.0;
  cumulative_.reserve(probabilities_.size());
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    running += probabilities_[i];
    cumulative_.push_back(running);
    if (probabilities_[i] > 0.0) last_support_ = i;
  }
}

std::size_t WeightedSampler::draw(Rng& rng) const {
  const double u = rng.uniform01();
  // First index whose cumulative weight exceeds u. Zero-weight entries share their
  // predecessor's cumulative value and can never be the first to exceed it.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_support_;  // rounding left the total below 1
  return static_cast<std::size_t>(it - cumulative_.begin());
}

SampleOutcome sample_prompt(const PromptPool& pool, const ScoreVector& scores,
                            std::uint64_t rng_seed) {
  if (scores.scores.size() != pool.items.size()) {
    throw InputError("score vector has " + std::to_string(scores.scores.size()) +
                     " entries for a pool of " + std::to_string(pool.items.size()));
  }
  SampleOutcome out;
  out.seed = rng_seed;
  const WeightedSampler sampler(scores.scores);
  if (sampler.empty()) {
    out.chosen_text = pool.original;
    return out;
  }
  Rng rng(rng_seed);
  const std::size_t index = sampler.draw(rng);
  out.chosen_index = index;
  out.chosen_text = pool.items[index].text;
  out.probabilities = sampler.probabilities();
  return out;
}

}  // namespace augcap
