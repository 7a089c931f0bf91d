#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augcap/augmenter.hpp"
#include "augcap/http.hpp"

namespace augcap {

// Unit-length embedding. Construction normalizes, so every instance has L2 norm 1.
class EmbeddingVector {
 public:
  // Throws EmbeddingError for empty, non-finite or all-zero input.
  static EmbeddingVector normalized(std::vector<double> values);

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One vector per text, same order. Must be safe to call concurrently.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;
  virtual std::string id() const = 0;
};

// Term-frequency vector over lowercased [a-z0-9]+ tokens, each token hashed with
// 64-bit FNV-1a into `dimension` buckets, then L2-normalized.
class HashedTfEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 4096;

  explicit HashedTfEmbedder(std::size_t dimension = kDefaultDimension);

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;
  std::string id() const override;

  std::size_t bucket(std::string_view token) const;
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
};

// OpenAI-style embedding endpoint: POST {base_url}/embeddings with
// {"model", "input": [texts]} and read data[i].embedding.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(Endpoint endpoint, std::size_t batch_size = 64);

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;
  std::string id() const override;

 private:
  Endpoint endpoint_;
  std::size_t batch_size_;
};

// Throws InputError when the text is blank.
EmbeddingVector embed(std::string_view text, const Embedder& embedder);

// Dot product; throws InputError when dimensions differ.
double similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct ScoreVector {
  std::vector<double> scores;
  double epsilon = 0.0;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

// Entries below epsilon (including negatives and NaN) become 0; others pass through.
ScoreVector threshold_scores(std::span<const double> raw, double epsilon);

// Scores every pool item against the original prompt and fills raw_score/score.
// Items without any embeddable token score 0.
ScoreVector score_pool(PromptPool& pool, const Embedder& embedder, double epsilon);

}  // namespace augcap
