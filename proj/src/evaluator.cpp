#include "augcap/evaluator.hpp"

#include <cmath>

#include "augcap/errors.hpp"
#include "augcap/rng.hpp"
#include "augcap/text.hpp"

namespace augcap {

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  if (values.empty()) throw EmbeddingError("embedding has dimension 0");
  double sum_sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw EmbeddingError("embedding contains a non-finite value");
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) throw EmbeddingError("embedding is the zero vector");
  const double norm = std::sqrt(sum_sq);
  for (double& v : values) v /= norm;
  return EmbeddingVector(std::move(values));
}

HashedTfEmbedder::HashedTfEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw InputError("embedding dimension must be positive");
}

std::size_t HashedTfEmbedder::bucket(std::string_view token) const {
  return static_cast<std::size_t>(fnv1a64(token) % dimension_);
}

std::vector<EmbeddingVector> HashedTfEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto tokens = text::alnum_tokens(t);
    if (tokens.empty()) {
      throw InputError("text \"" + t + "\" has no alphanumeric tokens to embed");
    }
    std::vector<double> tf(dimension_, 0.0);
    for (const auto& tok : tokens) tf[bucket(tok)] += 1.0;
    out.push_back(EmbeddingVector::normalized(std::move(tf)));
  }
  return out;
}

std::string HashedTfEmbedder::id() const {
  return "hashed_tf_fnv1a64_d" + std::to_string(dimension_);
}

RemoteEmbedder::RemoteEmbedder(Endpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(batch_size == 0 ? 1 : batch_size) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
    const auto chunk = texts.subspan(start, std::min(batch_size_, texts.size() - start));
    nlohmann::json request{{"model", endpoint_.model},
                           {"input", std::vector<std::string>(chunk.begin(), chunk.end())}};
    nlohmann::json reply;
    try {
      reply = post_json(endpoint_, "/embeddings", request);
    } catch (const TransportError& e) {
      throw EmbeddingError(std::string("embedding request failed: ") + e.what());
    }
    try {
      const auto& data = reply.at("data");
      if (data.size() != chunk.size()) {
        throw EmbeddingError("embedding endpoint returned " + std::to_string(data.size()) +
                             " vectors for " + std::to_string(chunk.size()) + " inputs");
      }
      std::vector<std::vector<double>> vectors(chunk.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t slot = data[i].contains("index") ? data[i].at("index").get<std::size_t>() : i;
        if (slot >= vectors.size()) throw EmbeddingError("embedding index out of range");
        vectors[slot] = data[i].at("embedding").get<std::vector<double>>();
      }
      for (auto& v : vectors) {
        if (!out.empty() && v.size() != out.front().dimension()) {
          throw EmbeddingError("embedding endpoint returned inconsistent dimensions");
        }
        out.push_back(EmbeddingVector::normalized(std::move(v)));
      }
    } catch (const nlohmann::json::exception& e) {
      throw EmbeddingError(std::string("malformed embedding reply: ") + e.what());
    }
  }
  return out;
}

std::string RemoteEmbedder::id() const {
  return "remote:" + endpoint_.base_url + "#" + endpoint_.model;
}

EmbeddingVector embed(std::string_view text, const Embedder& embedder) {
  if (text::is_blank(text)) throw InputError("cannot embed empty text");
  const std::string owned(text);
  auto batch = embedder.embed_batch(std::span<const std::string>(&owned, 1));
  return std::move(batch.front());
}

double similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw InputError("embedding dimensions differ (" + std::to_string(a.dimension()) + " vs " +
                     std::to_string(b.dimension()) + ")");
  }
  const auto x = a.values();
  const auto y = b.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return dot;
}

ScoreVector threshold_scores(std::span<const double> raw, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError("epsilon must lie in [0, 1]");
  }
  ScoreVector out;
  out.epsilon = epsilon;
  out.scores.reserve(raw.size());
  for (double s : raw) {
    // The comparison is false for NaN, which therefore maps to 0.
    out.scores.push_back(s >= epsilon && s > 0.0 ? s : 0.0);
  }
  return out;
}

ScoreVector score_pool(PromptPool& pool, const Embedder& embedder, double epsilon) {
  const EmbeddingVector reference = embed(pool.original, embedder);
  std::vector<std::string> texts;
  texts.reserve(pool.items.size());
  for (const auto& item : pool.items) texts.push_back(item.text);

  std::vector<double> raw(pool.items.size(), 0.0);
  try {
    const auto vectors = embedder.embed_batch(texts);
    for (std::size_t i = 0; i < vectors.size(); ++i) raw[i] = similarity(reference, vectors[i]);
  } catch (const InputError&) {
    // Some item is not embeddable; score item by item so the rest still count.
    for (std::size_t i = 0; i < texts.size(); ++i) {
      try {
        raw[i] = similarity(reference, embed(texts[i], embedder));
      } catch (const InputError&) {
        raw[i] = 0.0;
      }
    }
  }
  ScoreVector scores = threshold_scores(raw, epsilon);
  for (std::size_t i = 0; i < pool.items.size(); ++i) {
    pool.items[i].raw_score = raw[i];
    pool.items[i].score = scores.scores[i];
  }
  return scores;
}

}  // namespace augcap
