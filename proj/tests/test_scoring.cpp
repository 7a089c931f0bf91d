#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"

#include "augcap/errors.hpp"
#include "augcap/evaluator.hpp"
#include "augcap/sampler.hpp"
#include "support.hpp"

using namespace augcap;

namespace {

double sim(std::string_view a, std::string_view b) {
  const HashedTfEmbedder e;
  return similarity(embed(a, e), embed(b, e));
}

}  // namespace

// Frozen from tests/oracles/hashed_tf_reference.py.
TEST_CASE("hashed embedder matches the reference implementation") {
  const HashedTfEmbedder e;
  CHECK(e.bucket("a") == 3212);
  CHECK(e.bucket("dog") == 2281);
  CHECK(e.bucket("is") == 469);
  CHECK(e.bucket("there") == 2909);
  CHECK(sim("is there a dog", "is there a cat") == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sim("Is there a dog in the image?", "Do you see a dog in the image?") ==
        doctest::Approx(0.6681531047810608).epsilon(1e-14));
  CHECK(sim("Is there a dog in the image?", "Is there a dog in image?") ==
        doctest::Approx(0.9258200997725515).epsilon(1e-14));
  CHECK(sim("a a b", "a b b") == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(sim("Two cats sleep on a red sofa.", "Is the sofa red?") ==
        doctest::Approx(0.3779644730092272).epsilon(1e-14));
  CHECK(e.id() == "hashed_tf_fnv1a64_d4096");
}

TEST_CASE("embedding contract on random pairs") {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 300; ++i) {
    const std::string a = testing::random_sentence(gen, 1, 10);
    const std::string b = testing::random_sentence(gen, 1, 10);
    CHECK(std::abs(sim(a, a) - 1.0) <= 1e-6);
    CHECK(sim(a, b) == sim(b, a));
    CHECK(std::abs(sim(a, b)) <= 1.0 + 1e-6);
  }
}

TEST_CASE("embedding rejects degenerate inputs") {
  const HashedTfEmbedder e;
  CHECK_THROWS_AS(embed("?!?", e), InputError);
  CHECK_THROWS_AS(embed("", e), InputError);
  CHECK_THROWS_AS(EmbeddingVector::normalized({}), EmbeddingError);
  CHECK_THROWS_AS(EmbeddingVector::normalized({0.0, 0.0}), EmbeddingError);
  CHECK_THROWS_AS(EmbeddingVector::normalized({1.0, std::nan("")}), EmbeddingError);
  const auto a = EmbeddingVector::normalized({1.0, 0.0});
  const auto b = EmbeddingVector::normalized({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(similarity(a, b), InputError);
}

TEST_CASE("threshold zeroes low, negative and NaN scores") {
  const std::vector<double> raw{0.9, 0.5, 0.4999, -0.3, std::nan(""), 1.0};
  const ScoreVector s = threshold_scores(raw, 0.5);
  const std::vector<double> want{0.9, 0.5, 0.0, 0.0, 0.0, 1.0};
  CHECK(s.scores == want);
  CHECK(s.epsilon == 0.5);
  CHECK_THROWS_AS(threshold_scores(raw, 1.5), InputError);
  CHECK_THROWS_AS(threshold_scores(raw, -0.1), InputError);
}

TEST_CASE("threshold is idempotent and monotone in epsilon") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.2, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> raw(8);
    for (auto& v : raw) v = u(gen);
    const double eps = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    const ScoreVector once = threshold_scores(raw, eps);
    CHECK(threshold_scores(once.scores, eps) == once);
    const ScoreVector stricter = threshold_scores(raw, std::min(1.0, eps + 0.1));
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (stricter.scores[i] > 0.0) CHECK(once.scores[i] > 0.0);
    }
  }
}

TEST_CASE("score_pool fills raw and thresholded scores") {
  PromptPool pool;
  pool.original = "Is there a dog in the image?";
  pool.items.push_back({"r", Policy::kEasy, "Do you see a dog in the image?"});
  pool.items.push_back({"r", Policy::kShort, "Is there a dog in image?"});
  pool.items.push_back({"r", Policy::kHard, "Two cats sleep on a red sofa."});
  pool.items.push_back({"r", Policy::kSpell, "???"});
  const ScoreVector s = score_pool(pool, HashedTfEmbedder{}, 0.7);
  REQUIRE(s.scores.size() == 4);
  CHECK(*pool.items[0].raw_score == doctest::Approx(0.6681531047810608));
  CHECK(*pool.items[0].score == 0.0);
  CHECK(*pool.items[1].score == doctest::Approx(0.9258200997725515));
  CHECK(*pool.items[3].raw_score == 0.0);
  CHECK(s.scores[0] == 0.0);
  CHECK(s.scores[1] == *pool.items[1].score);
}

TEST_CASE("exact distribution normalizes positive scores") {
  const std::vector<double> scores{0.5, 0.0, 0.25, 0.25};
  const auto p = exact_distribution(scores);
  const std::vector<double> want{0.5, 0.0, 0.25, 0.25};
  CHECK(p == want);
  CHECK(exact_distribution(std::vector<double>{0.0, 0.0}).empty());
  CHECK(exact_distribution(std::vector<double>{}).empty());
}

TEST_CASE("sampler falls back to the original when every score is zero") {
  PromptPool pool{"orig?", {{"r", Policy::kHard, "a"}, {"r", Policy::kEasy, "b"}}};
  const SampleOutcome out = sample_prompt(pool, ScoreVector{{0.0, 0.0}, 0.5}, 3);
  CHECK(out.is_original());
  CHECK(out.chosen_text == "orig?");
  CHECK_THROWS_AS(sample_prompt(pool, ScoreVector{{0.0}, 0.5}, 3), InputError);
}

TEST_CASE("sampler is reproducible and only picks positive weights") {
  PromptPool pool{"orig?", {{"r", Policy::kHard, "a"}, {"r", Policy::kEasy, "b"},
                            {"r", Policy::kLong, "c"}}};
  const ScoreVector scores{{0.0, 0.6, 0.9}, 0.5};
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const SampleOutcome a = sample_prompt(pool, scores, seed);
    CHECK(a == sample_prompt(pool, scores, seed));
    REQUIRE(a.chosen_index.has_value());
    CHECK(*a.chosen_index != 0);
    CHECK(a.chosen_text == pool.items[*a.chosen_index].text);
  }
}

TEST_CASE("sampler frequencies pass a chi-square test") {
  std::mt19937_64 gen(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> w(6);
    for (auto& v : w) v = u(gen) < 0.2 ? 0.0 : u(gen);
    const WeightedSampler sampler(w);
    if (sampler.empty()) continue;
    const auto& p = sampler.probabilities();
    std::vector<double> counts(w.size(), 0.0);
    Rng rng(derive_seed(77, static_cast<std::uint64_t>(trial)));
    const int draws = 50000;
    for (int d = 0; d < draws; ++d) counts[sampler.draw(rng)] += 1.0;
    double stat = 0.0;
    int support = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (p[i] == 0.0) {
        CHECK(counts[i] == 0.0);
        continue;
      }
      ++support;
      const double expected = p[i] * draws;
      stat += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    if (support < 2) continue;
    const boost::math::chi_squared dist(support - 1);
    CHECK(boost::math::cdf(boost::math::complement(dist, stat)) > 0.001);
  }
}

TEST_CASE("sampler probabilities are invariant to scaling scores") {
  const std::vector<double> a{0.5, 0.7, 0.0, 0.9};
  std::vector<double> b;
  for (double v : a) b.push_back(v * 3.0);
  const auto pa = exact_distribution(a);
  const auto pb = exact_distribution(b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-15));
}
