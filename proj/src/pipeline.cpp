#include "augcap/pipeline.hpp"

#include "augcap/errors.hpp"
#include "augcap/parallel.hpp"
#include "augcap/rng.hpp"
#include "augcap/sampler.hpp"

namespace augcap {

namespace {

void merge(BuildSummary& into, const BuildSummary& part) {
  into.records += part.records;
  into.pool_items += part.pool_items;
  into.failed_items += part.failed_items;
  into.unchanged_items += part.unchanged_items;
  into.zero_score_items += part.zero_score_items;
  into.original_fallbacks += part.original_fallbacks;
  into.skipped_records += part.skipped_records;
  into.eval_records += part.eval_records;
  into.warnings.insert(into.warnings.end(), part.warnings.begin(), part.warnings.end());
}

ScoreVector scores_of(const PoolRecord& row, double epsilon) {
  ScoreVector scores;
  scores.epsilon = epsilon;
  for (const auto& item : row.pool) scores.scores.push_back(item.score.value_or(0.0));
  return scores;
}

}  // namespace

void BuildConfig::validate() const {
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (pool_size == 0) throw ConfigError("pool size N must be at least 1");
  if (parallelism == 0) throw ConfigError("parallelism must be at least 1");
}

OrderedJson BuildConfig::to_json() const {
  return OrderedJson{{"policies", format_policy_list(policies)},
                     {"epsilon", epsilon},
                     {"lambda", lambda},
                     {"n", pool_size},
                     {"seed", seed},
                     {"caption_strategy", to_string(caption_strategy)}};
}

std::vector<Policy> policy_schedule(const BuildConfig& config) {
  std::vector<Policy> schedule;
  schedule.reserve(config.pool_size);
  for (std::size_t i = 0; i < config.pool_size; ++i) {
    schedule.push_back(config.policies[i % config.policies.size()]);
  }
  return schedule;
}

std::uint64_t record_seed(std::uint64_t run_seed, std::string_view record_id) {
  return derive_seed(run_seed, record_id);
}

OrderedJson BuildSummary::to_json() const {
  return OrderedJson{{"records", records},
                     {"pool_items", pool_items},
                     {"failed_items", failed_items},
                     {"unchanged_items", unchanged_items},
                     {"zero_score_items", zero_score_items},
                     {"original_fallbacks", original_fallbacks},
                     {"skipped_records", skipped_records},
                     {"eval_records", eval_records},
                     {"warnings", warnings}};
}

PoolRecord augment_record(const PromptRecord& record, const BuildConfig& config,
                          const PromptGenerator& generator, BuildSummary& summary) {
  const std::uint64_t seed = derive_seed(record_seed(config.seed, record.id), "augment");
  AugmentResult result =
      augment_prompt(record.prompt, policy_schedule(config), generator, seed, record.id);
  for (const auto& failure : result.failures) {
    summary.warnings.push_back("record " + record.id + ": policy " +
                               std::string(to_string(failure.policy)) +
                               " dropped: " + failure.reason);
  }
  summary.failed_items += result.failures.size();
  summary.unchanged_items += result.unchanged;
  summary.pool_items += result.pool.items.size();
  return PoolRecord{record, std::move(result.pool.items), std::nullopt, std::nullopt};
}

void score_record(PoolRecord& row, const BuildConfig& config, const Embedder& embedder,
                  BuildSummary& summary) {
  PromptPool pool{row.record.prompt, std::move(row.pool)};
  const ScoreVector scores = score_pool(pool, embedder, config.epsilon);
  row.pool = std::move(pool.items);
  row.epsilon = config.epsilon;
  for (double s : scores.scores) {
    if (s == 0.0) ++summary.zero_score_items;
  }
}

void sample_record(PoolRecord& row, const BuildConfig& config, BuildSummary& summary) {
  const double epsilon = row.epsilon.value_or(config.epsilon);
  const PromptPool pool{row.record.prompt, row.pool};
  const std::uint64_t seed = derive_seed(record_seed(config.seed, row.record.id), "sample");
  row.sampled = sample_prompt(pool, scores_of(row, epsilon), seed);
  if (row.sampled->is_original()) ++summary.original_fallbacks;
}

ManifestBuild build_manifest(std::span<const PromptRecord> records, const CaptionIndex& captions,
                             const BuildConfig& config, const PromptGenerator& generator,
                             const Embedder& embedder) {
  config.validate();
  // Resolve captions up front so a missing one fails before any remote work.
  for (const auto& r : records) {
    auto it = captions.find(r.image_id);
    if (it == captions.end() || it->second.empty()) throw MissingCaptionError(r.image_id);
    if (r.response.empty()) throw DataError("record " + r.id + " has an empty response");
  }

  std::vector<std::optional<ManifestRecord>> rows(records.size());
  std::vector<BuildSummary> parts(records.size());
  parallel_for(records.size(), config.parallelism, [&](std::size_t i) {
    const PromptRecord& r = records[i];
    BuildSummary& part = parts[i];
    part.records = 1;
    PoolRecord row = augment_record(r, config, generator, part);
    score_record(row, config, embedder, part);
    sample_record(row, config, part);
    const std::uint64_t rs = record_seed(config.seed, r.id);
    Caption caption = select_caption(captions.at(r.image_id), config.caption_strategy,
                                     derive_seed(rs, "caption"), r.image_id);
    CugTarget target = compose_target(caption, r.response);
    rows[i] = ManifestRecord{r.id,
                             r.image_id,
                             r.prompt,
                             std::move(row.pool),
                             std::move(*row.sampled),
                             std::move(caption),
                             std::move(target),
                             config.epsilon,
                             config.lambda,
                             config.seed,
                             rs};
  });

  ManifestBuild out;
  out.records.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.records.push_back(std::move(*rows[i]));
    merge(out.summary, parts[i]);
  }
  return out;
}

TestsetBuild build_augmented_testset(std::span<const PromptRecord> records,
                                     const BuildConfig& config, const PromptGenerator& generator,
                                     const Embedder& embedder) {
  config.validate();
  std::vector<std::vector<EvalRecord>> rows(records.size());
  std::vector<BuildSummary> parts(records.size());
  parallel_for(records.size(), config.parallelism, [&](std::size_t i) {
    const PromptRecord& r = records[i];
    BuildSummary& part = parts[i];
    if (r.label == Label::kOpen) {
      part.skipped_records = 1;
      return;
    }
    part.records = 1;
    PoolRecord row = augment_record(r, config, generator, part);
    score_record(row, config, embedder, part);
    auto& out = rows[i];
    out.push_back(EvalRecord{r.id, r.image_id, std::nullopt, r.prompt, r.label, {}});
    for (const auto& item : row.pool) {
      if (item.raw_score.value_or(0.0) >= config.epsilon) {
        out.push_back(EvalRecord{r.id, r.image_id, item.policy, item.text, r.label, {}});
      }
    }
    part.eval_records = out.size();
  });

  TestsetBuild out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto& e : rows[i]) out.records.push_back(std::move(e));
    merge(out.summary, parts[i]);
  }
  return out;
}

}  // namespace augcap
