#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "augcap/augmenter.hpp"
#include "augcap/cug.hpp"
#include "augcap/evaluator.hpp"
#include "augcap/records.hpp"

namespace augcap {

struct BuildConfig {
  std::vector<Policy> policies{all_policies().begin(), all_policies().end()};
  double epsilon = 0.5;
  double lambda = 0.5;
  std::size_t pool_size = kPolicyCount;
  std::uint64_t seed = 0;
  CaptionStrategy caption_strategy = CaptionStrategy::kFirstById;
  std::size_t parallelism = 1;

  // Throws ConfigError when a value is out of range.
  void validate() const;
  OrderedJson to_json() const;
};

// The policy list repeated cyclically up to pool_size entries.
std::vector<Policy> policy_schedule(const BuildConfig& config);

// Per-record seed, independent of record order: derive_seed(run_seed, record_id).
std::uint64_t record_seed(std::uint64_t run_seed, std::string_view record_id);

struct BuildSummary {
  std::size_t records = 0;
  std::size_t pool_items = 0;
  std::size_t failed_items = 0;
  std::size_t unchanged_items = 0;
  std::size_t zero_score_items = 0;
  std::size_t original_fallbacks = 0;
  std::size_t skipped_records = 0;
  std::size_t eval_records = 0;
  std::vector<std::string> warnings;

  OrderedJson to_json() const;
};

// Augment, score and sample one record; the stage-wise subcommands reuse these.
PoolRecord augment_record(const PromptRecord& record, const BuildConfig& config,
                          const PromptGenerator& generator, BuildSummary& summary);
void score_record(PoolRecord& row, const BuildConfig& config, const Embedder& embedder,
                  BuildSummary& summary);
void sample_record(PoolRecord& row, const BuildConfig& config, BuildSummary& summary);

struct ManifestBuild {
  std::vector<ManifestRecord> records;
  BuildSummary summary;
};

// One ManifestRecord per input record, in input order. Records are processed in
// parallel up to config.parallelism; output does not depend on the worker count.
// Throws MissingCaptionError when a record's image has no caption.
ManifestBuild build_manifest(std::span<const PromptRecord> records, const CaptionIndex& captions,
                             const BuildConfig& config, const PromptGenerator& generator,
                             const Embedder& embedder);

struct TestsetBuild {
  std::vector<EvalRecord> records;
  BuildSummary summary;
};

// For every yes/no record: the original prompt plus each augmented prompt whose raw
// score reaches epsilon, tagged with its policy. Open-label records are skipped.
TestsetBuild build_augmented_testset(std::span<const PromptRecord> records,
                                     const BuildConfig& config, const PromptGenerator& generator,
                                     const Embedder& embedder);

}  // namespace augcap
