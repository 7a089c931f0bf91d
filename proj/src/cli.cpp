#include "augcap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "augcap/augmenter.hpp"
#include "augcap/errors.hpp"
#include "augcap/evaluator.hpp"
#include "augcap/metrics.hpp"
#include "augcap/parallel.hpp"
#include "augcap/pipeline.hpp"
#include "augcap/records.hpp"
#include "augcap/toy_lm.hpp"

namespace augcap::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct RemoteFlags {
  std::string url;
  std::string model;
};

// Everything a run can be configured with; echoed into every output header.
struct RunConfig {
  std::string subcommand;
  std::string qa_path;
  std::string captions_path;
  std::string caption_format = "coco_annotations";
  std::string machine_captions_path;
  std::string input_path;
  std::string out_path;
  std::string summary_path;
  std::string templates_path;

  std::string policies = "all";
  double epsilon = 0.5;
  double lambda = 0.5;
  std::size_t pool_size = 0;  // 0: one item per listed policy
  std::uint64_t seed = 0;
  std::string caption_strategy = "first_by_id";
  std::string generator = "rule_based";
  std::string embedder = "fallback";
  std::size_t parallelism = 1;

  RemoteFlags generator_remote;
  RemoteFlags embedder_remote;
  RemoteFlags eval_remote;
  std::string api_key_env = "AUGCAP_API_KEY";
  double temperature = 1.0;
  int max_retries = 3;
  int timeout_ms = 60000;

  // report
  bool cug_mode = false;
  bool last_token = false;
  std::string json_path;
  std::string row_label = "model";

  // eval
  bool verify = false;

  // oracle
  int order = 4;
  double smoothing = 0.5;
  std::size_t draws = 200000;
  std::string model_path;
  std::string model_out_path;
};

BuildConfig build_config(const RunConfig& rc) {
  BuildConfig config;
  try {
    config.policies = parse_policy_list(rc.policies);
    config.caption_strategy = parse_caption_strategy(rc.caption_strategy);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  config.epsilon = rc.epsilon;
  config.lambda = rc.lambda;
  config.pool_size = rc.pool_size == 0 ? config.policies.size() : rc.pool_size;
  config.seed = rc.seed;
  config.parallelism = rc.parallelism;
  config.validate();
  return config;
}

Endpoint make_endpoint(const RunConfig& rc, const RemoteFlags& flags) {
  Endpoint e;
  e.base_url = flags.url;
  e.model = flags.model;
  e.api_key_env = rc.api_key_env;
  e.max_retries = rc.max_retries;
  e.timeout = std::chrono::milliseconds(rc.timeout_ms);
  return e;
}

std::unique_ptr<PromptGenerator> make_generator(const RunConfig& rc) {
  if (rc.generator == "rule_based") return std::make_unique<RuleBasedGenerator>();
  if (rc.generator != "remote") throw ConfigError("unknown generator \"" + rc.generator + "\"");
  if (rc.generator_remote.url.empty() || rc.generator_remote.model.empty()) {
    throw ConfigError("--generator remote needs --generator-url and --generator-model");
  }
  TemplateSet templates =
      rc.templates_path.empty() ? TemplateSet::defaults() : TemplateSet::load(rc.templates_path);
  return std::make_unique<ChatCompletionGenerator>(
      ChatSettings{make_endpoint(rc, rc.generator_remote), rc.temperature}, std::move(templates));
}

std::unique_ptr<Embedder> make_embedder(const RunConfig& rc) {
  if (rc.embedder == "fallback") return std::make_unique<HashedTfEmbedder>();
  if (rc.embedder != "remote") throw ConfigError("unknown embedder \"" + rc.embedder + "\"");
  if (rc.embedder_remote.url.empty() || rc.embedder_remote.model.empty()) {
    throw ConfigError("--embedder remote needs --embedder-url and --embedder-model");
  }
  return std::make_unique<RemoteEmbedder>(make_endpoint(rc, rc.embedder_remote));
}

OrderedJson header(const RunConfig& rc, const OrderedJson& config) {
  OrderedJson inputs = OrderedJson::object();
  auto add = [&](const char* key, const std::string& value) {
    if (!value.empty()) inputs[key] = value;
  };
  add("qa", rc.qa_path);
  add("captions", rc.captions_path);
  if (!rc.captions_path.empty()) inputs["caption_format"] = rc.caption_format;
  add("machine_captions", rc.machine_captions_path);
  add("input", rc.input_path);
  add("templates", rc.templates_path);
  return OrderedJson{{"tool", "augcap"},
                     {"version", kVersion},
                     {"subcommand", rc.subcommand},
                     {"inputs", std::move(inputs)},
                     {"config", config}};
}

OrderedJson pipeline_config(const RunConfig& rc, const BuildConfig& config,
                            const PromptGenerator* generator, const Embedder* embedder) {
  OrderedJson j = config.to_json();
  if (generator) j["generator"] = generator->describe();
  if (embedder) j["embedder"] = embedder->id();
  if (generator && generator->provenance() == Provenance::kRemote) {
    j["temperature"] = rc.temperature;
  }
  return j;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required");
  if (!fs::exists(path)) throw ConfigError(std::string(flag) + ": no such file " + path);
}

// Refuses to overwrite any input file.
void check_output(const RunConfig& rc) {
  if (rc.out_path.empty()) throw ConfigError("--out is required");
  for (const std::string* in : {&rc.qa_path, &rc.captions_path, &rc.machine_captions_path,
                                &rc.input_path, &rc.templates_path, &rc.model_path}) {
    if (!in->empty() && fs::exists(*in) && fs::exists(rc.out_path) &&
        fs::equivalent(*in, rc.out_path)) {
      throw ConfigError("--out would overwrite input file " + *in);
    }
  }
}

void log_summary(std::ostream& err, const BuildSummary& summary) {
  err << "records=" << summary.records << " pool_items=" << summary.pool_items
      << " failed_items=" << summary.failed_items << " unchanged_items=" << summary.unchanged_items
      << " zero_score_items=" << summary.zero_score_items
      << " original_fallbacks=" << summary.original_fallbacks
      << " skipped_records=" << summary.skipped_records;
  if (summary.eval_records > 0) err << " eval_records=" << summary.eval_records;
  err << '\n';
  for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
}

void write_summary(const RunConfig& rc, const BuildSummary& summary) {
  if (rc.summary_path.empty()) return;
  std::ofstream out(rc.summary_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + rc.summary_path);
  out << summary.to_json().dump(2) << '\n';
}

std::vector<PromptRecord> load_records(const RunConfig& rc, std::ostream& err) {
  require_file(rc.qa_path, "--qa");
  QaLoadResult loaded = load_qa_pairs(rc.qa_path);
  for (const auto& e : loaded.errors) {
    err << "warning: " << rc.qa_path << " line " << e.line << ": " << e.message << '\n';
  }
  return std::move(loaded.records);
}

// ---------------------------------------------------------------------------

int cmd_augment(const RunConfig& rc, std::ostream& err) {
  check_output(rc);
  const BuildConfig config = build_config(rc);
  const auto generator = make_generator(rc);
  const auto records = load_records(rc, err);
  std::vector<PoolRecord> rows(records.size());
  std::vector<BuildSummary> parts(records.size());
  parallel_for(records.size(), config.parallelism, [&](std::size_t i) {
    parts[i].records = 1;
    rows[i] = augment_record(records[i], config, *generator, parts[i]);
  });
  BuildSummary summary;
  for (const auto& p : parts) {
    summary.records += p.records;
    summary.pool_items += p.pool_items;
    summary.failed_items += p.failed_items;
    summary.unchanged_items += p.unchanged_items;
    summary.warnings.insert(summary.warnings.end(), p.warnings.begin(), p.warnings.end());
  }
  write_json_lines(rc.out_path, header(rc, pipeline_config(rc, config, generator.get(), nullptr)),
                   to_json_rows(rows));
  log_summary(err, summary);
  write_summary(rc, summary);
  return kOk;
}

int cmd_score(const RunConfig& rc, std::ostream& err) {
  require_file(rc.input_path, "--in");
  check_output(rc);
  const BuildConfig config = build_config(rc);
  const auto embedder = make_embedder(rc);
  auto rows = read_pool_records(rc.input_path);
  std::vector<BuildSummary> parts(rows.size());
  parallel_for(rows.size(), config.parallelism,
               [&](std::size_t i) { score_record(rows[i], config, *embedder, parts[i]); });
  BuildSummary summary;
  summary.records = rows.size();
  for (const auto& p : parts) summary.zero_score_items += p.zero_score_items;
  write_json_lines(rc.out_path, header(rc, pipeline_config(rc, config, nullptr, embedder.get())),
                   to_json_rows(rows));
  log_summary(err, summary);
  write_summary(rc, summary);
  return kOk;
}

int cmd_sample(const RunConfig& rc, std::ostream& err) {
  require_file(rc.input_path, "--in");
  check_output(rc);
  const BuildConfig config = build_config(rc);
  auto rows = read_pool_records(rc.input_path);
  BuildSummary summary;
  summary.records = rows.size();
  for (auto& row : rows) {
    for (const auto& item : row.pool) {
      if (!item.score) {
        throw DataError("record " + row.record.id + " has unscored pool items; run score first");
      }
    }
    sample_record(row, config, summary);
  }
  write_json_lines(rc.out_path, header(rc, pipeline_config(rc, config, nullptr, nullptr)),
                   to_json_rows(rows));
  log_summary(err, summary);
  write_summary(rc, summary);
  return kOk;
}

CaptionIndex load_all_captions(const RunConfig& rc) {
  if (rc.captions_path.empty() && rc.machine_captions_path.empty()) {
    throw ConfigError("build needs --captions or --machine-captions");
  }
  CaptionIndex index;
  if (!rc.captions_path.empty()) {
    require_file(rc.captions_path, "--captions");
    index = load_captions(rc.captions_path, parse_caption_format(rc.caption_format));
  }
  if (!rc.machine_captions_path.empty()) {
    require_file(rc.machine_captions_path, "--machine-captions");
    // Machine captions only fill images without human captions.
    for (auto& [image, captions] : load_captions(rc.machine_captions_path,
                                                 CaptionFormat::kPlainJsonl,
                                                 CaptionSource::kMachine)) {
      auto& slot = index[image];
      if (slot.empty()) slot = std::move(captions);
    }
  }
  return index;
}

int cmd_build(const RunConfig& rc, std::ostream& err) {
  check_output(rc);
  const BuildConfig config = build_config(rc);
  const auto generator = make_generator(rc);
  const auto embedder = make_embedder(rc);
  const auto records = load_records(rc, err);
  const CaptionIndex captions = load_all_captions(rc);
  ManifestBuild build = build_manifest(records, captions, config, *generator, *embedder);
  write_json_lines(rc.out_path,
                   header(rc, pipeline_config(rc, config, generator.get(), embedder.get())),
                   to_json_rows(build.records));
  log_summary(err, build.summary);
  write_summary(rc, build.summary);
  return kOk;
}

int cmd_testset(const RunConfig& rc, std::ostream& err) {
  check_output(rc);
  const BuildConfig config = build_config(rc);
  const auto generator = make_generator(rc);
  const auto embedder = make_embedder(rc);
  const auto records = load_records(rc, err);
  TestsetBuild build = build_augmented_testset(records, config, *generator, *embedder);
  write_json_lines(rc.out_path,
                   header(rc, pipeline_config(rc, config, generator.get(), embedder.get())),
                   to_json_rows(build.records));
  log_summary(err, build.summary);
  write_summary(rc, build.summary);
  return kOk;
}

int cmd_eval(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require_file(rc.input_path, "--eval");
  auto records = read_eval_records(rc.input_path);
  if (rc.verify) {
    std::size_t missing = 0;
    for (const auto& r : records) {
      if (r.model_response.empty()) ++missing;
    }
    out << "records=" << records.size() << " missing_responses=" << missing << '\n';
    return missing == 0 ? kOk : kVerificationFailed;
  }
  if (rc.eval_remote.url.empty() || rc.eval_remote.model.empty()) {
    throw ConfigError("eval needs --verify, or --endpoint-url and --endpoint-model");
  }
  check_output(rc);
  const ChatCompletionClient client(ChatSettings{make_endpoint(rc, rc.eval_remote), rc.temperature});
  parallel_for(records.size(), rc.parallelism, [&](std::size_t i) {
    if (!records[i].model_response.empty()) return;
    try {
      records[i].model_response = client.complete(records[i].prompt_shown);
    } catch (const TransportError& e) {
      throw GenerationError("record " + records[i].record_id + ": " + e.what());
    }
  });
  OrderedJson config{{"endpoint", rc.eval_remote.url},
                     {"model", rc.eval_remote.model},
                     {"temperature", rc.temperature}};
  write_json_lines(rc.out_path, header(rc, config), to_json_rows(records));
  err << "filled " << records.size() << " responses\n";
  return kOk;
}

int cmd_report(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require_file(rc.input_path, "--eval");
  const auto records = read_eval_records(rc.input_path);
  const TokenRule rule = rc.last_token ? TokenRule::kLast : TokenRule::kFirst;
  const PolicyReport report = per_policy_report(records, rc.cug_mode, rule);
  const std::string table = render_policy_table(report, rc.row_label);
  out << table;
  OrderedJson doc = report_to_json(report);
  doc["config"] = {{"cug_mode", rc.cug_mode}, {"token_rule", rc.last_token ? "last" : "first"}};
  if (!rc.out_path.empty()) {
    check_output(rc);
    std::ofstream f(rc.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + rc.out_path);
    f << table;
  }
  if (!rc.json_path.empty()) {
    std::ofstream f(rc.json_path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + rc.json_path);
    f << doc.dump(2) << '\n';
  }
  err << "scored " << records.size() << " records, unknown answers: "
      << report.augmented.unknown_count + report.original.unknown_count << '\n';
  return kOk;
}

int cmd_oracle(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require_file(rc.input_path, "--manifest");
  const auto manifest = read_manifest(rc.input_path);
  if (manifest.empty()) throw DataError("manifest has no records");

  std::optional<NgramModel> loaded;
  if (!rc.model_path.empty()) {
    require_file(rc.model_path, "--model");
    loaded = NgramModel::load(rc.model_path);
  } else {
    // Train on every (image, prompt) -> composed target pair the manifest offers.
    std::vector<CorpusEntry> corpus;
    for (const auto& r : manifest) {
      corpus.push_back({r.image_id, r.original_prompt, r.target.composed});
      for (const auto& item : r.pool) {
        if (item.score.value_or(0.0) > 0.0) {
          corpus.push_back({r.image_id, item.text, r.target.composed});
        }
      }
    }
    loaded = NgramModel::fit(corpus, rc.order, rc.smoothing);
  }
  const NgramModel& model = *loaded;
  if (!rc.model_out_path.empty()) model.save(rc.model_out_path);

  constexpr double kAlgebraTol = 1e-12;
  std::size_t algebra_failures = 0;
  std::size_t mc_outside = 0;
  std::vector<OrderedJson> rows(manifest.size());
  std::vector<int> row_algebra(manifest.size(), 0);
  std::vector<int> row_mc(manifest.size(), 0);
  parallel_for(manifest.size(), rc.parallelism, [&](std::size_t i) {
    const ManifestRecord& r = manifest[i];
    const LossBreakdown exact = composite_loss(model, r, {LossMode::kExact, 0, 0});
    const LossBreakdown mc = composite_loss(
        model, r, {LossMode::kMonteCarlo, derive_seed(rc.seed, r.record_id), rc.draws});
    ManifestRecord zero = r;
    zero.lambda = 0.0;
    const LossBreakdown collapsed = composite_loss(model, zero, {LossMode::kExact, 0, 0});

    bool algebra_ok = std::abs(exact.total - (exact.base + exact.lambda * exact.augmented)) <=
                          kAlgebraTol &&
                      collapsed.total == collapsed.base;
    const auto weights = exact_distribution(r.scores());
    if (!weights.empty()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        const double v = sequence_nll(model, r.image_id, r.pool[k].text, r.target);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      algebra_ok = algebra_ok && exact.augmented >= lo - kAlgebraTol &&
                   exact.augmented <= hi + kAlgebraTol;
    }
    const double gap = std::abs(exact.augmented - mc.augmented);
    const bool mc_ok =
        gap <= std::max(3.0 * mc.std_error, kAlgebraTol * std::max(1.0, exact.augmented));
    row_algebra[i] = algebra_ok ? 0 : 1;
    row_mc[i] = mc_ok ? 0 : 1;
    rows[i] = OrderedJson{{"record_id", r.record_id},
                          {"exact", to_json(exact)},
                          {"monte_carlo", to_json(mc)},
                          {"algebra_ok", algebra_ok},
                          {"mc_within_3se", mc_ok}};
  });
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    algebra_failures += static_cast<std::size_t>(row_algebra[i]);
    mc_outside += static_cast<std::size_t>(row_mc[i]);
  }
  if (!rc.out_path.empty()) {
    check_output(rc);
    OrderedJson config{{"order", model.order()},
                       {"k", model.smoothing()},
                       {"draws", rc.draws},
                       {"seed", rc.seed}};
    write_json_lines(rc.out_path, header(rc, config), rows);
  }
  // A 3-standard-error band is missed by chance about 0.27% of the time.
  const double outside_rate = static_cast<double>(mc_outside) / static_cast<double>(manifest.size());
  const bool ok = algebra_failures == 0 && outside_rate <= 0.01;
  out << "records=" << manifest.size() << " algebra_failures=" << algebra_failures
      << " mc_outside_3se=" << mc_outside << " status=" << (ok ? "PASS" : "FAIL") << '\n';
  if (!ok) err << "oracle verification failed\n";
  return ok ? kOk : kVerificationFailed;
}

void add_pipeline_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--policies", rc.policies, "Comma-separated policies or 'all'")
      ->capture_default_str();
  cmd->add_option("--epsilon", rc.epsilon, "Score threshold")->capture_default_str();
  cmd->add_option("--lambda", rc.lambda, "Weight of the augmented loss term")
      ->capture_default_str();
  cmd->add_option("--n", rc.pool_size, "Pool size N (default: number of policies)");
  cmd->add_option("--seed", rc.seed, "Run seed")->capture_default_str();
  cmd->add_option("--caption-strategy", rc.caption_strategy,
                  "first_by_id | longest | seeded_random")
      ->capture_default_str();
  cmd->add_option("--generator", rc.generator, "rule_based | remote")->capture_default_str();
  cmd->add_option("--embedder", rc.embedder, "fallback | remote")->capture_default_str();
  cmd->add_option("--generator-url", rc.generator_remote.url, "Chat completion base URL");
  cmd->add_option("--generator-model", rc.generator_remote.model, "Chat completion model");
  cmd->add_option("--embedder-url", rc.embedder_remote.url, "Embedding endpoint base URL");
  cmd->add_option("--embedder-model", rc.embedder_remote.model, "Embedding model");
  cmd->add_option("--templates", rc.templates_path, "Policy template JSON file");
  cmd->add_option("--temperature", rc.temperature, "Sampling temperature for remote calls")
      ->capture_default_str();
  cmd->add_option("--summary", rc.summary_path, "Write the build summary JSON here");
}

void add_remote_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--parallelism", rc.parallelism, "Maximum concurrent workers")
      ->capture_default_str();
  cmd->add_option("--api-key-env", rc.api_key_env,
                  "Environment variable holding the bearer token")
      ->capture_default_str();
  cmd->add_option("--max-retries", rc.max_retries, "Retries per remote request")
      ->capture_default_str();
  cmd->add_option("--timeout-ms", rc.timeout_ms, "Remote request timeout")->capture_default_str();
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kConfig:
      return kUsage;
    case ErrorCategory::kInput:
    case ErrorCategory::kData:
      return kData;
    case ErrorCategory::kGeneration:
    case ErrorCategory::kEmbedding:
      return kRemote;
    case ErrorCategory::kVerification:
      return kVerificationFailed;
  }
  return kInternal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Prompt augmentation, caption-utilized targets and QA evaluation", "augcap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* augment = app.add_subcommand("augment", "Generate augmented prompt pools");
  augment->add_option("--qa", rc.qa_path, "QA records (JSON lines)")->required();
  augment->add_option("--out", rc.out_path, "Output pools (JSON lines)")->required();
  add_pipeline_flags(augment, rc);
  add_remote_flags(augment, rc);

  auto* score = app.add_subcommand("score", "Score and threshold pools");
  score->add_option("--in", rc.input_path, "Pools from 'augment'")->required();
  score->add_option("--out", rc.out_path, "Output scored pools")->required();
  add_pipeline_flags(score, rc);
  add_remote_flags(score, rc);

  auto* sample = app.add_subcommand("sample", "Sample one prompt per scored pool");
  sample->add_option("--in", rc.input_path, "Pools from 'score'")->required();
  sample->add_option("--out", rc.out_path, "Output sampled pools")->required();
  add_pipeline_flags(sample, rc);

  auto* build = app.add_subcommand("build", "Build the instruct-tuning manifest");
  build->add_option("--qa", rc.qa_path, "QA records (JSON lines)")->required();
  build->add_option("--captions", rc.captions_path, "Caption annotations");
  build->add_option("--caption-format", rc.caption_format, "coco_annotations | plain_jsonl")
      ->capture_default_str();
  build->add_option("--machine-captions", rc.machine_captions_path,
                    "Model-generated captions (plain_jsonl) for images without human ones");
  build->add_option("--out", rc.out_path, "Output manifest (JSON lines)")->required();
  add_pipeline_flags(build, rc);
  add_remote_flags(build, rc);

  auto* testset = app.add_subcommand("testset", "Build an augmented evaluation set");
  testset->add_option("--qa", rc.qa_path, "QA records (JSON lines)")->required();
  testset->add_option("--out", rc.out_path, "Output eval records (JSON lines)")->required();
  add_pipeline_flags(testset, rc);
  add_remote_flags(testset, rc);

  auto* eval = app.add_subcommand("eval", "Fill model responses or verify a filled file");
  eval->add_option("--eval", rc.input_path, "Eval records")->required();
  eval->add_option("--out", rc.out_path, "Output filled records");
  eval->add_flag("--verify", rc.verify, "Only check that every response is filled");
  eval->add_option("--endpoint-url", rc.eval_remote.url, "Chat completion base URL");
  eval->add_option("--endpoint-model", rc.eval_remote.model, "Chat completion model");
  eval->add_option("--temperature", rc.temperature, "Sampling temperature")
      ->capture_default_str();
  add_remote_flags(eval, rc);

  auto* report = app.add_subcommand("report", "Accuracy/F1/precision/recall and per-policy table");
  report->add_option("--eval", rc.input_path, "Filled eval records")->required();
  report->add_option("--out", rc.out_path, "Also write the text table here");
  report->add_option("--json", rc.json_path, "Write the JSON report here");
  report->add_flag("--cug", rc.cug_mode, "Skip a leading caption sentence before scanning");
  report->add_flag("--last-token", rc.last_token, "Use the last yes/no token instead of the first");
  report->add_option("--label", rc.row_label, "Row label in the table")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Check the composite loss on a toy n-gram LM");
  oracle->add_option("--manifest", rc.input_path, "Manifest from 'build'")->required();
  oracle->add_option("--out", rc.out_path, "Per-record loss breakdowns (JSON lines)");
  oracle->add_option("--order", rc.order, "n-gram order")->capture_default_str();
  oracle->add_option("--k", rc.smoothing, "add-k smoothing constant")->capture_default_str();
  oracle->add_option("--draws", rc.draws, "Monte-Carlo draws per record")->capture_default_str();
  oracle->add_option("--seed", rc.seed, "Seed for Monte-Carlo draws")->capture_default_str();
  oracle->add_option("--model", rc.model_path, "Load a saved model instead of fitting");
  oracle->add_option("--model-out", rc.model_out_path, "Save the fitted model here");
  oracle->add_option("--parallelism", rc.parallelism, "Maximum concurrent workers")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    rc.subcommand = app.get_subcommands().front()->get_name();
    if (rc.parallelism == 0) throw ConfigError("--parallelism must be at least 1");
    if (rc.subcommand == "augment") return cmd_augment(rc, err);
    if (rc.subcommand == "score") return cmd_score(rc, err);
    if (rc.subcommand == "sample") return cmd_sample(rc, err);
    if (rc.subcommand == "build") return cmd_build(rc, err);
    if (rc.subcommand == "testset") return cmd_testset(rc, err);
    if (rc.subcommand == "eval") return cmd_eval(rc, out, err);
    if (rc.subcommand == "report") return cmd_report(rc, out, err);
    if (rc.subcommand == "oracle") return cmd_oracle(rc, out, err);
  } catch (const MissingCaptionError& e) {
    err << "error [data]: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "error [" << to_string(e.category()) << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace augcap::cli
