#include <sstream>

#include "doctest.h"

#include "augcap/cli.hpp"
#include "augcap/errors.hpp"
#include "augcap/evaluator.hpp"
#include "augcap/pipeline.hpp"
#include "support.hpp"

using namespace augcap;

namespace {

std::vector<PromptRecord> sample_records() {
  return {
      {"q1", "1", "Is there a dog in the image?", "Yes, there is a dog.", Label::kYes, ""},
      {"q2", "2", "Are there two cats on the sofa?", "No.", Label::kNo, ""},
      {"q3", "2", "What color is the sofa?", "It is red.", Label::kOpen, ""},
  };
}

CaptionIndex sample_captions() {
  CaptionIndex idx;
  idx["1"].emplace_back("1", 5, "A brown dog runs on the grass");
  idx["2"].emplace_back("2", 9, "Two cats sleep on a red sofa");
  idx["2"].emplace_back("2", 7, "Cats on a sofa");
  return idx;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kQa =
    "{\"id\":\"q1\",\"image_id\":1,\"prompt\":\"Is there a dog in the image?\",\"response\":\"Yes, there is a dog.\",\"label\":\"yes\"}\n"
    "{\"id\":\"q2\",\"image_id\":2,\"prompt\":\"Are there two cats on the sofa?\",\"response\":\"No.\",\"label\":\"no\"}\n";
const char* kCaptions =
    R"({"annotations":[{"image_id":1,"id":5,"caption":"A brown dog runs"},{"image_id":2,"id":7,"caption":"Two cats sleep on a red sofa."}]})";

}  // namespace

TEST_CASE("policy schedule cycles to the pool size") {
  BuildConfig c;
  c.policies = {Policy::kSpell, Policy::kAppend};
  c.pool_size = 5;
  const std::vector<Policy> want{Policy::kSpell, Policy::kAppend, Policy::kSpell, Policy::kAppend,
                                 Policy::kSpell};
  CHECK(policy_schedule(c) == want);
}

TEST_CASE("config validation") {
  BuildConfig c;
  c.epsilon = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = BuildConfig{};
  c.lambda = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = BuildConfig{};
  c.policies.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("manifest build is deterministic and independent of parallelism") {
  const auto records = sample_records();
  std::vector<PromptRecord> binary(records.begin(), records.begin() + 2);
  BuildConfig c;
  c.seed = 7;
  const RuleBasedGenerator gen;
  const HashedTfEmbedder emb;
  const ManifestBuild a = build_manifest(binary, sample_captions(), c, gen, emb);
  c.parallelism = 4;
  const ManifestBuild b = build_manifest(binary, sample_captions(), c, gen, emb);
  CHECK(a.records == b.records);
  REQUIRE(a.records.size() == 2);
  const ManifestRecord& r = a.records[1];
  CHECK(r.caption.annotation_id() == 7);
  CHECK(r.target.composed == "Cats on a sofa. No.");
  CHECK(r.pool.size() == kPolicyCount);
  CHECK(r.record_seed == record_seed(7, "q2"));
  for (const auto& item : r.pool) {
    REQUIRE(item.score.has_value());
    CHECK((*item.score == 0.0 || *item.score >= c.epsilon));
  }
  if (!r.sampled.is_original()) CHECK(r.pool[*r.sampled.chosen_index].score.value() > 0.0);
}

TEST_CASE("manifest build fails on a missing caption before generating") {
  const auto records = sample_records();
  CaptionIndex idx;
  idx["1"].emplace_back("1", 5, "A dog");
  try {
    (void)build_manifest(records, idx, BuildConfig{}, RuleBasedGenerator{}, HashedTfEmbedder{});
    FAIL("expected MissingCaptionError");
  } catch (const MissingCaptionError& e) {
    CHECK(e.image_id() == "2");
  }
}

TEST_CASE("testset emits originals plus passing variants and skips open questions") {
  BuildConfig c;
  c.epsilon = 0.0;
  const TestsetBuild t =
      build_augmented_testset(sample_records(), c, RuleBasedGenerator{}, HashedTfEmbedder{});
  CHECK(t.records.size() == 2 * (1 + kPolicyCount));
  CHECK(t.summary.skipped_records == 1);
  CHECK_FALSE(t.records[0].policy.has_value());
  CHECK(t.records[0].prompt_shown == "Is there a dog in the image?");
  for (const auto& e : t.records) CHECK(e.model_response.empty());
}

TEST_CASE("cli build writes a header and is reproducible") {
  testing::TempDir dir;
  dir.write("qa.jsonl", kQa);
  dir.write("caps.json", kCaptions);
  const std::vector<std::string> args{"build", "--qa", dir.str("qa.jsonl"), "--captions",
                                      dir.str("caps.json"), "--seed", "3", "--out",
                                      dir.str("m1.jsonl")};
  CHECK(run_cli(args).code == cli::kOk);
  auto again = args;
  again.back() = dir.str("m2.jsonl");
  CHECK(run_cli(again).code == cli::kOk);
  CHECK(testing::slurp(dir.file("m1.jsonl")) == testing::slurp(dir.file("m2.jsonl")));

  const JsonLines lines = read_json_lines(dir.file("m1.jsonl"));
  REQUIRE(lines.header.has_value());
  CHECK((*lines.header)["subcommand"] == "build");
  CHECK((*lines.header)["config"]["seed"] == 3);
  CHECK((*lines.header)["config"]["embedder"] == "hashed_tf_fnv1a64_d4096");
  CHECK(lines.rows.size() == 2);
}

TEST_CASE("cli staged commands match the one shot build pools") {
  testing::TempDir dir;
  dir.write("qa.jsonl", kQa);
  dir.write("caps.json", kCaptions);
  REQUIRE(run_cli({"augment", "--qa", dir.str("qa.jsonl"), "--out", dir.str("a.jsonl")}).code == 0);
  REQUIRE(run_cli({"score", "--in", dir.str("a.jsonl"), "--out", dir.str("s.jsonl")}).code == 0);
  REQUIRE(run_cli({"sample", "--in", dir.str("s.jsonl"), "--out", dir.str("p.jsonl")}).code == 0);
  REQUIRE(run_cli({"build", "--qa", dir.str("qa.jsonl"), "--captions", dir.str("caps.json"), "--out",
               dir.str("m.jsonl")})
              .code == 0);
  const auto staged = read_pool_records(dir.file("p.jsonl"));
  const auto manifest = read_manifest(dir.file("m.jsonl"));
  REQUIRE(staged.size() == manifest.size());
  for (std::size_t i = 0; i < staged.size(); ++i) {
    CHECK(staged[i].pool == manifest[i].pool);
    CHECK(*staged[i].sampled == manifest[i].sampled);
  }
}

TEST_CASE("cli error paths map to exit codes") {
  testing::TempDir dir;
  dir.write("qa.jsonl", kQa);
  dir.write("caps.json", R"({"annotations":[{"image_id":1,"id":5,"caption":"A dog"}]})");
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"build", "--qa", dir.str("qa.jsonl"), "--captions", dir.str("caps.json"), "--out",
             dir.str("qa.jsonl")})
            .code == cli::kUsage);
  CHECK(run_cli({"build", "--qa", dir.str("qa.jsonl"), "--captions", dir.str("caps.json"), "--out",
             dir.str("m.jsonl")})
            .code == cli::kData);
  CHECK(run_cli({"augment", "--qa", dir.str("qa.jsonl"), "--out", dir.str("a.jsonl"), "--generator",
             "remote"})
            .code == cli::kUsage);
  CHECK(run_cli({"augment", "--qa", dir.str("qa.jsonl"), "--out", dir.str("a.jsonl"), "--epsilon",
             "2"})
            .code == cli::kUsage);
  CHECK(run_cli({"augment", "--qa", dir.str("missing.jsonl"), "--out", dir.str("a.jsonl")}).code ==
        cli::kUsage);
  CHECK(run_cli({"augment", "--qa", dir.str("qa.jsonl"), "--out", dir.str("a.jsonl"), "--policies",
             "bogus"})
            .code == cli::kUsage);
}

TEST_CASE("cli testset, verify, report and oracle") {
  testing::TempDir dir;
  dir.write("qa.jsonl", kQa);
  dir.write("caps.json", kCaptions);
  REQUIRE(run_cli({"testset", "--qa", dir.str("qa.jsonl"), "--epsilon", "0", "--out",
               dir.str("t.jsonl")})
              .code == 0);
  CHECK(run_cli({"eval", "--eval", dir.str("t.jsonl"), "--verify"}).code == cli::kVerificationFailed);

  auto records = read_eval_records(dir.file("t.jsonl"));
  CHECK(records.size() == 16);
  for (auto& r : records) r.model_response = r.gt_label == Label::kYes ? "Yes." : "No.";
  write_json_lines(dir.file("f.jsonl"), std::nullopt, to_json_rows(records));
  CHECK(run_cli({"eval", "--eval", dir.str("f.jsonl"), "--verify"}).code == cli::kOk);

  const CliResult rep = run_cli({"report", "--eval", dir.str("f.jsonl"), "--json",
                             dir.str("r.json"), "--label", "perfect"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("perfect") != std::string::npos);
  CHECK(rep.out.find("100.0%") != std::string::npos);
  CHECK(nlohmann::json::parse(testing::slurp(dir.file("r.json")))["overall"]["f1"] == 1.0);

  REQUIRE(run_cli({"build", "--qa", dir.str("qa.jsonl"), "--captions", dir.str("caps.json"), "--out",
               dir.str("m.jsonl")})
              .code == 0);
  const CliResult oracle = run_cli({"oracle", "--manifest", dir.str("m.jsonl"), "--out",
                                dir.str("o.jsonl"), "--model-out", dir.str("lm.json")});
  CHECK(oracle.code == 0);
  CHECK(oracle.out.find("status=PASS") != std::string::npos);
  CHECK(run_cli({"oracle", "--manifest", dir.str("m.jsonl"), "--model", dir.str("lm.json")}).code ==
        0);
}
