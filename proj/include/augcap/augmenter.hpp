#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "augcap/http.hpp"
#include "augcap/policy.hpp"

namespace augcap {

enum class Provenance { kRemote, kRuleBased };

std::string_view to_string(Provenance provenance);
Provenance parse_provenance(std::string_view name);

// One policy-augmented variant of a prompt.
struct AugmentedPrompt {
  std::string parent_id;
  Policy policy = Policy::kHard;
  std::string text;
  std::optional<double> raw_score;  // set by scoring
  std::optional<double> score;      // set by thresholding
  Provenance provenance = Provenance::kRuleBased;
  // The generator had no applicable rule and returned the input unchanged.
  bool unchanged = false;

  friend bool operator==(const AugmentedPrompt&, const AugmentedPrompt&) = default;
};

struct PromptPool {
  std::string original;
  std::vector<AugmentedPrompt> items;

  friend bool operator==(const PromptPool&, const PromptPool&) = default;
};

// What a generator produced for one policy. `text` is empty when the item failed.
struct GenerationOutcome {
  std::optional<std::string> text;
  bool unchanged = false;
  std::string failure;
};

class PromptGenerator {
 public:
  virtual ~PromptGenerator() = default;

  // Throws GenerationError when the backend is unreachable after retries. Bad but
  // well-formed answers come back as a failed outcome instead.
  virtual GenerationOutcome generate(Policy policy, std::string_view prompt,
                                     std::uint64_t seed) const = 0;
  virtual Provenance provenance() const = 0;
  // Short description echoed into run headers.
  virtual std::string describe() const = 0;
};

class RuleBasedGenerator final : public PromptGenerator {
 public:
  GenerationOutcome generate(Policy policy, std::string_view prompt,
                             std::uint64_t seed) const override;
  Provenance provenance() const override { return Provenance::kRuleBased; }
  std::string describe() const override { return "rule_based"; }
};

struct ChatSettings {
  Endpoint endpoint;
  double temperature = 1.0;
};

// OpenAI-style chat completion client: POST {base_url}/chat/completions with one user
// message; the reply is choices[0].message.content, trimmed.
class ChatCompletionClient {
 public:
  explicit ChatCompletionClient(ChatSettings settings);

  // Throws TransportError after the retry budget is spent, or when the reply lacks
  // the expected fields.
  std::string complete(std::string_view user_message) const;

  const ChatSettings& settings() const noexcept { return settings_; }

 private:
  ChatSettings settings_;
};

class ChatCompletionGenerator final : public PromptGenerator {
 public:
  ChatCompletionGenerator(ChatSettings settings, TemplateSet templates);

  GenerationOutcome generate(Policy policy, std::string_view prompt,
                             std::uint64_t seed) const override;
  Provenance provenance() const override { return Provenance::kRemote; }
  std::string describe() const override;

 private:
  ChatCompletionClient client_;
  TemplateSet templates_;
};

struct ItemFailure {
  std::size_t index = 0;
  Policy policy = Policy::kHard;
  std::string reason;
};

struct AugmentResult {
  PromptPool pool;
  std::vector<ItemFailure> failures;
  std::size_t unchanged = 0;
};

// Builds the pool for `prompt`, one item per entry of `policies` in the same order
// (repeats allowed). Item i is generated with seed derive_seed(seed, i). Failed items
// are dropped and reported; transport errors propagate as GenerationError.
AugmentResult augment_prompt(std::string_view prompt, const std::vector<Policy>& policies,
                             const PromptGenerator& generator, std::uint64_t seed,
                             std::string_view parent_id = {}, std::size_t parallelism = 1);

}  // namespace augcap
