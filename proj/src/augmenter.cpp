#include "augcap/augmenter.hpp"

#include "augcap/errors.hpp"
#include "augcap/parallel.hpp"
#include "augcap/rng.hpp"
#include "augcap/rule_based.hpp"
#include "augcap/text.hpp"

namespace augcap {

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::kRemote ? "remote" : "rule_based";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "remote") return Provenance::kRemote;
  if (name == "rule_based") return Provenance::kRuleBased;
  throw InputError("unknown provenance \"" + std::string(name) + "\"");
}

GenerationOutcome RuleBasedGenerator::generate(Policy policy, std::string_view prompt,
                                               std::uint64_t seed) const {
  RuleOutcome out = rule_based_augment(prompt, policy, seed);
  return {std::move(out.text), out.unchanged, {}};
}

ChatCompletionClient::ChatCompletionClient(ChatSettings settings)
    : settings_(std::move(settings)) {}

std::string ChatCompletionClient::complete(std::string_view user_message) const {
  nlohmann::json request{
      {"model", settings_.endpoint.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", user_message}}})},
      {"temperature", settings_.temperature},
  };
  const nlohmann::json reply = post_json(settings_.endpoint, "/chat/completions", request);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    return text::trim(content.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed chat completion reply: " + std::string(e.what()));
  }
}

ChatCompletionGenerator::ChatCompletionGenerator(ChatSettings settings, TemplateSet templates)
    : client_(std::move(settings)), templates_(std::move(templates)) {}

GenerationOutcome ChatCompletionGenerator::generate(Policy policy, std::string_view prompt,
                                                    std::uint64_t /*seed*/) const {
  const std::string instruction = templates_.at(policy).render(prompt);
  std::string reply;
  try {
    reply = client_.complete(instruction);
  } catch (const TransportError& e) {
    throw GenerationError("augmentation for policy \"" + std::string(to_string(policy)) +
                          "\" failed: " + e.what());
  }
  GenerationOutcome out;
  if (reply.empty()) {
    out.failure = "empty reply";
  } else if (reply == text::trim(instruction)) {
    out.failure = "reply echoes the instruction";
  } else {
    out.text = std::move(reply);
    out.unchanged = *out.text == text::trim(prompt);
  }
  return out;
}

std::string ChatCompletionGenerator::describe() const {
  const auto& s = client_.settings();
  return "remote:" + s.endpoint.base_url + "#" + s.endpoint.model;
}

AugmentResult augment_prompt(std::string_view prompt, const std::vector<Policy>& policies,
                             const PromptGenerator& generator, std::uint64_t seed,
                             std::string_view parent_id, std::size_t parallelism) {
  if (text::is_blank(prompt)) throw InputError("cannot augment an empty prompt");
  if (policies.empty()) throw InputError("no augmentation policies requested");

  std::vector<GenerationOutcome> outcomes(policies.size());
  parallel_for(policies.size(), parallelism, [&](std::size_t i) {
    outcomes[i] = generator.generate(policies[i], prompt, derive_seed(seed, i));
  });

  AugmentResult result;
  result.pool.original = std::string(prompt);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    GenerationOutcome& out = outcomes[i];
    if (!out.text || text::is_blank(*out.text)) {
      result.failures.push_back(
          {i, policies[i], out.failure.empty() ? "empty output" : out.failure});
      continue;
    }
    AugmentedPrompt item;
    item.parent_id = std::string(parent_id);
    item.policy = policies[i];
    item.text = std::move(*out.text);
    item.provenance = generator.provenance();
    item.unchanged = out.unchanged;
    if (item.unchanged) ++result.unchanged;
    result.pool.items.push_back(std::move(item));
  }
  return result;
}

}  // namespace augcap
