#include "augcap/policy.hpp"

#include <fstream>

#include "json.hpp"

#include "augcap/errors.hpp"
#include "augcap/text.hpp"

namespace augcap {

namespace {

struct PolicyInfo {
  Policy policy;
  std::string_view name;
  std::string_view display;
  std::string_view default_template;
};

constexpr std::array<PolicyInfo, kPolicyCount> kPolicyInfo{{
    {Policy::kHard, "hard", "Hard",
     "Rewrite the following question so that it is harder to understand, for example by "
     "reordering its clauses or using more formal and abstract wording, while keeping "
     "exactly the same meaning and the same correct answer. Reply with the rewritten "
     "question only.\n\nQuestion: {prompt}"},
    {Policy::kEasy, "easy", "Easy",
     "Rewrite the following question so that it is easier to understand, using simpler "
     "and more common words, while keeping exactly the same meaning and the same "
     "correct answer. Reply with the rewritten question only.\n\nQuestion: {prompt}"},
    {Policy::kShort, "short", "Short",
     "Shorten the following question by removing unnecessary words, while keeping "
     "exactly the same meaning and the same correct answer. Reply with the shortened "
     "question only.\n\nQuestion: {prompt}"},
    {Policy::kLong, "long", "Long",
     "Lengthen the following question a bit, for example by adding a polite phrase or "
     "some context, while keeping exactly the same meaning and the same correct "
     "answer. Reply with the lengthened question only.\n\nQuestion: {prompt}"},
    {Policy::kRewrite, "rewrite", "Rewrite",
     "Rewrite the following question by replacing some words with synonyms, while "
     "keeping exactly the same meaning and the same correct answer. Reply with the "
     "rewritten question only.\n\nQuestion: {prompt}"},
    {Policy::kSpell, "spell", "Spell",
     "Introduce spelling errors (up to two) into the following question. Do not change "
     "anything else. Reply with the modified question only.\n\nQuestion: {prompt}"},
    {Policy::kAppend, "append", "Append",
     "Append some words at the beginning or end of the following question without "
     "changing its meaning or its correct answer. Reply with the modified question "
     "only.\n\nQuestion: {prompt}"},
}};

const PolicyInfo& info(Policy policy) { return kPolicyInfo[static_cast<std::size_t>(policy)]; }

}  // namespace

const std::array<Policy, kPolicyCount>& all_policies() {
  static const std::array<Policy, kPolicyCount> policies{
      Policy::kHard,    Policy::kEasy,  Policy::kShort, Policy::kLong,
      Policy::kRewrite, Policy::kSpell, Policy::kAppend};
  return policies;
}

std::string_view to_string(Policy policy) { return info(policy).name; }

std::string_view display_name(Policy policy) { return info(policy).display; }

std::optional<Policy> try_parse_policy(std::string_view name) {
  const std::string lowered = text::to_lower_ascii(text::trim(name));
  for (const auto& entry : kPolicyInfo) {
    if (entry.name == lowered) return entry.policy;
  }
  return std::nullopt;
}

Policy parse_policy(std::string_view name) {
  if (auto policy = try_parse_policy(name)) return *policy;
  throw InputError("unknown augmentation policy \"" + std::string(name) + "\"");
}

std::vector<Policy> parse_policy_list(std::string_view csv) {
  std::vector<Policy> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    const std::string item = text::trim(csv.substr(start, comma - start));
    if (!item.empty()) {
      if (text::to_lower_ascii(item) == "all") {
        out.insert(out.end(), all_policies().begin(), all_policies().end());
      } else {
        out.push_back(parse_policy(item));
      }
    }
    start = comma + 1;
  }
  if (out.empty()) throw InputError("policy list is empty");
  return out;
}

std::string format_policy_list(const std::vector<Policy>& policies) {
  std::string out;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (i > 0) out += ',';
    out += to_string(policies[i]);
  }
  return out;
}

PolicyTemplate::PolicyTemplate(Policy policy, std::string instruction_text)
    : policy_(policy), instruction_text_(std::move(instruction_text)) {
  if (text::count_occurrences(instruction_text_, kPromptPlaceholder) != 1) {
    throw InputError("template for policy \"" + std::string(to_string(policy)) +
                     "\" must contain " + std::string(kPromptPlaceholder) + " exactly once");
  }
}

std::string PolicyTemplate::render(std::string_view prompt) const {
  if (text::is_blank(prompt)) throw InputError("cannot render a template for an empty prompt");
  std::string out = instruction_text_;
  out.replace(out.find(kPromptPlaceholder), kPromptPlaceholder.size(), prompt);
  return out;
}

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  for (const auto& entry : kPolicyInfo) {
    set.templates_.emplace_back(entry.policy, std::string(entry.default_template));
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open template file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("template file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InputError("template file must hold a JSON object");
  TemplateSet set = defaults();
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw InputError("template for \"" + key + "\" must be a string");
    set.set(PolicyTemplate(parse_policy(key), value.get<std::string>()));
  }
  return set;
}

const PolicyTemplate& TemplateSet::at(Policy policy) const {
  return templates_[static_cast<std::size_t>(policy)];
}

void TemplateSet::set(PolicyTemplate tmpl) {
  templates_[static_cast<std::size_t>(tmpl.policy())] = std::move(tmpl);
}

std::string render_policy_template(Policy policy, std::string_view prompt,
                                   const TemplateSet& templates) {
  return templates.at(policy).render(prompt);
}

}  // namespace augcap
