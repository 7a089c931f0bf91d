#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace augcap {

// The seven prompt augmentation policies, in report-column order.
enum class Policy { kHard, kEasy, kShort, kLong, kRewrite, kSpell, kAppend };

inline constexpr std::size_t kPolicyCount = 7;

const std::array<Policy, kPolicyCount>& all_policies();

// Lowercase ASCII name, e.g. "spell".
std::string_view to_string(Policy policy);
// Column header, e.g. "Spell".
std::string_view display_name(Policy policy);
// Case-insensitive; throws InputError on unknown names.
Policy parse_policy(std::string_view name);
std::optional<Policy> try_parse_policy(std::string_view name);
// Comma-separated list; "all" expands to every policy.
std::vector<Policy> parse_policy_list(std::string_view csv);
std::string format_policy_list(const std::vector<Policy>& policies);

inline constexpr std::string_view kPromptPlaceholder = "{prompt}";

// Generator instruction for one policy. The text holds kPromptPlaceholder exactly once.
class PolicyTemplate {
 public:
  PolicyTemplate(Policy policy, std::string instruction_text);

  Policy policy() const noexcept { return policy_; }
  const std::string& instruction_text() const noexcept { return instruction_text_; }

  std::string render(std::string_view prompt) const;

 private:
  Policy policy_;
  std::string instruction_text_;
};

class TemplateSet {
 public:
  // Built-in wording.
  static TemplateSet defaults();
  // JSON object {"hard": "...{prompt}...", ...}; policies absent from the file keep
  // their default wording.
  static TemplateSet load(const std::filesystem::path& path);

  const PolicyTemplate& at(Policy policy) const;
  void set(PolicyTemplate tmpl);

 private:
  TemplateSet() = default;
  std::vector<PolicyTemplate> templates_;
};

// Renders the generator instruction for `policy` with `prompt` substituted.
std::string render_policy_template(Policy policy, std::string_view prompt,
                                   const TemplateSet& templates = TemplateSet::defaults());

}  // namespace augcap
