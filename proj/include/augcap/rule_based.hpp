#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "augcap/policy.hpp"

namespace augcap {

struct RuleOutcome {
  std::string text;
  // True when no rule applied and `text` is the input returned verbatim.
  bool unchanged = false;
};

// Offline stand-in for the augmentation model. A pure function of its arguments:
//   Spell    1-2 character edits, never on the terminal punctuation or a yes/no token
//   Append   a phrase-bank phrase before or after the untouched prompt
//   Short    drops removable modifier words, keeping at least 3 words
//   Long     adds a context clause
//   Rewrite  synonym substitutions from the built-in lexicon
//   Hard     clause reordering / nominalization rules plus formal-register lexicon
//   Easy     the inverse rules plus simplifying question frames
// Throws InputError when the prompt has no words.
RuleOutcome rule_based_augment(std::string_view prompt, Policy policy, std::uint64_t seed);

}  // namespace augcap
