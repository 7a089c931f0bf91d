#include "augcap/rule_based.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <regex>
#include <unordered_set>

#include "augcap/errors.hpp"
#include "augcap/rng.hpp"
#include "augcap/text.hpp"

namespace augcap {

namespace {

// ---------------------------------------------------------------------------
// Sentence shape: body words plus the terminal punctuation run ("?", "?!", ".").

struct Sentence {
  std::string body;
  std::string tail;
};

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

Sentence split_sentence(std::string_view prompt) {
  std::string trimmed = text::trim(prompt);
  std::size_t end = trimmed.size();
  while (end > 0 && is_terminal(trimmed[end - 1])) --end;
  Sentence s;
  s.tail = trimmed.substr(end);
  s.body = text::trim(std::string_view(trimmed).substr(0, end));
  return s;
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_letter(char c) { return is_upper(c) || is_lower(c); }
bool is_alnum(char c) { return is_letter(c) || (c >= '0' && c <= '9'); }

std::string capitalize_first(std::string s) {
  if (!s.empty() && is_lower(s[0])) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Lowercases the first letter unless the first word looks like "I", "I'm" or an acronym.
std::string lower_first_if_safe(std::string s) {
  if (s.empty() || !is_upper(s[0])) return s;
  const std::size_t space = s.find(' ');
  const std::string first = s.substr(0, space);
  if (first == "I" || first.rfind("I'", 0) == 0) return s;
  if (std::count_if(first.begin(), first.end(), is_upper) > 1) return s;
  s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

// Word split into a matchable core and trailing punctuation such as ",".
struct WordParts {
  std::string core;
  std::string suffix;
};

WordParts split_word(const std::string& word) {
  std::size_t end = word.size();
  while (end > 0 && !is_alnum(word[end - 1])) --end;
  return {word.substr(0, end), word.substr(end)};
}

std::string core_lower(const std::string& word) {
  return text::to_lower_ascii(split_word(word).core);
}

// ---------------------------------------------------------------------------
// Lexicon substitution shared by Rewrite, Hard and Easy.

struct LexEntry {
  std::vector<std::string> from;
  std::vector<std::string> to;
};

using Lexicon = std::vector<LexEntry>;

struct LexMatch {
  std::size_t start;
  std::size_t length;
  std::size_t entry;
};

LexEntry make_entry(std::string_view from, std::vector<std::string> to) {
  return {text::split_words(from), std::move(to)};
}

// Each group is a set of mutual synonyms.
Lexicon lexicon_from_groups(const std::vector<std::vector<std::string>>& groups) {
  Lexicon lex;
  for (const auto& group : groups) {
    for (const auto& word : group) {
      std::vector<std::string> alternatives;
      for (const auto& other : group) {
        if (other != word) alternatives.push_back(other);
      }
      lex.push_back(make_entry(word, std::move(alternatives)));
    }
  }
  return lex;
}

Lexicon lexicon_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                           bool inverted) {
  Lexicon lex;
  for (const auto& [simple, formal] : pairs) {
    if (inverted) {
      lex.push_back(make_entry(formal, {simple}));
    } else {
      lex.push_back(make_entry(simple, {formal}));
    }
  }
  return lex;
}

std::vector<LexMatch> find_matches(const std::vector<std::string>& words, const Lexicon& lex) {
  std::vector<LexMatch> matches;
  std::size_t i = 0;
  while (i < words.size()) {
    std::optional<LexMatch> best;
    for (std::size_t e = 0; e < lex.size(); ++e) {
      const auto& from = lex[e].from;
      if (from.empty() || i + from.size() > words.size()) continue;
      if (best && from.size() <= best->length) continue;
      bool ok = true;
      for (std::size_t j = 0; j < from.size() && ok; ++j) {
        const WordParts parts = split_word(words[i + j]);
        if (text::to_lower_ascii(parts.core) != from[j]) ok = false;
        // Punctuation may only trail the last word of a phrase.
        if (j + 1 < from.size() && !parts.suffix.empty()) ok = false;
      }
      if (ok) best = LexMatch{i, from.size(), e};
    }
    if (best) {
      matches.push_back(*best);
      i += best->length;
    } else {
      ++i;
    }
  }
  return matches;
}

// Picks `count` distinct indices out of [0, n) in ascending order.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Replaces between 1 and max_subs matches. Returns false when nothing matched.
bool substitute(std::vector<std::string>& words, const Lexicon& lex, Rng& rng,
                std::size_t max_subs, bool replace_all = false) {
  const auto matches = find_matches(words, lex);
  if (matches.empty()) return false;
  std::vector<std::size_t> chosen;
  if (replace_all) {
    for (std::size_t i = 0; i < matches.size(); ++i) chosen.push_back(i);
  } else {
    const std::size_t limit = std::min(matches.size(), max_subs);
    chosen = choose_indices(matches.size(), 1 + rng.below(limit), rng);
  }
  // Right to left so earlier indices stay valid.
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const LexMatch& m = matches[*it];
    const auto& options = lex[m.entry].to;
    std::string replacement = options[rng.below(options.size())];
    if (is_upper(words[m.start][0])) replacement = capitalize_first(replacement);
    replacement += split_word(words[m.start + m.length - 1]).suffix;
    auto repl_words = text::split_words(replacement);
    words.erase(words.begin() + static_cast<std::ptrdiff_t>(m.start),
                words.begin() + static_cast<std::ptrdiff_t>(m.start + m.length));
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(m.start), repl_words.begin(),
                 repl_words.end());
  }
  return true;
}

const Lexicon& synonym_lexicon() {
  static const Lexicon lex = [] {
    Lexicon l = lexicon_from_groups({
        {"image", "picture", "photo"},
        {"photograph", "snapshot"},
        {"big", "large"},
        {"small", "little"},
        {"car", "automobile"},
        {"couch", "sofa"},
        {"bike", "bicycle"},
        {"tv", "television"},
        {"plane", "airplane"},
        {"street", "road"},
        {"cup", "mug"},
        {"kid", "child"},
        {"kids", "children"},
        {"man", "guy"},
        {"woman", "lady"},
        {"shown", "depicted", "displayed"},
        {"near", "close to"},
        {"beside", "next to"},
        {"holding", "carrying"},
        {"sitting", "seated"},
        {"how many", "what number of"},
        {"what color", "which color"},
        {"can you see", "do you see"},
    });
    // One-way question frames.
    l.push_back(make_entry("is there", {"does the image contain", "does the image have"}));
    l.push_back(make_entry("are there", {"does the image contain", "does the image have"}));
    l.push_back(make_entry("does the image contain", {"does the image have"}));
    l.push_back(make_entry("does the image have", {"does the image contain"}));
    return l;
  }();
  return lex;
}

// simple -> formal register. Hard applies it forward, Easy inverted.
const std::vector<std::pair<std::string, std::string>>& register_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs{
      {"see", "discern"},         {"show", "depict"},
      {"shows", "depicts"},       {"use", "utilize"},
      {"using", "utilizing"},     {"help", "assist"},
      {"about", "regarding"},     {"near", "in proximity to"},
      {"next to", "adjacent to"}, {"big", "sizable"},
      {"small", "diminutive"},    {"get", "obtain"},
      {"find", "locate"},         {"look at", "examine"},
      {"whole", "entire"},        {"kid", "juvenile"},
      {"kids", "juveniles"},      {"car", "automobile"},
      {"person", "individual"},   {"people", "individuals"},
      {"photo", "photograph"},    {"buy", "purchase"},
      {"eat", "consume"},         {"eating", "consuming"},
      {"holding", "grasping"},    {"wearing", "donning"},
      {"under", "beneath"},       {"inside", "within"},
  };
  return pairs;
}

// ---------------------------------------------------------------------------
// Whole-sentence rewrite rules for Hard and Easy. Patterns match the full body.

struct FrameRule {
  std::regex pattern;
  std::string format;
};

FrameRule frame(const char* pattern, const char* format) {
  return {std::regex(pattern, std::regex::ECMAScript | std::regex::icase), format};
}

const std::vector<FrameRule>& hard_frames() {
  static const std::vector<FrameRule> rules{
      frame(R"(^(?:is|are) there (.+)$)", "can the presence of $1 be confirmed"),
      frame(R"(^how many (.+?) (?:are|is) there$)", "what is the total count of $1 present"),
      frame(R"(^how many (.+?) (are|is) (.+)$)", "what is the total count of $1 that $2 $3"),
      frame(R"(^what colou?r (?:is|are) (.+)$)", "what is the color of $1"),
      frame(R"(^(?:can|do) you see (.+)$)", "is $1 discernible to you"),
  };
  return rules;
}

const std::vector<FrameRule>& easy_frames() {
  static const std::vector<FrameRule> rules{
      frame(R"(^can the presence of (.+) be confirmed$)", "is there $1"),
      frame(R"(^what is the total count of (.+?) present$)", "how many $1 are there"),
      frame(R"(^what is the total count of (.+?) that (are|is) (.+)$)", "how many $1 $2 $3"),
      frame(R"(^what is the colou?r of (.+)$)", "what color is $1"),
      frame(R"(^is (.+) discernible to you$)", "do you see $1"),
      frame(R"(^(?:is|are) there (.+)$)", "do you see $1"),
      frame(R"(^how many (.+?) (?:are|is) (?:in|on) (?:the|this) (?:image|picture|photo)$)",
            "how many $1 do you see"),
  };
  return rules;
}

// Applies one seeded choice among the matching frames; returns false if none match.
bool apply_frame(std::string& body, const std::vector<FrameRule>& rules, Rng& rng) {
  std::vector<const FrameRule*> matching;
  for (const auto& rule : rules) {
    if (std::regex_match(body, rule.pattern)) matching.push_back(&rule);
  }
  if (matching.empty()) return false;
  const FrameRule* rule = matching[rng.below(matching.size())];
  const bool upper = !body.empty() && is_upper(body[0]);
  std::string out = std::regex_replace(body, rule->pattern, rule->format);
  body = upper ? capitalize_first(out) : out;
  return true;
}

RuleOutcome unchanged(std::string_view prompt) { return {std::string(prompt), true}; }

RuleOutcome finish(std::string_view prompt, const std::string& candidate) {
  if (candidate == prompt) return unchanged(prompt);
  return {candidate, false};
}

// ---------------------------------------------------------------------------
// Policies.

char keyboard_neighbor(char c, Rng& rng) {
  static const std::array<std::string_view, 26> kNeighbors{
      "qwsz", "vghn", "xdfv", "serfcx", "wsdr", "drtgvc", "ftyhbv", "gyujnb", "ujko",
      "huikmn", "jiolm", "kop", "njk", "bhjm", "iklp", "ol", "wa", "edft", "awedxz",
      "rfgy", "yhji", "cfgb", "qase", "zsdc", "tghu", "asx"};
  const bool upper = is_upper(c);
  const char lower = upper ? static_cast<char>(c - 'A' + 'a') : c;
  const auto& options = kNeighbors[static_cast<std::size_t>(lower - 'a')];
  char out = options[rng.below(options.size())];
  return upper ? static_cast<char>(out - 'a' + 'A') : out;
}

// Ordered (token ordinal, token) pairs for every standalone yes/no token. Letter edits
// never change the number of tokens, so equal lists mean no yes/no token was touched.
std::vector<std::pair<std::size_t, std::string>> yes_no_tokens(std::string_view s) {
  std::vector<std::pair<std::size_t, std::string>> out;
  const auto tokens = text::alnum_tokens(s);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "yes" || tokens[i] == "no") out.emplace_back(i, tokens[i]);
  }
  return out;
}

struct Word {
  std::size_t begin;
  std::size_t end;
};

// Words in the part of `s` before the terminal punctuation run.
std::vector<Word> editable_words(const std::string& s) {
  std::size_t limit = s.size();
  while (limit > 0 && (is_terminal(s[limit - 1]) || std::isspace(static_cast<unsigned char>(
                                                        s[limit - 1])))) {
    --limit;
  }
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < limit) {
    while (i < limit && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t begin = i;
    while (i < limit && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > begin) words.push_back({begin, i});
  }
  return words;
}

// Byte positions of letters that may be edited: not in a yes/no word, not terminal.
std::vector<std::size_t> edit_sites(const std::string& s) {
  std::vector<std::size_t> sites;
  for (const Word& w : editable_words(s)) {
    const std::string word = s.substr(w.begin, w.end - w.begin);
    const std::string core = core_lower(word);
    if (core == "yes" || core == "no") continue;
    for (std::size_t c = w.begin; c < w.end; ++c) {
      if (is_letter(s[c])) sites.push_back(c);
    }
  }
  return sites;
}

std::size_t letters_in_word_at(const std::string& s, std::size_t pos) {
  std::size_t begin = pos;
  while (begin > 0 && !std::isspace(static_cast<unsigned char>(s[begin - 1]))) --begin;
  std::size_t count = 0;
  for (std::size_t i = begin; i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]));
       ++i) {
    if (is_letter(s[i])) ++count;
  }
  return count;
}

// One Levenshtein edit (substitute, delete or insert) at a random editable letter.
void spell_edit(std::string& s, const std::vector<std::size_t>& sites, Rng& rng,
                bool substitute_only) {
  const std::size_t pos = sites[rng.below(sites.size())];
  std::size_t op = substitute_only ? 0 : rng.below(3);
  if (op == 1 && letters_in_word_at(s, pos) < 3) op = 0;
  switch (op) {
    case 0:
      s[pos] = keyboard_neighbor(s[pos], rng);
      break;
    case 1:
      s.erase(pos, 1);
      break;
    default: {
      const char inserted = rng.coin() ? s[pos] : keyboard_neighbor(s[pos], rng);
      s.insert(pos, 1, inserted);
      break;
    }
  }
}

// Edits the prompt in place so whitespace and punctuation are preserved byte for byte.
RuleOutcome augment_spell(std::string_view prompt, Rng& rng) {
  const std::string original(prompt);
  const auto sites = edit_sites(original);
  if (sites.empty()) return unchanged(prompt);
  const auto guarded = yes_no_tokens(original);

  std::string out = original;
  const std::size_t edits = 1 + rng.below(2);
  for (std::size_t e = 0; e < edits; ++e) {
    const auto current_sites = edit_sites(out);
    if (current_sites.empty()) break;
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::string trial = out;
      spell_edit(trial, current_sites, rng, false);
      if (yes_no_tokens(trial) == guarded) {
        out = std::move(trial);
        break;
      }
    }
  }
  if (out == original) {
    // The edits cancelled out; fall back to a single substitution.
    spell_edit(out, sites, rng, true);
  }
  return {out, false};
}

RuleOutcome augment_append(std::string_view prompt, Rng& rng) {
  static const std::array<std::string_view, 5> kFront{
      "Please look at the image carefully.", "Quick question:", "Hi!",
      "Take a look at this photo.", "Here is my question:"};
  static const std::array<std::string_view, 5> kBack{
      "Please answer yes or no.", "Answer briefly.", "Thanks!", "Please be accurate.",
      "Look closely before answering."};
  const std::string original = text::trim(prompt);
  if (rng.coin()) {
    return {std::string(kFront[rng.below(kFront.size())]) + " " + original, false};
  }
  return {original + " " + std::string(kBack[rng.below(kBack.size())]), false};
}

RuleOutcome augment_short(std::string_view prompt, Rng& rng) {
  static const std::unordered_set<std::string> kRemovable{
      "please", "kindly",    "the",     "a",       "an",   "really", "very",
      "actually", "currently", "exactly", "clearly", "just", "here",   "any"};
  constexpr std::size_t kMinWords = 3;
  const Sentence s = split_sentence(prompt);
  auto words = text::split_words(s.body);
  if (words.size() <= kMinWords) return unchanged(prompt);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const WordParts parts = split_word(words[i]);
    if (parts.suffix.empty() && kRemovable.count(text::to_lower_ascii(parts.core)) > 0) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) return unchanged(prompt);
  const std::size_t limit = std::min(candidates.size(), words.size() - kMinWords);
  const auto picked = choose_indices(candidates.size(), 1 + rng.below(limit), rng);
  const bool upper = is_upper(words.front()[0]);
  for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
    words.erase(words.begin() + static_cast<std::ptrdiff_t>(candidates[*it]));
  }
  std::string body = text::join(words, " ");
  if (upper) body = capitalize_first(body);
  return finish(prompt, body + s.tail);
}

RuleOutcome augment_long(std::string_view prompt, Rng& rng) {
  static const std::array<std::string_view, 4> kLeading{
      "Looking at the image carefully, ", "Based on what you can see in this picture, ",
      "If you look closely at the image, ", "From what is shown in the photo, "};
  static const std::array<std::string_view, 2> kTrailing{" in the scene shown",
                                                         ", as far as you can tell"};
  const Sentence s = split_sentence(prompt);
  const std::size_t pick = rng.below(kLeading.size() + kTrailing.size());
  if (pick < kLeading.size()) {
    return {std::string(kLeading[pick]) + lower_first_if_safe(s.body) + s.tail, false};
  }
  return {s.body + std::string(kTrailing[pick - kLeading.size()]) + s.tail, false};
}

RuleOutcome augment_rewrite(std::string_view prompt, Rng& rng) {
  const Sentence s = split_sentence(prompt);
  auto words = text::split_words(s.body);
  if (!substitute(words, synonym_lexicon(), rng, 2)) return unchanged(prompt);
  return finish(prompt, text::join(words, " ") + s.tail);
}

RuleOutcome augment_register(std::string_view prompt, Rng& rng, bool harder) {
  static const Lexicon kFormal = lexicon_from_pairs(register_pairs(), false);
  static const Lexicon kPlain = lexicon_from_pairs(register_pairs(), true);
  const Sentence s = split_sentence(prompt);
  std::string body = s.body;
  const bool framed = apply_frame(body, harder ? hard_frames() : easy_frames(), rng);
  auto words = text::split_words(body);
  // Without a frame rewrite the lexicon is the only change, so use every match.
  const bool swapped = substitute(words, harder ? kFormal : kPlain, rng, 2, !framed);
  if (!framed && !swapped) return unchanged(prompt);
  return finish(prompt, text::join(words, " ") + s.tail);
}

}  // namespace

RuleOutcome rule_based_augment(std::string_view prompt, Policy policy, std::uint64_t seed) {
  if (text::split_words(prompt).empty()) {
    throw InputError("rule-based augmentation needs a prompt with at least one word");
  }
  Rng rng(derive_seed(seed, to_string(policy)));
  switch (policy) {
    case Policy::kSpell:
      return augment_spell(prompt, rng);
    case Policy::kAppend:
      return augment_append(prompt, rng);
    case Policy::kShort:
      return augment_short(prompt, rng);
    case Policy::kLong:
      return augment_long(prompt, rng);
    case Policy::kRewrite:
      return augment_rewrite(prompt, rng);
    case Policy::kHard:
      return augment_register(prompt, rng, true);
    case Policy::kEasy:
      return augment_register(prompt, rng, false);
  }
  return unchanged(prompt);
}

}  // namespace augcap
