#include <atomic>
#include <map>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "augcap/errors.hpp"
#include "augcap/parallel.hpp"
#include "augcap/policy.hpp"
#include "augcap/rng.hpp"
#include "augcap/text.hpp"
#include "support.hpp"

using namespace augcap;

TEST_CASE("trim and blank detection") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::trim("") == "");
  CHECK(text::is_blank(" \t\r\n"));
  CHECK_FALSE(text::is_blank(" x "));
}

TEST_CASE("alnum tokens are lowercase ascii runs") {
  const auto toks = text::alnum_tokens("Is there a DOG? It's 2 dogs!");
  const std::vector<std::string> want{"is", "there", "a", "dog", "it", "s", "2", "dogs"};
  CHECK(toks == want);
  CHECK(text::alnum_tokens("?!").empty());
}

TEST_CASE("utf8 decode and encode roundtrip") {
  const std::string s = "caf\xC3\xA9 \xE2\x9C\x93 \xF0\x9F\x90\xB6";
  const std::u32string d = text::decode_utf8(s);
  CHECK(d.size() == 8);
  CHECK(d[3] == U'\u00E9');
  CHECK(d[7] == U'\U0001F436');
  CHECK(text::encode_utf8(d) == s);
  CHECK(text::utf8_length(s) == 8);
  CHECK(text::utf8_byte_offset(s, 4) == 5);
  CHECK(text::utf8_byte_offset(s, 8) == s.size());
}

TEST_CASE("invalid utf8 bytes decode to the replacement character") {
  const std::string bad = "a\xFF" "b\xC3";
  const std::u32string d = text::decode_utf8(bad);
  REQUIRE(d.size() == 4);
  CHECK(d[1] == U'\uFFFD');
  CHECK(d[3] == U'\uFFFD');
  CHECK(text::utf8_length(bad) == 4);
}

TEST_CASE("utf8 byte offsets agree with the decoder on random byte strings") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(gen() % 12);
    for (int i = 0; i < len; ++i) s.push_back(static_cast<char>(byte(gen)));
    const std::size_t n = text::decode_utf8(s).size();
    CHECK(text::utf8_length(s) == n);
    CHECK(text::utf8_byte_offset(s, n) == s.size());
    for (std::size_t k = 0; k <= n; ++k) {
      const std::size_t off = text::utf8_byte_offset(s, k);
      CHECK(text::decode_utf8(s.substr(0, off)).size() == k);
    }
  }
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 12638187200555641996ULL);
  CHECK(fnv1a64("dog") == 14604957094952335593ULL);
}

TEST_CASE("splitmix64 reference value") { CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL); }

TEST_CASE("derived seeds are stable and label sensitive") {
  CHECK(derive_seed(1, "sample") == derive_seed(1, "sample"));
  CHECK(derive_seed(1, "sample") != derive_seed(1, "augment"));
  CHECK(derive_seed(1, "sample") != derive_seed(2, "sample"));
  CHECK(derive_seed(5, std::uint64_t{0}) != derive_seed(5, std::uint64_t{1}));
}

TEST_CASE("Rng helpers stay in range") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7);
  }
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("policy names roundtrip") {
  for (Policy p : all_policies()) {
    CHECK(parse_policy(to_string(p)) == p);
    CHECK(parse_policy(display_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_policy("shorter"), InputError);
  CHECK_FALSE(try_parse_policy("nope").has_value());
}

TEST_CASE("policy lists") {
  CHECK(parse_policy_list("all").size() == kPolicyCount);
  const auto two = parse_policy_list("spell, hard");
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Policy::kSpell);
  CHECK(two[1] == Policy::kHard);
  CHECK(format_policy_list(two) == "spell,hard");
  CHECK_THROWS_AS(parse_policy_list(""), InputError);
}

TEST_CASE("every default template has exactly one placeholder and renders") {
  const TemplateSet defaults = TemplateSet::defaults();
  for (Policy p : all_policies()) {
    const auto& t = defaults.at(p);
    CHECK(text::count_occurrences(t.instruction_text(), kPromptPlaceholder) == 1);
    const std::string rendered = t.render("Is there a dog?");
    CHECK(rendered.find("Is there a dog?") != std::string::npos);
    CHECK(rendered.find(kPromptPlaceholder) == std::string::npos);
  }
  CHECK(render_policy_template(Policy::kSpell, "Q?").find("up to two") != std::string::npos);
}

TEST_CASE("templates reject bad placeholders and blank prompts") {
  CHECK_THROWS_AS(PolicyTemplate(Policy::kHard, "no placeholder"), InputError);
  CHECK_THROWS_AS(PolicyTemplate(Policy::kHard, "{prompt} and {prompt}"), InputError);
  CHECK_THROWS_AS(render_policy_template(Policy::kHard, "   "), InputError);
}

TEST_CASE("template files override defaults") {
  testing::TempDir dir;
  const auto path = dir.write("t.json", R"({"short": "Make it brief: {prompt}"})");
  const TemplateSet set = TemplateSet::load(path);
  CHECK(set.at(Policy::kShort).render("Q?") == "Make it brief: Q?");
  CHECK(set.at(Policy::kLong).instruction_text() ==
        TemplateSet::defaults().at(Policy::kLong).instruction_text());
  const auto bad = dir.write("bad.json", R"({"short": "missing"})");
  CHECK_THROWS(TemplateSet::load(bad));
}

TEST_CASE("parallel_for fills every slot regardless of worker count") {
  for (std::size_t workers : {1, 2, 8, 64}) {
    std::vector<std::size_t> out(257, 0);
    parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  std::atomic<int> ran{0};
  try {
    parallel_for(100, 8, [&](std::size_t i) {
      ++ran;
      if (i == 30 || i == 70) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 30");
  }
  CHECK(ran.load() == 100);
}
