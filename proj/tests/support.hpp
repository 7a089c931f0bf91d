#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace augcap::testing {

// Plain Wagner-Fischer over bytes; independent of anything in the library.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("augcap_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(std::string_view name) const { return path_ / name; }
  std::string str(std::string_view name) const { return file(name).string(); }

  std::filesystem::path write(std::string_view name, std::string_view contents) const {
    const auto p = file(name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << contents;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const std::vector<std::string>& word_bank() {
  static const std::vector<std::string> words{
      "dog",    "cat",   "person", "car",    "table",  "red",    "blue",  "green",
      "two",    "three", "small",  "large",  "sofa",   "street", "tree",  "bird",
      "image",  "photo", "picture", "man",   "woman",  "child",  "kite",  "sky",
      "holding", "next", "to",     "on",     "under",  "near",   "wooden", "white"};
  return words;
}

inline std::string random_sentence(std::mt19937_64& gen, std::size_t min_words,
                                   std::size_t max_words) {
  const auto& bank = word_bank();
  std::uniform_int_distribution<std::size_t> len(min_words, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
  const std::size_t n = len(gen);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += bank[pick(gen)];
  }
  return s;
}

inline std::string random_question(std::mt19937_64& gen) {
  static const std::vector<std::string> openers{"Is there", "Are there", "Is the", "Does the",
                                                "Can you see", "Is this"};
  std::uniform_int_distribution<std::size_t> pick(0, openers.size() - 1);
  return openers[pick(gen)] + " " + random_sentence(gen, 2, 6) + "?";
}

}  // namespace augcap::testing
