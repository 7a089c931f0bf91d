#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace augcap::text {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool is_blank(std::string_view s);

// Whitespace-separated words, no empty entries.
std::vector<std::string> split_words(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Maximal runs of [a-z0-9] after ASCII lowercasing; everything else separates.
std::vector<std::string> alnum_tokens(std::string_view s);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// UTF-8 helpers. Invalid sequences decode byte-by-byte as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::size_t utf8_length(std::string_view s);
// Byte offset of the code point at `index`; clamps to s.size().
std::size_t utf8_byte_offset(std::string_view s, std::size_t index);

}  // namespace augcap::text
