#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace augcap {

enum class CaptionSource { kHuman, kMachine };

std::string_view to_string(CaptionSource source);
CaptionSource parse_caption_source(std::string_view name);

// Trims whitespace and replaces any trailing run of sentence terminators with exactly
// one period. Idempotent. Throws InputError if nothing is left.
std::string normalize_caption_text(std::string_view raw);

class Caption {
 public:
  Caption(std::string image_id, std::int64_t annotation_id, std::string_view text,
          CaptionSource source = CaptionSource::kHuman);

  const std::string& image_id() const noexcept { return image_id_; }
  std::int64_t annotation_id() const noexcept { return annotation_id_; }
  const std::string& text() const noexcept { return text_; }
  CaptionSource source() const noexcept { return source_; }

  friend bool operator==(const Caption&, const Caption&) = default;

 private:
  std::string image_id_;
  std::int64_t annotation_id_;
  std::string text_;
  CaptionSource source_;
};

enum class CaptionStrategy { kFirstById, kLongest, kSeededRandom };

std::string_view to_string(CaptionStrategy strategy);
CaptionStrategy parse_caption_strategy(std::string_view name);

// Ties under kFirstById/kLongest go to the lowest annotation id. Throws
// MissingCaptionError (carrying `image_id`) when the list is empty.
Caption select_caption(std::span<const Caption> captions, CaptionStrategy strategy,
                       std::uint64_t seed, std::string_view image_id = {});

inline constexpr std::string_view kCaptionSeparator = " ";

// Caption-prefixed ground truth: composed == caption + " " + response.
// caption_len counts Unicode code points of the caption plus the separator.
struct CugTarget {
  Caption caption;
  std::string response;
  std::string composed;
  std::size_t caption_len = 0;

  friend bool operator==(const CugTarget&, const CugTarget&) = default;
};

// Throws InputError for an empty response.
CugTarget compose_target(const Caption& caption, std::string_view response);

struct SplitResponse {
  std::string caption_part;
  std::string answer_part;

  friend bool operator==(const SplitResponse&, const SplitResponse&) = default;
};

// Splits at a known caption boundary (code points, separator included). The
// separator is not part of either half.
SplitResponse split_response(std::string_view generated, std::size_t caption_len);

// Splits after the first '.', '!' or '?' that is followed by whitespace. Without such a
// terminator the caption part is empty and the answer is the whole string.
SplitResponse split_response_heuristic(std::string_view generated);

}  // namespace augcap
