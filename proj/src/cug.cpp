#include "augcap/cug.hpp"

#include <algorithm>
#include <vector>

#include "augcap/errors.hpp"
#include "augcap/rng.hpp"
#include "augcap/text.hpp"

namespace augcap {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::string_view to_string(CaptionSource source) {
  return source == CaptionSource::kHuman ? "human" : "machine";
}

CaptionSource parse_caption_source(std::string_view name) {
  const std::string lowered = text::to_lower_ascii(name);
  if (lowered == "human") return CaptionSource::kHuman;
  if (lowered == "machine") return CaptionSource::kMachine;
  throw InputError("unknown caption source \"" + std::string(name) + "\"");
}

std::string normalize_caption_text(std::string_view raw) {
  std::string t = text::trim(raw);
  while (!t.empty() && (is_terminator(t.back()) || is_space(t.back()))) t.pop_back();
  if (t.empty()) throw InputError("caption text is empty");
  t.push_back('.');
  return t;
}

Caption::Caption(std::string image_id, std::int64_t annotation_id, std::string_view text,
                 CaptionSource source)
    : image_id_(std::move(image_id)),
      annotation_id_(annotation_id),
      text_(normalize_caption_text(text)),
      source_(source) {}

std::string_view to_string(CaptionStrategy strategy) {
  switch (strategy) {
    case CaptionStrategy::kFirstById:
      return "first_by_id";
    case CaptionStrategy::kLongest:
      return "longest";
    case CaptionStrategy::kSeededRandom:
      return "seeded_random";
  }
  return "first_by_id";
}

CaptionStrategy parse_caption_strategy(std::string_view name) {
  if (name == "first_by_id") return CaptionStrategy::kFirstById;
  if (name == "longest") return CaptionStrategy::kLongest;
  if (name == "seeded_random") return CaptionStrategy::kSeededRandom;
  throw InputError("unknown caption strategy \"" + std::string(name) + "\"");
}

Caption select_caption(std::span<const Caption> captions, CaptionStrategy strategy,
                       std::uint64_t seed, std::string_view image_id) {
  if (captions.empty()) throw MissingCaptionError(std::string(image_id));
  // Work on an id-sorted view so the choice never depends on input order.
  std::vector<const Caption*> sorted;
  sorted.reserve(captions.size());
  for (const auto& c : captions) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Caption* a, const Caption* b) {
    return a->annotation_id() < b->annotation_id();
  });
  switch (strategy) {
    case CaptionStrategy::kFirstById:
      return *sorted.front();
    case CaptionStrategy::kLongest: {
      const Caption* best = sorted.front();
      for (const Caption* c : sorted) {
        if (text::utf8_length(c->text()) > text::utf8_length(best->text())) best = c;
      }
      return *best;
    }
    case CaptionStrategy::kSeededRandom: {
      Rng rng(seed);
      return *sorted[rng.below(sorted.size())];
    }
  }
  return *sorted.front();
}

CugTarget compose_target(const Caption& caption, std::string_view response) {
  if (text::is_blank(response)) throw InputError("cannot compose a target for an empty response");
  CugTarget target{caption, std::string(response), {}, 0};
  target.composed = caption.text() + std::string(kCaptionSeparator) + target.response;
  target.caption_len = text::utf8_length(caption.text()) + text::utf8_length(kCaptionSeparator);
  return target;
}

SplitResponse split_response(std::string_view generated, std::size_t caption_len) {
  const std::size_t boundary = text::utf8_byte_offset(generated, caption_len);
  std::string_view caption = generated.substr(0, boundary);
  if (caption.size() >= kCaptionSeparator.size() &&
      caption.substr(caption.size() - kCaptionSeparator.size()) == kCaptionSeparator) {
    caption.remove_suffix(kCaptionSeparator.size());
  }
  return {std::string(caption), std::string(generated.substr(boundary))};
}

SplitResponse split_response_heuristic(std::string_view generated) {
  for (std::size_t i = 0; i + 1 < generated.size(); ++i) {
    if (is_terminator(generated[i]) && is_space(generated[i + 1])) {
      std::size_t answer = i + 1;
      while (answer < generated.size() && is_space(generated[answer])) ++answer;
      return {std::string(generated.substr(0, i + 1)), std::string(generated.substr(answer))};
    }
  }
  return {std::string(), std::string(generated)};
}

}  // namespace augcap
