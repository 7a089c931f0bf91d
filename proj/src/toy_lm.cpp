#include "augcap/toy_lm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "augcap/errors.hpp"
#include "augcap/rng.hpp"
#include "augcap/sampler.hpp"
#include "augcap/text.hpp"

namespace augcap {

namespace {

constexpr std::array<char32_t, 6> kReserved{lm_token::kImage, lm_token::kPrompt,
                                            lm_token::kTarget, lm_token::kPad,
                                            lm_token::kEnd, lm_token::kUnknown};

}  // namespace

std::u32string conditioning_context(std::string_view image_id, std::string_view prompt) {
  std::u32string ctx;
  ctx.push_back(lm_token::kImage);
  ctx += text::decode_utf8(image_id);
  ctx.push_back(lm_token::kPrompt);
  ctx += text::decode_utf8(prompt);
  ctx.push_back(lm_token::kTarget);
  return ctx;
}

NgramModel NgramModel::fit(std::span<const CorpusEntry> corpus, int order, double k) {
  if (order < 1) throw InputError("n-gram order must be at least 1");
  if (!(k > 0.0)) throw InputError("add-k smoothing constant must be positive");
  if (corpus.empty()) throw InputError("cannot fit a model on an empty corpus");

  NgramModel model;
  model.order_ = order;
  model.k_ = k;
  std::set<char32_t> vocab(kReserved.begin(), kReserved.end());
  std::vector<std::pair<std::u32string, std::u32string>> sequences;
  sequences.reserve(corpus.size());
  for (const auto& entry : corpus) {
    std::u32string context = conditioning_context(entry.image_id, entry.prompt);
    std::u32string target = text::decode_utf8(entry.target);
    target.push_back(lm_token::kEnd);
    vocab.insert(context.begin(), context.end());
    vocab.insert(target.begin(), target.end());
    sequences.emplace_back(std::move(context), std::move(target));
  }
  model.vocabulary_.assign(vocab.begin(), vocab.end());

  for (const auto& [context, target] : sequences) {
    std::u32string history = context;
    for (char32_t c : target) {
      const std::u32string key = model.context_key(history);
      ++model.counts_[key][c];
      ++model.totals_[key];
      history.push_back(c);
    }
  }
  return model;
}

char32_t NgramModel::symbol(char32_t c) const {
  return std::binary_search(vocabulary_.begin(), vocabulary_.end(), c) ? c : lm_token::kUnknown;
}

std::u32string NgramModel::context_key(std::u32string_view history) const {
  const std::size_t want = static_cast<std::size_t>(order_ - 1);
  std::u32string key;
  key.reserve(want);
  if (history.size() < want) key.append(want - history.size(), lm_token::kPad);
  const std::size_t take = std::min(want, history.size());
  for (char32_t c : history.substr(history.size() - take)) key.push_back(symbol(c));
  return key;
}

double NgramModel::probability(std::u32string_view history, char32_t next) const {
  const std::u32string key = context_key(history);
  const double vocab_size = static_cast<double>(vocabulary_.size());
  const auto total_it = totals_.find(key);
  if (total_it == totals_.end()) return 1.0 / vocab_size;
  const auto& next_counts = counts_.at(key);
  const auto it = next_counts.find(symbol(next));
  const double count = it == next_counts.end() ? 0.0 : static_cast<double>(it->second);
  return (count + k_) / (static_cast<double>(total_it->second) + k_ * vocab_size);
}

double NgramModel::total_nll(std::u32string history, std::u32string_view target) const {
  double sum = 0.0;
  for (char32_t c : target) {
    sum -= std::log(probability(history, c));
    history.push_back(c);
  }
  return sum;
}

double NgramModel::sequence_nll(std::string_view image_id, std::string_view prompt,
                                std::string_view target) const {
  const std::u32string chars = text::decode_utf8(target);
  if (chars.empty()) throw InputError("cannot score an empty target");
  return total_nll(conditioning_context(image_id, prompt), chars) /
         static_cast<double>(chars.size());
}

std::string NgramModel::greedy_decode(std::string_view image_id, std::string_view prompt,
                                      std::string_view forced_prefix,
                                      std::size_t max_chars) const {
  std::u32string history = conditioning_context(image_id, prompt);
  history += text::decode_utf8(forced_prefix);
  std::u32string generated;
  for (std::size_t step = 0; step < max_chars; ++step) {
    char32_t best = lm_token::kEnd;
    double best_p = -1.0;
    for (char32_t c : vocabulary_) {
      if (c == lm_token::kPad || c == lm_token::kUnknown) continue;
      const double p = probability(history, c);
      if (p > best_p) {
        best_p = p;
        best = c;
      }
    }
    if (best == lm_token::kEnd) break;
    generated.push_back(best);
    history.push_back(best);
  }
  return text::encode_utf8(generated);
}

nlohmann::json NgramModel::to_json() const {
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [context, next] : counts_) {
    nlohmann::json row{{"context", text::encode_utf8(context)}};
    nlohmann::json next_json = nlohmann::json::object();
    for (const auto& [c, n] : next) next_json[text::encode_utf8(std::u32string(1, c))] = n;
    row["next"] = std::move(next_json);
    counts.push_back(std::move(row));
  }
  return nlohmann::json{{"order", order_},
                        {"k", k_},
                        {"vocabulary", text::encode_utf8(std::u32string(vocabulary_.begin(),
                                                                        vocabulary_.end()))},
                        {"counts", std::move(counts)}};
}

NgramModel NgramModel::from_json(const nlohmann::json& j) {
  try {
    NgramModel model;
    model.order_ = j.at("order").get<int>();
    model.k_ = j.at("k").get<double>();
    if (model.order_ < 1 || !(model.k_ > 0.0)) throw DataError("invalid order or k");
    const std::u32string vocab = text::decode_utf8(j.at("vocabulary").get<std::string>());
    std::set<char32_t> sorted(vocab.begin(), vocab.end());
    model.vocabulary_.assign(sorted.begin(), sorted.end());
    for (const auto& row : j.at("counts")) {
      const std::u32string context = text::decode_utf8(row.at("context").get<std::string>());
      if (context.size() != static_cast<std::size_t>(model.order_ - 1)) {
        throw DataError("context length does not match the model order");
      }
      for (const auto& [key, value] : row.at("next").items()) {
        const std::u32string c = text::decode_utf8(key);
        if (c.size() != 1) throw DataError("next-symbol keys must be single characters");
        const auto n = value.get<std::uint64_t>();
        model.counts_[context][c[0]] += n;
        model.totals_[context] += n;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed n-gram model: ") + e.what());
  }
}

void NgramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

double sequence_nll(const NgramModel& model, std::string_view image_id, std::string_view prompt,
                    std::string_view target) {
  return model.sequence_nll(image_id, prompt, target);
}

double sequence_nll(const NgramModel& model, std::string_view image_id, std::string_view prompt,
                    const CugTarget& target) {
  return model.sequence_nll(image_id, prompt, target.composed);
}

std::string_view to_string(LossMode mode) {
  return mode == LossMode::kExact ? "exact" : "monte_carlo";
}

LossBreakdown composite_loss(const NgramModel& model, const ManifestRecord& record,
                             const LossOptions& options) {
  LossBreakdown loss;
  loss.lambda = record.lambda;
  loss.mode = options.mode;
  loss.base = sequence_nll(model, record.image_id, record.original_prompt, record.target);

  const std::vector<double> scores = record.scores();
  std::vector<double> nll(record.pool.size(), 0.0);
  auto item_nll = [&](std::size_t i) {
    return sequence_nll(model, record.image_id, record.pool[i].text, record.target);
  };

  if (options.mode == LossMode::kExact) {
    const std::vector<double> weights = exact_distribution(scores);
    if (weights.empty()) {
      loss.augmented = loss.base;
    } else {
      double sum = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) sum += weights[i] * item_nll(i);
      }
      loss.augmented = sum;
    }
  } else {
    loss.seed = options.seed;
    loss.draws = options.draws;
    const WeightedSampler sampler(scores);
    if (sampler.empty() || options.draws == 0) {
      loss.augmented = loss.base;
    } else {
      for (std::size_t i = 0; i < nll.size(); ++i) {
        if (sampler.probabilities()[i] > 0.0) nll[i] = item_nll(i);
      }
      // Tally draws per item, then reduce; avoids summing 200k doubles one at a time.
      std::vector<std::size_t> hits(nll.size(), 0);
      Rng rng(options.seed);
      for (std::size_t d = 0; d < options.draws; ++d) ++hits[sampler.draw(rng)];
      const double n = static_cast<double>(options.draws);
      double mean = 0.0;
      for (std::size_t i = 0; i < nll.size(); ++i) {
        if (hits[i] > 0) mean += static_cast<double>(hits[i]) * nll[i];
      }
      mean /= n;
      double squares = 0.0;
      for (std::size_t i = 0; i < nll.size(); ++i) {
        if (hits[i] > 0) squares += static_cast<double>(hits[i]) * (nll[i] - mean) * (nll[i] - mean);
      }
      loss.augmented = mean;
      const double variance = options.draws > 1 ? squares / (n - 1.0) : 0.0;
      loss.std_error = std::sqrt(variance / n);
    }
  }
  loss.total = loss.base + loss.lambda * loss.augmented;
  return loss;
}

OrderedJson to_json(const LossBreakdown& loss) {
  OrderedJson j{{"base", loss.base},
                {"augmented", loss.augmented},
                {"total", loss.total},
                {"lambda", loss.lambda},
                {"mode", to_string(loss.mode)}};
  if (loss.mode == LossMode::kMonteCarlo) {
    j["seed"] = loss.seed;
    j["draws"] = loss.draws;
    j["std_error"] = loss.std_error;
  }
  return j;
}

}  // namespace augcap
