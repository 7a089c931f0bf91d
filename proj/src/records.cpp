#include "augcap/records.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "augcap/text.hpp"

namespace augcap {

namespace {

using Json = nlohmann::json;

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw DataError(std::string("missing field \"") + name + "\"");
  return *it;
}

std::string string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw DataError(std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

// Ids may arrive as strings or integers (COCO uses integers).
std::string id_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw DataError(std::string("field \"") + name + "\" must be a string or an integer");
}

double number_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) throw DataError(std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

std::uint64_t u64_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) {
    throw DataError(std::string("field \"") + name + "\" must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::optional<double> optional_number(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(std::string("field \"") + name + "\" must be a number");
  return it->get<double>();
}

template <typename Fn>
auto wrap_parse(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(e.what());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kYes:
      return "yes";
    case Label::kNo:
      return "no";
    case Label::kOpen:
      return "open";
  }
  return "open";
}

Label parse_label(std::string_view name) {
  const std::string lowered = text::to_lower_ascii(text::trim(name));
  if (lowered == "yes") return Label::kYes;
  if (lowered == "no") return Label::kNo;
  if (lowered == "open") return Label::kOpen;
  throw DataError("unknown label \"" + std::string(name) + "\"");
}

std::string policy_tag(const std::optional<Policy>& policy) {
  return policy ? std::string(to_string(*policy)) : std::string(kOriginalTag);
}

std::optional<Policy> parse_policy_tag(std::string_view tag) {
  if (text::to_lower_ascii(tag) == kOriginalTag) return std::nullopt;
  if (auto policy = try_parse_policy(tag)) return policy;
  throw DataError("unknown policy tag \"" + std::string(tag) + "\"");
}

std::vector<double> ManifestRecord::scores() const {
  std::vector<double> out;
  out.reserve(pool.size());
  for (const auto& item : pool) out.push_back(item.score.value_or(0.0));
  return out;
}

// ---------------------------------------------------------------------------

OrderedJson to_json(const PromptRecord& r) {
  return OrderedJson{{"id", r.id},
                     {"image_id", r.image_id},
                     {"prompt", r.prompt},
                     {"response", r.response},
                     {"label", to_string(r.label)},
                     {"source", r.source}};
}

OrderedJson to_json(const AugmentedPrompt& item) {
  OrderedJson j{{"policy", to_string(item.policy)}, {"text", item.text}};
  j["raw_score"] = item.raw_score ? OrderedJson(*item.raw_score) : OrderedJson(nullptr);
  j["score"] = item.score ? OrderedJson(*item.score) : OrderedJson(nullptr);
  j["provenance"] = to_string(item.provenance);
  j["unchanged"] = item.unchanged;
  return j;
}

OrderedJson to_json(const SampleOutcome& s) {
  OrderedJson j{{"chosen_text", s.chosen_text}};
  j["chosen_index"] =
      s.chosen_index ? OrderedJson(*s.chosen_index) : OrderedJson("ORIGINAL");
  j["probabilities"] = s.probabilities;
  j["seed"] = s.seed;
  return j;
}

OrderedJson to_json(const Caption& c) {
  return OrderedJson{{"image_id", c.image_id()},
                     {"id", c.annotation_id()},
                     {"text", c.text()},
                     {"source", to_string(c.source())}};
}

OrderedJson to_json(const CugTarget& t) {
  return OrderedJson{{"response", t.response},
                     {"composed", t.composed},
                     {"caption_len", t.caption_len}};
}

OrderedJson to_json(const ManifestRecord& r) {
  OrderedJson pool = OrderedJson::array();
  for (const auto& item : r.pool) pool.push_back(to_json(item));
  return OrderedJson{{"record_id", r.record_id},
                     {"image_id", r.image_id},
                     {"original_prompt", r.original_prompt},
                     {"pool", std::move(pool)},
                     {"sampled", to_json(r.sampled)},
                     {"caption", to_json(r.caption)},
                     {"target", to_json(r.target)},
                     {"epsilon", r.epsilon},
                     {"lambda", r.lambda},
                     {"build_seed", r.build_seed},
                     {"record_seed", r.record_seed}};
}

OrderedJson to_json(const EvalRecord& r) {
  return OrderedJson{{"record_id", r.record_id},
                     {"image_id", r.image_id},
                     {"policy", policy_tag(r.policy)},
                     {"prompt_shown", r.prompt_shown},
                     {"gt_label", to_string(r.gt_label)},
                     {"model_response", r.model_response}};
}

OrderedJson to_json(const PoolRecord& r) {
  OrderedJson j = to_json(r.record);
  OrderedJson pool = OrderedJson::array();
  for (const auto& item : r.pool) pool.push_back(to_json(item));
  j["pool"] = std::move(pool);
  if (r.epsilon) j["epsilon"] = *r.epsilon;
  if (r.sampled) j["sampled"] = to_json(*r.sampled);
  return j;
}

// ---------------------------------------------------------------------------

PromptRecord prompt_record_from_json(const Json& j) {
  return wrap_parse([&] {
    PromptRecord r;
    r.id = id_field(j, "id");
    if (r.id.empty()) throw DataError("field \"id\" is empty");
    r.image_id = id_field(j, "image_id");
    r.prompt = string_field(j, "prompt");
    if (text::is_blank(r.prompt)) throw DataError("field \"prompt\" is empty");
    r.response = j.contains("response") ? string_field(j, "response") : std::string();
    r.label = parse_label(string_field(j, "label"));
    r.source = j.contains("source") ? string_field(j, "source") : std::string();
    return r;
  });
}

AugmentedPrompt augmented_prompt_from_json(const Json& j, std::string_view parent_id) {
  return wrap_parse([&] {
    AugmentedPrompt item;
    item.parent_id = std::string(parent_id);
    item.policy = parse_policy(string_field(j, "policy"));
    item.text = string_field(j, "text");
    if (text::is_blank(item.text)) throw DataError("pool item text is empty");
    item.raw_score = optional_number(j, "raw_score");
    item.score = optional_number(j, "score");
    item.provenance = j.contains("provenance") ? parse_provenance(string_field(j, "provenance"))
                                               : Provenance::kRuleBased;
    item.unchanged = j.value("unchanged", false);
    return item;
  });
}

SampleOutcome sample_outcome_from_json(const Json& j) {
  return wrap_parse([&] {
    SampleOutcome s;
    s.chosen_text = string_field(j, "chosen_text");
    const Json& index = field(j, "chosen_index");
    if (index.is_string()) {
      if (index.get<std::string>() != "ORIGINAL") {
        throw DataError("chosen_index must be an integer or \"ORIGINAL\"");
      }
    } else {
      s.chosen_index = index.get<std::size_t>();
    }
    s.probabilities = field(j, "probabilities").get<std::vector<double>>();
    s.seed = u64_field(j, "seed");
    return s;
  });
}

Caption caption_from_json(const Json& j) {
  return wrap_parse([&] {
    const std::string text = string_field(j, "text");
    if (text::is_blank(text)) throw DataError("caption text is empty");
    return Caption(id_field(j, "image_id"), field(j, "id").get<std::int64_t>(), text,
                   parse_caption_source(string_field(j, "source")));
  });
}

ManifestRecord manifest_record_from_json(const Json& j) {
  return wrap_parse([&] {
    const std::string record_id = id_field(j, "record_id");
    std::vector<AugmentedPrompt> pool;
    for (const auto& item : field(j, "pool")) {
      pool.push_back(augmented_prompt_from_json(item, record_id));
    }
    Caption caption = caption_from_json(field(j, "caption"));
    const Json& target = field(j, "target");
    CugTarget cug{caption, string_field(target, "response"), string_field(target, "composed"),
                  field(target, "caption_len").get<std::size_t>()};
    if (cug.composed != caption.text() + std::string(kCaptionSeparator) + cug.response) {
      throw DataError("target.composed is not caption + separator + response");
    }
    const double lambda = number_field(j, "lambda");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DataError("lambda must lie in [0, 1]");
    return ManifestRecord{record_id,
                          id_field(j, "image_id"),
                          string_field(j, "original_prompt"),
                          std::move(pool),
                          sample_outcome_from_json(field(j, "sampled")),
                          std::move(caption),
                          std::move(cug),
                          number_field(j, "epsilon"),
                          lambda,
                          u64_field(j, "build_seed"),
                          u64_field(j, "record_seed")};
  });
}

EvalRecord eval_record_from_json(const Json& j) {
  return wrap_parse([&] {
    EvalRecord r;
    r.record_id = id_field(j, "record_id");
    r.image_id = j.contains("image_id") ? id_field(j, "image_id") : std::string();
    r.policy = parse_policy_tag(string_field(j, "policy"));
    r.prompt_shown = string_field(j, "prompt_shown");
    r.gt_label = parse_label(string_field(j, "gt_label"));
    if (r.gt_label == Label::kOpen) throw DataError("gt_label must be yes or no");
    const auto it = j.find("model_response");
    r.model_response = (it == j.end() || it->is_null()) ? std::string() : string_field(j, "model_response");
    return r;
  });
}

PoolRecord pool_record_from_json(const Json& j) {
  return wrap_parse([&] {
    PoolRecord r;
    r.record = prompt_record_from_json(j);
    for (const auto& item : field(j, "pool")) {
      r.pool.push_back(augmented_prompt_from_json(item, r.record.id));
    }
    r.epsilon = optional_number(j, "epsilon");
    if (j.contains("sampled")) r.sampled = sample_outcome_from_json(j.at("sampled"));
    return r;
  });
}

// ---------------------------------------------------------------------------

QaLoadResult load_qa_pairs(const std::filesystem::path& path, double max_malformed_fraction) {
  std::ifstream in = open_input(path);
  QaLoadResult result;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank(line)) continue;
    ++non_blank;
    PromptRecord record;
    try {
      const Json j = Json::parse(line);
      if (j.is_object() && j.contains("header")) {
        --non_blank;
        continue;
      }
      record = prompt_record_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
      continue;
    } catch (const DataError& e) {
      result.errors.push_back({line_no, e.what()});
      continue;
    }
    if (!seen.insert(record.id).second) throw DuplicateIdError(record.id);
    result.records.push_back(std::move(record));
  }
  if (non_blank > 0 && static_cast<double>(result.errors.size()) >
                           max_malformed_fraction * static_cast<double>(non_blank)) {
    std::ostringstream msg;
    msg << path.string() << ": " << result.errors.size() << " of " << non_blank
        << " lines are malformed (limit " << max_malformed_fraction * 100.0 << "%)";
    for (const auto& e : result.errors) msg << "\n  line " << e.line << ": " << e.message;
    throw MalformedInputError(msg.str(), result.errors);
  }
  return result;
}

std::string_view to_string(CaptionFormat format) {
  return format == CaptionFormat::kCocoAnnotations ? "coco_annotations" : "plain_jsonl";
}

CaptionFormat parse_caption_format(std::string_view name) {
  if (name == "coco_annotations" || name == "coco") return CaptionFormat::kCocoAnnotations;
  if (name == "plain_jsonl" || name == "jsonl") return CaptionFormat::kPlainJsonl;
  throw InputError("unknown caption format \"" + std::string(name) + "\"");
}

CaptionIndex load_captions(const std::filesystem::path& path, CaptionFormat format,
                           CaptionSource default_source) {
  std::ifstream in = open_input(path);
  CaptionIndex index;
  auto add = [&](const Json& entry, std::int64_t fallback_id, const std::string& where) {
    try {
      const std::string image_id = id_field(entry, "image_id");
      const std::string caption = string_field(entry, "caption");
      if (text::is_blank(caption)) throw DataError("caption text is empty");
      const std::int64_t id =
          entry.contains("id") ? field(entry, "id").get<std::int64_t>() : fallback_id;
      const CaptionSource source = entry.contains("source")
                                       ? parse_caption_source(string_field(entry, "source"))
                                       : default_source;
      index[image_id].emplace_back(image_id, id, caption, source);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " " + where + ": " + e.what());
    } catch (const Error& e) {
      throw DataError(path.string() + " " + where + ": " + e.what());
    }
  };

  if (format == CaptionFormat::kCocoAnnotations) {
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
      throw DataError(path.string() + " has no \"annotations\" array");
    }
    const auto& annotations = doc["annotations"];
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      add(annotations[i], static_cast<std::int64_t>(i), "annotation " + std::to_string(i));
    }
    return index;
  }

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    add(j, static_cast<std::int64_t>(line_no), "line " + std::to_string(line_no));
  }
  return index;
}

JsonLines read_json_lines(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  JsonLines out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1 && j.is_object() && j.contains("header")) {
      out.header = j["header"];
      continue;
    }
    out.rows.push_back(std::move(j));
  }
  return out;
}

void write_json_lines(const std::filesystem::path& path, const std::optional<OrderedJson>& header,
                      const std::vector<OrderedJson>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  if (header) out << OrderedJson{{"header", *header}}.dump() << '\n';
  for (const auto& row : rows) out << row.dump() << '\n';
  if (!out) throw DataError("error while writing " + path.string());
}

namespace {

template <typename T, typename Parse>
std::vector<T> read_rows(const std::filesystem::path& path, Parse&& parse) {
  const JsonLines lines = read_json_lines(path);
  std::vector<T> out;
  out.reserve(lines.rows.size());
  for (std::size_t i = 0; i < lines.rows.size(); ++i) {
    try {
      out.push_back(parse(lines.rows[i]));
    } catch (const DataError& e) {
      throw DataError(path.string() + " row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  return read_rows<ManifestRecord>(path, manifest_record_from_json);
}

std::vector<EvalRecord> read_eval_records(const std::filesystem::path& path) {
  return read_rows<EvalRecord>(path, eval_record_from_json);
}

std::vector<PoolRecord> read_pool_records(const std::filesystem::path& path) {
  return read_rows<PoolRecord>(path, pool_record_from_json);
}

}  // namespace augcap
