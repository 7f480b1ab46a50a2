#include "biaslex/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "biaslex/error.hpp"

namespace biaslex {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<BiasTarget, std::string_view>, 9> kTargets{{
    {BiasTarget::vitima, "vitima"},
    {BiasTarget::reu, "reu"},
    {BiasTarget::test, "test"},
    {BiasTarget::mae, "mae"},
    {BiasTarget::mul, "mul"},
    {BiasTarget::abs_mul, "abs_mul"},
    {BiasTarget::abs_reu, "abs_reu"},
    {BiasTarget::abs_cri, "abs_cri"},
    {BiasTarget::soc, "soc"},
}};

constexpr std::array<std::pair<BiasCategory, std::string_view>, 6> kCategories{{
    {BiasCategory::relationship_dynamics, "relationship_dynamics"},
    {BiasCategory::victim_or_woman_features, "victim_or_woman_features"},
    {BiasCategory::mother_features, "mother_features"},
    {BiasCategory::aggressor_features, "aggressor_features"},
    {BiasCategory::general_values, "general_values"},
    {BiasCategory::general_child_values, "general_child_values"},
}};

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!obj.is_object()) throw DataError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw DataError(std::string(where) + ": unknown key \"" + key + "\"");
    }
  }
}

const json& require(const json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(std::string(where) + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, std::string_view where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw DataError(std::string(where) + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

BiasSpan span_from_json(const json& j, std::string_view where) {
  reject_unknown_keys(j, {"statement", "targets", "category"}, where);
  BiasSpan span;
  span.statement = require_string(j, "statement", where);
  const auto& targets = require(j, "targets", where);
  if (!targets.is_array()) throw DataError(std::string(where) + ": \"targets\" must be an array");
  try {
    for (const auto& t : targets) span.targets.insert(parse_bias_target(t.get<std::string>()));
    span.category = parse_bias_category(require_string(j, "category", where));
  } catch (const json::exception& e) {
    throw DataError(std::string(where) + ": " + e.what());
  }
  return span;
}

json span_to_json(const BiasSpan& span) {
  json targets = json::array();
  for (auto t : span.targets) targets.push_back(std::string(to_string(t)));
  return {{"statement", span.statement},
          {"targets", std::move(targets)},
          {"category", std::string(to_string(span.category))}};
}

Decision decision_from_json(const json& j, std::size_t index) {
  const std::string where = "decisions[" + std::to_string(index) + "]";
  reject_unknown_keys(j, {"id", "raw_text", "clean_text", "dataset_tag", "attributes", "bias_spans"},
                      where);
  Decision d;
  d.id = require_string(j, "id", where);
  d.raw_text = require_string(j, "raw_text", where);
  const auto& clean = require(j, "clean_text", where);
  if (clean.is_string()) {
    d.clean_text = clean.get<std::string>();
  } else if (!clean.is_null()) {
    throw DataError(where + ": \"clean_text\" must be a string or null");
  }
  d.dataset_tag = parse_dataset_tag(require_string(j, "dataset_tag", where));
  const auto& attrs = require(j, "attributes", where);
  if (!attrs.is_object()) throw DataError(where + ": \"attributes\" must be an object");
  for (const auto& [name, value] : attrs.items()) {
    std::vector<std::string> values;
    if (value.is_string()) {
      values.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_string()) throw DataError(where + ": attribute \"" + name + "\" has a non-string value");
        values.push_back(v.get<std::string>());
      }
    } else {
      throw DataError(where + ": attribute \"" + name + "\" must be a string or array");
    }
    d.attributes.emplace(name, std::move(values));
  }
  const auto& spans = require(j, "bias_spans", where);
  if (!spans.is_array()) throw DataError(where + ": \"bias_spans\" must be an array");
  for (std::size_t k = 0; k < spans.size(); ++k) {
    d.bias_spans.push_back(span_from_json(spans[k], where + ".bias_spans[" + std::to_string(k) + "]"));
  }
  return d;
}

json decision_to_json(const Decision& d) {
  json attrs = json::object();
  for (const auto& [name, values] : d.attributes) {
    attrs[name] = values.size() == 1 ? json(values.front()) : json(values);
  }
  json spans = json::array();
  for (const auto& s : d.bias_spans) spans.push_back(span_to_json(s));
  return {{"id", d.id},
          {"raw_text", d.raw_text},
          {"clean_text", d.clean_text ? json(*d.clean_text) : json(nullptr)},
          {"dataset_tag", std::string(to_string(d.dataset_tag))},
          {"attributes", std::move(attrs)},
          {"bias_spans", std::move(spans)}};
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::string_view to_string(DatasetTag tag) { return tag == DatasetTag::DVC ? "DVC" : "PAC"; }

DatasetTag parse_dataset_tag(std::string_view s) {
  if (s == "DVC") return DatasetTag::DVC;
  if (s == "PAC") return DatasetTag::PAC;
  throw DataError("unknown dataset tag \"" + std::string(s) + "\"");
}

std::string_view to_string(BiasTarget target) {
  for (const auto& [t, name] : kTargets) {
    if (t == target) return name;
  }
  return "?";
}

BiasTarget parse_bias_target(std::string_view s) {
  for (const auto& [t, name] : kTargets) {
    if (name == s) return t;
  }
  throw DataError("unknown bias target \"" + std::string(s) + "\"");
}

std::string_view to_string(BiasCategory category) {
  for (const auto& [c, name] : kCategories) {
    if (c == category) return name;
  }
  return "?";
}

BiasCategory parse_bias_category(std::string_view s) {
  for (const auto& [c, name] : kCategories) {
    if (name == s) return c;
  }
  throw DataError("unknown bias category \"" + std::string(s) + "\"");
}

bool category_valid_for(BiasCategory category, DatasetTag tag) {
  switch (category) {
    case BiasCategory::relationship_dynamics:
    case BiasCategory::aggressor_features:
      return true;
    case BiasCategory::victim_or_woman_features:
    case BiasCategory::general_values:
      return tag == DatasetTag::DVC;
    case BiasCategory::mother_features:
    case BiasCategory::general_child_values:
      return tag == DatasetTag::PAC;
  }
  return false;
}

DatasetManifest compute_manifest(DatasetTag tag, const std::vector<Decision>& decisions) {
  DatasetManifest m;
  m.tag = tag;
  m.decision_count = decisions.size();
  std::size_t biased = 0;
  for (const auto& d : decisions) {
    if (!is_annotated(d)) continue;
    ++m.annotated_count;
    if (is_biased(d)) ++biased;
  }
  m.biased_fraction = m.annotated_count == 0
                          ? 0.0
                          : static_cast<double>(biased) / static_cast<double>(m.annotated_count);
  return m;
}

LoadedDataset parse_dataset(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of_offset(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("dataset JSON parse error at line " + std::to_string(line) + ": " + e.what(),
                     line);
  }
  reject_unknown_keys(root, {"manifest", "decisions"}, "dataset");
  const auto& manifest = require(root, "manifest", "dataset");
  reject_unknown_keys(manifest,
                      {"tag", "decision_count", "annotated_count", "biased_fraction", "schema_version"},
                      "manifest");
  const DatasetTag tag = parse_dataset_tag(require_string(manifest, "tag", "manifest"));
  if (manifest.contains("schema_version") && manifest["schema_version"] != std::string(kSchemaVersion)) {
    throw DataError("manifest: unsupported schema_version " + manifest["schema_version"].dump());
  }

  const auto& items = require(root, "decisions", "dataset");
  if (!items.is_array()) throw DataError("dataset: \"decisions\" must be an array");

  LoadedDataset out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Decision d = decision_from_json(items[i], i);
    if (d.id.empty()) throw DataError("decisions[" + std::to_string(i) + "]: empty id");
    if (!seen.insert(d.id).second) throw DataError("duplicate decision id \"" + d.id + "\"");
    auto violations = validate_decision(d, build_schema(d.dataset_tag));
    out.violations.insert(out.violations.end(), violations.begin(), violations.end());
    out.decisions.push_back(std::move(d));
  }
  out.manifest = compute_manifest(tag, out.decisions);
  return out;
}

LoadedDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string serialize_dataset(const std::vector<Decision>& decisions, DatasetTag tag) {
  const DatasetManifest m = compute_manifest(tag, decisions);
  json items = json::array();
  for (const auto& d : decisions) items.push_back(decision_to_json(d));
  json root = {{"manifest",
                {{"tag", std::string(to_string(m.tag))},
                 {"decision_count", m.decision_count},
                 {"annotated_count", m.annotated_count},
                 {"biased_fraction", m.biased_fraction},
                 {"schema_version", m.schema_version}}},
               {"decisions", std::move(items)}};
  return root.dump(2) + "\n";
}

void save_dataset(const std::vector<Decision>& decisions, DatasetTag tag,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  out << serialize_dataset(decisions, tag);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace biaslex
