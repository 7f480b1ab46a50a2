#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace biaslex {

enum class DatasetTag { DVC, PAC };

std::string_view to_string(DatasetTag tag);
DatasetTag parse_dataset_tag(std::string_view s);

// Who a biased statement is about.
enum class BiasTarget { vitima, reu, test, mae, mul, abs_mul, abs_reu, abs_cri, soc };

std::string_view to_string(BiasTarget target);
BiasTarget parse_bias_target(std::string_view s);

// Thematic group of a biased statement. The first and third groups exist in
// both corpora; the second and fourth differ between DVC and PAC.
enum class BiasCategory {
  relationship_dynamics,
  victim_or_woman_features,  // DVC
  mother_features,           // PAC
  aggressor_features,
  general_values,            // DVC
  general_child_values,      // PAC
};

std::string_view to_string(BiasCategory category);
BiasCategory parse_bias_category(std::string_view s);
bool category_valid_for(BiasCategory category, DatasetTag tag);

struct BiasSpan {
  std::string statement;
  std::set<BiasTarget> targets;
  BiasCategory category = BiasCategory::relationship_dynamics;

  friend bool operator==(const BiasSpan&, const BiasSpan&) = default;
};

struct Decision {
  std::string id;
  std::string raw_text;
  std::optional<std::string> clean_text;
  DatasetTag dataset_tag = DatasetTag::DVC;
  // Attribute name -> values. A single empty string is the explicit empty
  // value; "prej" marks an impaired analysis.
  std::map<std::string, std::vector<std::string>> attributes;
  std::vector<BiasSpan> bias_spans;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// The label is a function of the bias spans alone.
inline bool is_biased(const Decision& d) { return !d.bias_spans.empty(); }

// A decision counts as annotated when it carries any annotation field.
inline bool is_annotated(const Decision& d) {
  return !d.attributes.empty() || !d.bias_spans.empty();
}

inline constexpr std::string_view kEmptyValue = "";
inline constexpr std::string_view kPrejValue = "prej";

enum class AttributeKind { categorical, multi_categorical, numeric_range, free_text, identifier };

std::string_view to_string(AttributeKind kind);

struct NumericRange {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const NumericRange&, const NumericRange&) = default;
};

struct AttributeSchema {
  std::string name;
  AttributeKind kind = AttributeKind::free_text;
  // Categorical domain. For numeric attributes, textual labels accepted
  // alongside numbers. For identifiers, literal values accepted besides the
  // pattern.
  std::set<std::string> allowed_values;
  std::optional<NumericRange> range;
  // ECMAScript regex an identifier must fully match.
  std::string pattern;
  bool allows_empty = true;
  bool allows_prej = false;
  bool multi_valued = false;

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

// Complete attribute list of a corpus, in annotation-table order.
std::vector<AttributeSchema> build_schema(DatasetTag tag);

inline constexpr std::string_view kSchemaVersion = "1";

enum class ViolationRule {
  unknown_attribute,
  out_of_domain,
  out_of_range,
  malformed_number,
  pattern_mismatch,
  prej_not_allowed,
  too_many_values,
  bad_bias_category,
  empty_statement,
};

std::string_view to_string(ViolationRule rule);

struct Violation {
  std::string decision_id;
  std::string attribute;
  std::string value;
  ViolationRule rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string format_violation(const Violation& v);

// Never throws on bad data; every problem becomes a Violation.
std::vector<Violation> validate_decision(const Decision& d,
                                         const std::vector<AttributeSchema>& schema);

struct DatasetManifest {
  DatasetTag tag = DatasetTag::DVC;
  std::size_t decision_count = 0;
  std::size_t annotated_count = 0;
  double biased_fraction = 0.0;
  std::string schema_version{kSchemaVersion};

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

DatasetManifest compute_manifest(DatasetTag tag, const std::vector<Decision>& decisions);

struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<Decision> decisions;
  // Loading is lenient: schema problems are reported here, not thrown.
  std::vector<Violation> violations;
};

// Throws ParseError on malformed JSON (with line) and DataError on structural
// problems such as unknown keys or missing fields.
LoadedDataset load_dataset(const std::filesystem::path& path);
LoadedDataset parse_dataset(std::string_view json_text);

void save_dataset(const std::vector<Decision>& decisions, DatasetTag tag,
                  const std::filesystem::path& path);
std::string serialize_dataset(const std::vector<Decision>& decisions, DatasetTag tag);

}  // namespace biaslex
