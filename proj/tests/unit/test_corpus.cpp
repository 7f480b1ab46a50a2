#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "biaslex/corpus.hpp"
#include "biaslex/error.hpp"
#include "test_support.hpp"

using namespace biaslex;
using biaslex::fixtures::Gen;

namespace {

Decision dvc(std::map<std::string, std::vector<std::string>> attrs) {
  Decision d;
  d.id = "d1";
  d.raw_text = "Texto.";
  d.dataset_tag = DatasetTag::DVC;
  d.attributes = std::move(attrs);
  return d;
}

const AttributeSchema& find(const std::vector<AttributeSchema>& s, const std::string& name) {
  for (const auto& a : s) {
    if (a.name == name) return a;
  }
  throw std::runtime_error("missing attribute " + name);
}

}  // namespace

TEST(Schema, MatchesGoldenDictionaries) {
  const auto golden = nlohmann::json::parse(fixtures::read_file(fixtures::test_data("schema_golden.json")));
  for (DatasetTag tag : {DatasetTag::DVC, DatasetTag::PAC}) {
    const auto schema = build_schema(tag);
    const auto& expected = golden.at(std::string(to_string(tag)));
    ASSERT_EQ(schema.size(), expected.size()) << to_string(tag);
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& e = expected[i];
      const auto& a = schema[i];
      SCOPED_TRACE(a.name);
      EXPECT_EQ(a.name, e.at("name").get<std::string>());
      EXPECT_EQ(std::string(to_string(a.kind)), e.at("kind").get<std::string>());
      const auto values = e.at("values").get<std::set<std::string>>();
      EXPECT_EQ(a.allowed_values, values);
      EXPECT_EQ(a.allows_prej, e.at("prej").get<bool>());
      EXPECT_TRUE(a.allows_empty);
      if (e.contains("range")) {
        ASSERT_TRUE(a.range.has_value());
        EXPECT_DOUBLE_EQ(a.range->lo, e["range"][0].get<double>());
        EXPECT_DOUBLE_EQ(a.range->hi, e["range"][1].get<double>());
      } else {
        EXPECT_FALSE(a.range.has_value());
      }
    }
  }
}

TEST(Schema, TableExamples) {
  const auto dvc_schema = build_schema(DatasetTag::DVC);
  const auto& pena = find(dvc_schema, "pena_original");
  ASSERT_TRUE(pena.range);
  EXPECT_EQ(pena.range->lo, 0.0);
  EXPECT_EQ(pena.range->hi, 23.5);
  EXPECT_EQ(find(dvc_schema, "apelante_genero").allowed_values,
            (std::set<std::string>{"masc", "fem", "masc_trans", "fem_trans"}));
  EXPECT_EQ(find(build_schema(DatasetTag::PAC), "colegialidade").allowed_values,
            (std::set<std::string>{"acordao", "decisao_monocratica"}));
}

TEST(Validate, FemaleVictimGenderIsValid) {
  EXPECT_TRUE(validate_decision(dvc({{"vitima_genero", {"fem"}}}), build_schema(DatasetTag::DVC)).empty());
}

TEST(Validate, OutOfRangePenaltyIsOneViolation) {
  const auto v = validate_decision(dvc({{"pena_original", {"24.0"}}}), build_schema(DatasetTag::DVC));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, ViolationRule::out_of_range);
  EXPECT_EQ(v[0].attribute, "pena_original");
  EXPECT_EQ(v[0].value, "24.0");
}

TEST(Validate, EmptyValueIsInDomain) {
  EXPECT_TRUE(validate_decision(dvc({{"apelante_genero", {""}}}), build_schema(DatasetTag::DVC)).empty());
}

TEST(Validate, RuleCoverage) {
  const auto schema = build_schema(DatasetTag::DVC);
  auto rule_of = [&](std::map<std::string, std::vector<std::string>> attrs) {
    const auto v = validate_decision(dvc(std::move(attrs)), schema);
    EXPECT_EQ(v.size(), 1u);
    return v.empty() ? ViolationRule::empty_statement : v[0].rule;
  };
  EXPECT_EQ(rule_of({{"nao_existe", {"x"}}}), ViolationRule::unknown_attribute);
  EXPECT_EQ(rule_of({{"resultado", {"talvez"}}}), ViolationRule::out_of_domain);
  EXPECT_EQ(rule_of({{"pena_original", {"doze"}}}), ViolationRule::malformed_number);
  EXPECT_EQ(rule_of({{"pena_original", {"12abc"}}}), ViolationRule::malformed_number);
  EXPECT_EQ(rule_of({{"resultado", {"prej"}}}), ViolationRule::prej_not_allowed);
  EXPECT_EQ(rule_of({{"resultado", {"s", "n"}}}), ViolationRule::too_many_values);
  EXPECT_EQ(rule_of({{"apelante", {"12"}}}), ViolationRule::pattern_mismatch);
  EXPECT_TRUE(validate_decision(dvc({{"apelante", {"mpsp", "J.S."}}}), schema).empty());
  EXPECT_TRUE(validate_decision(dvc({{"pena_atual", {"prej"}}}), schema).empty());
  EXPECT_TRUE(validate_decision(dvc({{"pena_atual", {"sursis"}}}), schema).empty());
  EXPECT_TRUE(validate_decision(dvc({{"pena_original", {"0"}}, {"pena_atual", {"15.17"}}}), schema).empty());
}

TEST(Validate, PacIdentifierPatterns) {
  Decision d = dvc({{"processo", {"0001234-56.2015.8.26.0100"}}, {"data_julgamento", {"2016-03-01"}}});
  d.dataset_tag = DatasetTag::PAC;
  const auto schema = build_schema(DatasetTag::PAC);
  EXPECT_TRUE(validate_decision(d, schema).empty());
  d.attributes["processo"] = {"0001234-56.2015.8.25.0100"};
  const auto v = validate_decision(d, schema);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, ViolationRule::pattern_mismatch);
}

TEST(Validate, BiasSpanChecks) {
  Decision d = dvc({});
  d.bias_spans.push_back({"", {BiasTarget::vitima}, BiasCategory::relationship_dynamics});
  d.bias_spans.push_back({"frase", {BiasTarget::mae}, BiasCategory::mother_features});
  const auto v = validate_decision(d, build_schema(DatasetTag::DVC));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].rule, ViolationRule::empty_statement);
  EXPECT_EQ(v[1].rule, ViolationRule::bad_bias_category);
}

TEST(Dataset, EmptyListGivesZeroManifest) {
  const auto m = compute_manifest(DatasetTag::PAC, {});
  EXPECT_EQ(m.decision_count, 0u);
  EXPECT_EQ(m.annotated_count, 0u);
  EXPECT_EQ(m.biased_fraction, 0.0);
}

TEST(Dataset, BiasedFractionOverAnnotated) {
  std::vector<Decision> ds;
  for (int i = 0; i < 160; ++i) {
    Decision d = dvc({{"resultado", {"s"}}});
    d.id = "dvc-" + std::to_string(i);
    if (i < 29) d.bias_spans.push_back({"frase " + std::to_string(i), {BiasTarget::vitima},
                                        BiasCategory::victim_or_woman_features});
    ds.push_back(d);
  }
  // Unannotated decisions do not count.
  for (int i = 0; i < 40; ++i) {
    Decision d;
    d.id = "raw-" + std::to_string(i);
    d.raw_text = "x";
    ds.push_back(d);
  }
  const auto m = compute_manifest(DatasetTag::DVC, ds);
  EXPECT_EQ(m.decision_count, 200u);
  EXPECT_EQ(m.annotated_count, 160u);
  std::size_t biased = 0;
  for (const auto& d : ds) biased += is_biased(d) ? 1 : 0;
  EXPECT_DOUBLE_EQ(m.biased_fraction, static_cast<double>(biased) / 160.0);
  EXPECT_NEAR(m.biased_fraction, 0.18, 0.005);
}

TEST(Dataset, SaveLoadPac49) {
  std::vector<Decision> ds;
  for (int i = 0; i < 49; ++i) {
    Decision d;
    d.id = "pac-" + std::to_string(i);
    d.raw_text = "Decisão " + std::to_string(i) + ".";
    d.dataset_tag = DatasetTag::PAC;
    d.attributes["colegialidade"] = {"acordao"};
    ds.push_back(d);
  }
  const auto dir = fixtures::scratch_dir("pac49");
  save_dataset(ds, DatasetTag::PAC, dir / "pac.json");
  const auto loaded = load_dataset(dir / "pac.json");
  EXPECT_EQ(loaded.manifest.decision_count, 49u);
  EXPECT_EQ(loaded.decisions, ds);
  EXPECT_TRUE(loaded.violations.empty());
}

TEST(Dataset, RoundTripProperty) {
  Gen g(7);
  const std::vector<std::string> dvc_attrs = {"resultado", "crime", "pena_original", "vies", "mp_pj"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Decision> ds;
    const auto n = g.size(0, 8);
    for (std::size_t i = 0; i < n; ++i) {
      Decision d;
      d.id = "t" + std::to_string(trial) + "-" + std::to_string(i);
      d.raw_text = g.raw_document();
      if (g.coin()) d.clean_text = g.sentence();
      if (g.coin(0.6)) {
        const auto k = g.size(1, 3);
        for (std::size_t j = 0; j < k; ++j) {
          std::vector<std::string> values;
          const auto m = g.size(1, 3);
          for (std::size_t v = 0; v < m; ++v) values.push_back(g.word());
          d.attributes[g.pick(dvc_attrs)] = values;
        }
      }
      if (g.coin(0.3)) {
        d.bias_spans.push_back({g.sentence(), {BiasTarget::vitima, BiasTarget::soc},
                                BiasCategory::general_values});
      }
      ds.push_back(std::move(d));
    }
    const auto text = serialize_dataset(ds, DatasetTag::DVC);
    const auto loaded = parse_dataset(text);
    ASSERT_EQ(loaded.decisions, ds);
    EXPECT_EQ(loaded.manifest, compute_manifest(DatasetTag::DVC, ds));
    EXPECT_EQ(serialize_dataset(loaded.decisions, DatasetTag::DVC), text);
  }
}

TEST(Dataset, MalformedJsonReportsLine) {
  const std::string text = "{\n  \"manifest\": {\"tag\": \"DVC\"},\n  \"decisions\": [\n    {oops}\n  ]\n}\n";
  try {
    parse_dataset(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(Dataset, StructuralErrors) {
  EXPECT_THROW(parse_dataset(R"({"manifest": {"tag": "DVC"}, "decisions": [], "extra": 1})"), DataError);
  EXPECT_THROW(parse_dataset(R"({"manifest": {"tag": "XYZ"}, "decisions": []})"), DataError);
  const std::string dup = R"({"manifest": {"tag": "DVC"}, "decisions": [
    {"id": "a", "raw_text": "", "clean_text": null, "dataset_tag": "DVC", "attributes": {}, "bias_spans": []},
    {"id": "a", "raw_text": "", "clean_text": null, "dataset_tag": "DVC", "attributes": {}, "bias_spans": []}]})";
  EXPECT_THROW(parse_dataset(dup), DataError);
}

TEST(Dataset, ViolationsAttachedOnLoad) {
  const std::string text = R"({"manifest": {"tag": "DVC"}, "decisions": [
    {"id": "a", "raw_text": "x", "clean_text": null, "dataset_tag": "DVC",
     "attributes": {"pena_original": "24.0"}, "bias_spans": []}]})";
  const auto loaded = parse_dataset(text);
  ASSERT_EQ(loaded.violations.size(), 1u);
  EXPECT_EQ(format_violation(loaded.violations[0]), "a\tpena_original\t\"24.0\"\tout_of_range");
}

TEST(Dataset, SyntheticFixtureLoads) {
  const auto loaded = load_dataset(fixtures::test_data("synthetic_decisions.json"));
  EXPECT_EQ(loaded.decisions.size(), 30u);
  EXPECT_TRUE(loaded.violations.empty());
}
