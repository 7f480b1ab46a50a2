#include <gtest/gtest.h>

#include "biaslex/utf8.hpp"

using namespace biaslex;

TEST(Utf8, CaseMappingCoversLatin1) {
  EXPECT_EQ(utf8::to_lower("AÇÃO Época"), "ação época");
  EXPECT_EQ(utf8::to_upper("ação época"), "AÇÃO ÉPOCA");
  EXPECT_EQ(utf8::to_lower("123-ABC"), "123-abc");
}

TEST(Utf8, CodePointsSplitMultibyte) {
  const auto cps = utf8::code_points("aé—");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], "é");
  EXPECT_EQ(cps[2], "—");
}

TEST(Utf8, LetterClassification) {
  EXPECT_TRUE(utf8::all_letters("coração"));
  EXPECT_FALSE(utf8::all_letters("art129"));
  EXPECT_FALSE(utf8::all_letters("guarda-chuva"));
  EXPECT_FALSE(utf8::is_letter("—"));
  EXPECT_TRUE(utf8::is_space("\xC2\xA0"));
}

TEST(Utf8, CasePatternRoundTrip) {
  EXPECT_EQ(utf8::case_pattern("mulher"), utf8::CasePattern::lower);
  EXPECT_EQ(utf8::case_pattern("Mulher"), utf8::CasePattern::initial_upper);
  EXPECT_EQ(utf8::case_pattern("MULHER"), utf8::CasePattern::all_upper);
  EXPECT_EQ(utf8::case_pattern("mUlher"), utf8::CasePattern::mixed);
  EXPECT_EQ(utf8::apply_case("época", utf8::CasePattern::initial_upper), "Época");
  EXPECT_EQ(utf8::apply_case("época", utf8::CasePattern::all_upper), "ÉPOCA");
  EXPECT_EQ(utf8::apply_case("época", utf8::CasePattern::mixed), "época");
}
