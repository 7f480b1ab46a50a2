#pragma once

#include <string>
#include <string_view>
#include <vector>

// Byte-level UTF-8 helpers. Case mapping covers ASCII and the Latin-1
// supplement, which is what Portuguese text needs.
namespace biaslex::utf8 {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

// Splits into code points, each returned as its byte sequence. Invalid bytes
// are returned one at a time.
std::vector<std::string_view> code_points(std::string_view s);

bool is_letter(std::string_view code_point);
bool is_upper(std::string_view code_point);
bool is_lower(std::string_view code_point);

// ASCII whitespace plus U+00A0 (no-break space).
bool is_space(std::string_view code_point);

// True when every code point is a letter.
bool all_letters(std::string_view s);

enum class CasePattern { lower, initial_upper, all_upper, mixed };
CasePattern case_pattern(std::string_view word);

// Re-cases `word` (assumed lowercase) to follow `pattern`. `lower` and
// `mixed` leave the word untouched.
std::string apply_case(std::string_view word, CasePattern pattern);

}  // namespace biaslex::utf8
