#include "biaslex/utf8.hpp"

namespace biaslex::utf8 {
namespace {

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

bool is_continuation(unsigned char c) { return (c & 0xc0) == 0x80; }

// Latin-1 supplement letters are encoded as C3 80..C3 BF. Uppercase occupies
// 80..9E except 97 (multiplication sign); lowercase 9F..BF except B7 (division).
bool latin1_upper(std::string_view cp) {
  if (cp.size() != 2 || static_cast<unsigned char>(cp[0]) != 0xc3) return false;
  const auto b = static_cast<unsigned char>(cp[1]);
  return b >= 0x80 && b <= 0x9e && b != 0x97;
}

bool latin1_lower(std::string_view cp) {
  if (cp.size() != 2 || static_cast<unsigned char>(cp[0]) != 0xc3) return false;
  const auto b = static_cast<unsigned char>(cp[1]);
  return b >= 0x9f && b <= 0xbf && b != 0xb7;
}

}  // namespace

std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = sequence_length(static_cast<unsigned char>(s[i]));
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if (!is_continuation(static_cast<unsigned char>(s[i + k]))) {
        len = 1;
        break;
      }
    }
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

bool is_upper(std::string_view cp) {
  if (cp.size() == 1) return cp[0] >= 'A' && cp[0] <= 'Z';
  return latin1_upper(cp);
}

bool is_lower(std::string_view cp) {
  if (cp.size() == 1) return cp[0] >= 'a' && cp[0] <= 'z';
  return latin1_lower(cp);
}

bool is_letter(std::string_view cp) {
  if (cp.size() == 1) return is_upper(cp) || is_lower(cp);
  // Any other multi-byte sequence outside Latin-1 punctuation is treated as
  // a letter (Latin Extended, Greek, ...). C2 xx is Latin-1 punctuation.
  if (cp.size() >= 2 && static_cast<unsigned char>(cp[0]) == 0xc2) return false;
  if (cp.size() == 2 && static_cast<unsigned char>(cp[0]) == 0xc3) {
    return latin1_upper(cp) || latin1_lower(cp);
  }
  // General punctuation (E2 80..E2 81) and symbols are not letters.
  if (cp.size() == 3 && static_cast<unsigned char>(cp[0]) == 0xe2) return false;
  return cp.size() >= 2;
}

bool is_space(std::string_view cp) {
  if (cp.size() == 1) {
    const char c = cp[0];
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }
  return cp == "\xc2\xa0";
}

bool all_letters(std::string_view s) {
  if (s.empty()) return false;
  for (auto cp : code_points(s)) {
    if (!is_letter(cp)) return false;
  }
  return true;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (auto cp : code_points(s)) {
    if (cp.size() == 1 && is_upper(cp)) {
      out.push_back(static_cast<char>(cp[0] + ('a' - 'A')));
    } else if (latin1_upper(cp)) {
      out.push_back(cp[0]);
      out.push_back(static_cast<char>(cp[1] + 0x20));
    } else {
      out.append(cp);
    }
  }
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (auto cp : code_points(s)) {
    // U+00DF (sharp s) and U+00FF have no single-code-point uppercase here.
    const bool latin = latin1_lower(cp) && static_cast<unsigned char>(cp[1]) != 0x9f &&
                       static_cast<unsigned char>(cp[1]) != 0xbf;
    if (cp.size() == 1 && is_lower(cp)) {
      out.push_back(static_cast<char>(cp[0] - ('a' - 'A')));
    } else if (latin) {
      out.push_back(cp[0]);
      out.push_back(static_cast<char>(cp[1] - 0x20));
    } else {
      out.append(cp);
    }
  }
  return out;
}

CasePattern case_pattern(std::string_view word) {
  const auto cps = code_points(word);
  std::size_t upper = 0;
  std::size_t letters = 0;
  for (auto cp : cps) {
    if (!is_letter(cp)) continue;
    ++letters;
    if (is_upper(cp)) ++upper;
  }
  if (upper == 0) return CasePattern::lower;
  if (upper == letters && letters > 1) return CasePattern::all_upper;
  if (upper == 1 && !cps.empty() && is_upper(cps.front())) return CasePattern::initial_upper;
  if (upper == letters) return CasePattern::initial_upper;  // single-letter word
  return CasePattern::mixed;
}

std::string apply_case(std::string_view word, CasePattern pattern) {
  switch (pattern) {
    case CasePattern::all_upper:
      return to_upper(word);
    case CasePattern::initial_upper: {
      const auto cps = code_points(word);
      if (cps.empty()) return std::string(word);
      std::string out = to_upper(cps.front());
      out.append(word.substr(cps.front().size()));
      return out;
    }
    case CasePattern::lower:
    case CasePattern::mixed:
      break;
  }
  return std::string(word);
}

}  // namespace biaslex::utf8
