#include "biaslex/tokenizer.hpp"

#include <algorithm>
#include <map>

#include "biaslex/augmentation.hpp"
#include "biaslex/error.hpp"
#include "biaslex/utf8.hpp"

namespace biaslex {

void TokenizerConfig::validate() const {
  if (max_tokens < 8) throw ConfigError("max_tokens must be at least 8");
  if (min_frequency < 1) throw ConfigError("min_frequency must be at least 1");
}

Vocabulary::Vocabulary()
    : words_{"[PAD]", "[UNK]", "[CLS]"}, index_{{"[PAD]", kPad}, {"[UNK]", kUnk}, {"[CLS]", kCls}} {}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  Vocabulary v;
  v.index_.clear();
  for (auto& w : words) {
    if (w == "[PAD]" || w == "[UNK]" || w == "[CLS]") continue;
    v.words_.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.index_.emplace(v.words_[i], static_cast<TokenId>(i)).second) {
      throw DataError("duplicate vocabulary entry \"" + v.words_[i] + "\"");
    }
  }
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts, const TokenizerConfig& cfg) {
  cfg.validate();
  std::map<std::string, std::size_t> freq;
  for (const auto& t : texts) {
    for (auto& piece : word_pieces(t, cfg)) ++freq[std::move(piece)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, n] : freq) {
    if (n >= cfg.min_frequency) kept.emplace_back(w, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [w, _] : kept) words.push_back(w);
  return from_words(std::move(words));
}

TokenId Vocabulary::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::string> word_pieces(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !space(text[j])) ++j;
    if (j > i) {
      const WordParts parts = split_word(text.substr(i, j - i));
      for (auto p : {parts.prefix, parts.core, parts.suffix}) {
        if (p.empty()) continue;
        out.push_back(cfg.case_preserving ? std::string(p) : utf8::to_lower(p));
      }
    }
    i = j;
  }
  return out;
}

std::vector<TokenId> tokenize(std::string_view text, const Vocabulary& vocab,
                              const TokenizerConfig& cfg) {
  std::vector<TokenId> ids{Vocabulary::kCls};
  for (const auto& piece : word_pieces(text, cfg)) {
    if (ids.size() >= cfg.max_tokens) break;
    ids.push_back(vocab.id(piece));
  }
  return ids;
}

Batch pad_batch(std::vector<std::vector<TokenId>> sequences) {
  Batch b;
  for (const auto& s : sequences) b.length = std::max(b.length, s.size());
  for (auto& s : sequences) s.resize(b.length, Vocabulary::kPad);
  b.ids = std::move(sequences);
  return b;
}

}  // namespace biaslex
