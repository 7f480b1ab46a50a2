#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace biaslex {

using TokenId = std::int32_t;

struct TokenizerConfig {
  std::size_t max_tokens = 512;
  std::size_t min_frequency = 2;
  bool case_preserving = true;

  void validate() const;
  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

// Word-level vocabulary. Ids 0..2 are the special tokens.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;

  Vocabulary();
  // Builds from training texts only: words seen at least min_frequency times,
  // ordered by descending frequency then bytewise.
  static Vocabulary build(const std::vector<std::string>& texts, const TokenizerConfig& cfg);
  static Vocabulary from_words(std::vector<std::string> words);

  TokenId id(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

// Whitespace tokens with leading/trailing punctuation split off as separate
// pieces; lowercased unless the config is case preserving.
std::vector<std::string> word_pieces(std::string_view text, const TokenizerConfig& cfg);

// [CLS] followed by word ids (UNK when unknown), right-truncated to max_tokens.
std::vector<TokenId> tokenize(std::string_view text, const Vocabulary& vocab,
                              const TokenizerConfig& cfg);

// Right-padded rectangular batch.
struct Batch {
  std::vector<std::vector<TokenId>> ids;
  std::size_t length = 0;
};

Batch pad_batch(std::vector<std::vector<TokenId>> sequences);

}  // namespace biaslex
