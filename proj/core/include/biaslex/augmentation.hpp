#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "biaslex/text_prep.hpp"

namespace biaslex {

// Lowercase word -> single-word synonyms, in file order.
class SynonymDictionary {
 public:
  SynonymDictionary() = default;
  explicit SynonymDictionary(std::string name) : name_(std::move(name)) {}

  // Normalizes the key to lowercase and filters the list: synonyms equal to
  // the key and multiword synonyms are dropped with a warning. An entry left
  // empty is not inserted. Returns whether the entry was kept.
  bool add(std::string_view word, const std::vector<std::string>& synonyms);

  const std::vector<std::string>* find(std::string_view lower_word) const;
  bool contains(std::string_view lower_word) const { return find(lower_word) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& name() const { return name_; }
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::string name_;
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Dictionary file: JSON object word -> array of synonyms.
SynonymDictionary parse_dictionary(std::string_view json_text, std::string name);
SynonymDictionary load_dictionary(const std::filesystem::path& path);

// Stopword file: one word per line; '#' comments and blanks skipped.
std::set<std::string, std::less<>> parse_stopwords(std::string_view text);
std::set<std::string, std::less<>> load_stopwords(const std::filesystem::path& path);

enum class TextLabel { biased, non_biased };

struct AugmentationConfig {
  double weight = 0.0;  // per-word replacement probability
  SynonymDictionary bias_dict{"bias"};
  SynonymDictionary general_dict{"general"};
  std::set<std::string, std::less<>> stopwords;
  std::uint64_t seed = 20240601;
  // Copies of each biased training item per epoch; fractional parts are
  // spread deterministically. 1.0 disables oversampling.
  double oversample_biased = 1.0;

  void validate() const;
};

// Splits a whitespace token into leading punctuation, core word and trailing
// punctuation.
struct WordParts {
  std::string_view prefix;
  std::string_view core;
  std::string_view suffix;
};
WordParts split_word(std::string_view token);

// Per-word synonym replacement driven by the (seed, stream) random stream.
// Each non-stopword word consumes one Bernoulli(weight) draw; a replacement
// consumes one more draw to pick among the candidates. Biased text prefers the
// bias dictionary and falls back to the general one; non-biased text only uses
// the general dictionary. Words containing digits or internal punctuation are
// never replaced. Everything outside replaced words, whitespace included, is
// copied unchanged.
std::string augment(std::string_view text, TextLabel label, const AugmentationConfig& cfg,
                    std::uint64_t stream);

// Fraction of non-stopword positions whose word differs. Throws DataError when
// the two texts have different word counts.
double replacement_rate(std::string_view original, std::string_view augmented,
                        const std::set<std::string, std::less<>>& stopwords);

struct BiasWordScore {
  std::string word;
  double log_odds = 0.0;
  std::size_t biased_count = 0;
  std::size_t non_biased_count = 0;
};

// Ranks words by log((biased+1)/(non_biased+1)) over token counts and keeps
// the top `k`. Empty (with a warning) when no chunk is biased.
std::vector<BiasWordScore> build_bias_dict(const std::vector<Chunk>& chunks, std::size_t k = 200,
                                           const std::set<std::string, std::less<>>& stopwords = {});

// Curation template: JSON object word -> [] in rank order.
std::string bias_dict_template_json(const std::vector<BiasWordScore>& ranked);

}  // namespace biaslex
