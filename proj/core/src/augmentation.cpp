#include "biaslex/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>

#include "biaslex/error.hpp"
#include "biaslex/log.hpp"
#include "biaslex/rng.hpp"
#include "biaslex/utf8.hpp"

namespace biaslex {
namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(std::string_view cp) { return cp.size() == 1 && cp[0] >= '0' && cp[0] <= '9'; }

bool is_word_char(std::string_view cp) { return utf8::is_letter(cp) || is_digit(cp); }

struct Token {
  std::size_t begin;
  std::size_t end;
};

std::vector<Token> tokens_of(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_ascii_space(c); });
}

}  // namespace

bool SynonymDictionary::add(std::string_view word, const std::vector<std::string>& synonyms) {
  const std::string key = utf8::to_lower(word);
  if (key.empty() || has_space(key)) {
    warn("dictionary " + name_ + ": skipping multiword key \"" + std::string(word) + "\"");
    return false;
  }
  std::vector<std::string> kept;
  for (const auto& s : synonyms) {
    const std::string syn = utf8::to_lower(s);
    if (syn.empty() || has_space(syn)) {
      warn("dictionary " + name_ + ": dropping multiword synonym \"" + s + "\" of \"" + key + "\"");
      continue;
    }
    if (syn == key) continue;
    if (std::find(kept.begin(), kept.end(), syn) == kept.end()) kept.push_back(syn);
  }
  if (kept.empty()) return false;
  auto& slot = entries_[key];
  for (auto& s : kept) {
    if (std::find(slot.begin(), slot.end(), s) == slot.end()) slot.push_back(std::move(s));
  }
  return true;
}

const std::vector<std::string>* SynonymDictionary::find(std::string_view lower_word) const {
  const auto it = entries_.find(lower_word);
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymDictionary parse_dictionary(std::string_view json_text, std::string name) {
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("dictionary " + name + ": " + e.what(), 0);
  }
  if (!root.is_object()) throw DataError("dictionary " + name + " must be a JSON object");
  SynonymDictionary dict(name);
  for (const auto& [word, value] : root.items()) {
    if (!value.is_array()) {
      throw DataError("dictionary " + name + ": entry \"" + word + "\" must be an array");
    }
    std::vector<std::string> syns;
    for (const auto& s : value) {
      if (!s.is_string()) throw DataError("dictionary " + name + ": non-string synonym for \"" + word + "\"");
      syns.push_back(s.get<std::string>());
    }
    dict.add(word, syns);
  }
  return dict;
}

SynonymDictionary load_dictionary(const std::filesystem::path& path) {
  return parse_dictionary(read_file(path, "dictionary"), path.stem().string());
}

std::set<std::string, std::less<>> parse_stopwords(std::string_view text) {
  std::set<std::string, std::less<>> out;
  for (const auto& line : parse_pattern_file(text)) {
    std::string_view w = line;
    while (!w.empty() && is_ascii_space(w.back())) w.remove_suffix(1);
    while (!w.empty() && is_ascii_space(w.front())) w.remove_prefix(1);
    if (!w.empty()) out.insert(utf8::to_lower(w));
  }
  return out;
}

std::set<std::string, std::less<>> load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(read_file(path, "stopword file"));
}

void AugmentationConfig::validate() const {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("augmentation weight must be in [0, 1]");
  if (weight > 0.0 && stopwords.empty()) {
    throw ConfigError("a stopword list is required when augmentation weight is positive");
  }
  if (!(oversample_biased >= 1.0) || !std::isfinite(oversample_biased)) {
    throw ConfigError("oversample_biased must be a finite factor >= 1");
  }
}

WordParts split_word(std::string_view token) {
  const auto cps = utf8::code_points(token);
  std::size_t lead = 0;
  while (lead < cps.size() && !is_word_char(cps[lead])) ++lead;
  std::size_t trail = cps.size();
  while (trail > lead && !is_word_char(cps[trail - 1])) --trail;
  std::size_t prefix_len = 0;
  for (std::size_t k = 0; k < lead; ++k) prefix_len += cps[k].size();
  std::size_t core_len = 0;
  for (std::size_t k = lead; k < trail; ++k) core_len += cps[k].size();
  return {token.substr(0, prefix_len), token.substr(prefix_len, core_len),
          token.substr(prefix_len + core_len)};
}

std::string augment(std::string_view text, TextLabel label, const AugmentationConfig& cfg,
                    std::uint64_t stream) {
  SeededStream rng(cfg.seed, stream);
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  std::size_t copied = 0;
  for (const Token& tok : tokens_of(text)) {
    const std::string_view token = text.substr(tok.begin, tok.end - tok.begin);
    const WordParts parts = split_word(token);
    if (parts.core.empty()) continue;
    const std::string key = utf8::to_lower(parts.core);
    if (cfg.stopwords.contains(key)) continue;
    if (!rng.bernoulli(cfg.weight)) continue;
    if (!utf8::all_letters(parts.core)) continue;

    const std::vector<std::string>* candidates = nullptr;
    if (label == TextLabel::biased) candidates = cfg.bias_dict.find(key);
    if (candidates == nullptr) candidates = cfg.general_dict.find(key);
    if (candidates == nullptr) continue;

    const std::string& synonym = (*candidates)[rng.below(candidates->size())];
    out.append(text.substr(copied, tok.begin - copied));
    out.append(parts.prefix);
    out.append(utf8::apply_case(synonym, utf8::case_pattern(parts.core)));
    out.append(parts.suffix);
    copied = tok.end;
  }
  out.append(text.substr(copied));
  return out;
}

double replacement_rate(std::string_view original, std::string_view augmented,
                        const std::set<std::string, std::less<>>& stopwords) {
  const auto a = tokens_of(original);
  const auto b = tokens_of(augmented);
  if (a.size() != b.size()) {
    throw DataError("replacement_rate: word counts differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  std::size_t eligible = 0;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto wa = original.substr(a[i].begin, a[i].end - a[i].begin);
    const auto wb = augmented.substr(b[i].begin, b[i].end - b[i].begin);
    const auto core = split_word(wa).core;
    if (core.empty() || stopwords.contains(utf8::to_lower(core))) continue;
    ++eligible;
    if (wa != wb) ++changed;
  }
  return eligible == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(eligible);
}

std::vector<BiasWordScore> build_bias_dict(const std::vector<Chunk>& chunks, std::size_t k,
                                           const std::set<std::string, std::less<>>& stopwords) {
  const bool any_biased = std::any_of(chunks.begin(), chunks.end(),
                                      [](const Chunk& c) { return c.label == ChunkLabel::biased; });
  if (!any_biased) {
    warn("build_bias_dict: no biased chunks; the template is empty");
    return {};
  }
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& c : chunks) {
    if (c.label == ChunkLabel::unlabeled) continue;
    for (const Token& tok : tokens_of(c.text)) {
      const auto core = split_word(std::string_view(c.text).substr(tok.begin, tok.end - tok.begin)).core;
      if (!utf8::all_letters(core)) continue;
      std::string key = utf8::to_lower(core);
      if (stopwords.contains(key)) continue;
      auto& slot = counts[std::move(key)];
      if (c.label == ChunkLabel::biased) {
        ++slot.first;
      } else {
        ++slot.second;
      }
    }
  }
  std::vector<BiasWordScore> ranked;
  ranked.reserve(counts.size());
  for (const auto& [word, n] : counts) {
    ranked.push_back({word,
                      std::log(static_cast<double>(n.first + 1) / static_cast<double>(n.second + 1)),
                      n.first, n.second});
  }
  std::sort(ranked.begin(), ranked.end(), [](const BiasWordScore& x, const BiasWordScore& y) {
    if (x.log_odds != y.log_odds) return x.log_odds > y.log_odds;
    return x.word < y.word;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::string bias_dict_template_json(const std::vector<BiasWordScore>& ranked) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& r : ranked) j[r.word] = nlohmann::ordered_json::array();
  return j.dump(2) + "\n";
}

}  // namespace biaslex
