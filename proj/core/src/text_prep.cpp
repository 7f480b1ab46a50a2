#include "biaslex/text_prep.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "biaslex/error.hpp"
#include "biaslex/utf8.hpp"

namespace biaslex {
namespace {

bool is_terminator(char c) { return c == '.' || c == ';' || c == '!' || c == '?'; }

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

Terminator terminator_of(char c) {
  switch (c) {
    case '.': return Terminator::period;
    case ';': return Terminator::semicolon;
    case '!': return Terminator::exclamation;
    case '?': return Terminator::question;
    default: return Terminator::end_of_text;
  }
}

std::vector<std::regex> compile(const std::vector<std::string>& patterns) {
  std::vector<std::regex> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    try {
      out.emplace_back(p, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid cleaning pattern \"" + p + "\": " + e.what());
    }
  }
  return out;
}

bool any_match(const std::string& line, const std::vector<std::regex>& res) {
  return std::any_of(res.begin(), res.end(),
                     [&](const std::regex& re) { return std::regex_search(line, re); });
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (auto cp : utf8::code_points(s)) {
    if (utf8::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(cp);
  }
  return out;
}

struct CompiledCleaner {
  const CleaningConfig& cfg;
  std::vector<std::regex> headers;
  std::vector<std::regex> signatures;

  explicit CompiledCleaner(const CleaningConfig& c)
      : cfg(c),
        headers(c.strip_headers ? compile(c.header_patterns) : std::vector<std::regex>{}),
        signatures(c.strip_signatures ? compile(c.signature_patterns) : std::vector<std::regex>{}) {}

  std::string strip_chars(std::string_view line) const {
    if (!cfg.strip_special_chars || cfg.removable_chars.empty()) return std::string(line);
    std::string out;
    out.reserve(line.size());
    for (auto cp : utf8::code_points(line)) {
      if (!cfg.removable_chars.contains(std::string(cp))) out.append(cp);
    }
    return out;
  }

  std::string pass(std::string_view raw) const {
    std::string joined;
    std::size_t start = 0;
    while (start <= raw.size()) {
      std::size_t end = raw.find('\n', start);
      if (end == std::string_view::npos) end = raw.size();
      std::string line = strip_chars(raw.substr(start, end - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const bool drop = any_match(line, headers) || any_match(line, signatures);
      if (!drop) {
        joined.append(line);
        joined.push_back(' ');
      }
      start = end + 1;
    }
    return collapse_whitespace(joined);
  }
};

}  // namespace

std::vector<std::string> default_header_patterns() {
  return {
      R"(^\s*TRIBUNAL DE JUSTIÇA)",
      R"(^\s*PODER JUDICIÁRIO)",
      R"(^\s*ESTADO DE SÃO PAULO\s*$)",
      R"(^\s*Registro: \d{4}\.\d+)",
      R"(^\s*(VOTO|Voto) [Nn]º? ?[\d.]+\s*$)",
      R"(^\s*São Paulo, \d{1,2} de [a-zç]+ de \d{4}\.?\s*$)",
  };
}

std::vector<std::string> default_signature_patterns() {
  return {
      R"([Ee]ste documento é cópia do original)",
      R"([Aa]ssinado digitalmente)",
      R"([Pp]ara conferir o original)",
      R"(^\s*Relator\(a\):?\s*$)",
  };
}

std::set<std::string> default_removable_chars() {
  return {"*",  "#",  "_",  "|",  "~",  "^",  "`",  "\"", "\xe2\x80\x9c", "\xe2\x80\x9d",
          "\xc2\xab", "\xc2\xbb", "\xe2\x80\xa2", "\xe2\x97\x8f", "\xe2\x96\xa0",
          "\xe2\x96\xa1", "\xe2\x96\xaa", "\xc2\xad"};
}

CleaningConfig CleaningConfig::defaults() {
  CleaningConfig c;
  c.header_patterns = default_header_patterns();
  c.signature_patterns = default_signature_patterns();
  c.removable_chars = default_removable_chars();
  return c;
}

void CleaningConfig::validate() const {
  if (strip_headers && header_patterns.empty()) {
    throw ConfigError("strip_headers is on but no header patterns are configured");
  }
  if (strip_signatures && signature_patterns.empty()) {
    throw ConfigError("strip_signatures is on but no signature patterns are configured");
  }
  if (strip_special_chars && removable_chars.empty()) {
    throw ConfigError("strip_special_chars is on but no removable characters are configured");
  }
  for (const auto& c : removable_chars) {
    if (c == "." || c == ";" || c == "!" || c == "?") {
      throw ConfigError("sentence terminators cannot be removable characters");
    }
  }
}

std::vector<std::string> parse_pattern_file(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> load_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pattern file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern_file(buf.str());
}

std::string clean(std::string_view raw, const CleaningConfig& cfg) {
  const CompiledCleaner cleaner(cfg);
  std::string current = cleaner.pass(raw);
  // Joining lines can create a new match, so run to a fixpoint. Each pass
  // only removes content, hence this terminates.
  for (;;) {
    std::string next = cleaner.pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::string_view to_string(Terminator t) {
  switch (t) {
    case Terminator::period: return "period";
    case Terminator::semicolon: return "semicolon";
    case Terminator::exclamation: return "exclamation";
    case Terminator::question: return "question";
    case Terminator::end_of_text: return "end_of_text";
  }
  return "?";
}

std::vector<std::string> SegmentConfig::default_abbreviations() {
  return {"Art.", "art.", "fls.", "Dr.", "Dra.", "Min.", "n.", "p."};
}

std::vector<Sentence> segment(std::string_view text, const SegmentConfig& cfg) {
  std::vector<Sentence> out;
  const std::size_t n = text.size();
  auto skip_space = [&](std::size_t i) {
    while (i < n && is_ascii_space(text[i])) ++i;
    return i;
  };
  auto emit = [&](std::size_t from, std::size_t to_inclusive, Terminator t) {
    std::size_t end = to_inclusive + 1;
    while (end > from && is_ascii_space(text[end - 1])) --end;
    if (end == from) return;
    out.push_back({std::string(text.substr(from, end - from)), out.size(), t, from});
  };

  std::size_t start = skip_space(0);
  for (std::size_t i = start; i < n; ++i) {
    if (!is_terminator(text[i])) continue;
    std::size_t j = i;
    while (j + 1 < n && is_terminator(text[j + 1])) ++j;
    const bool boundary = j + 1 == n || is_ascii_space(text[j + 1]);
    if (!boundary) {
      i = j;
      continue;
    }
    if (cfg.abbreviation_guard && j + 1 < n && i == j && text[j] == '.') {
      std::size_t w = j;
      while (w > start && !is_ascii_space(text[w - 1])) --w;
      const std::string_view word = text.substr(w, j + 1 - w);
      if (std::find(cfg.abbreviations.begin(), cfg.abbreviations.end(), word) !=
          cfg.abbreviations.end()) {
        i = j;
        continue;
      }
    }
    emit(start, j, terminator_of(text[j]));
    start = skip_space(j + 1);
    i = start == 0 ? 0 : start - 1;
  }
  if (start < n) emit(start, n - 1, Terminator::end_of_text);
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_ascii_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string_view to_string(ChunkLabel label) {
  switch (label) {
    case ChunkLabel::biased: return "biased";
    case ChunkLabel::non_biased: return "non_biased";
    case ChunkLabel::unlabeled: return "unlabeled";
  }
  return "?";
}

ChunkLabel parse_chunk_label(std::string_view s) {
  if (s == "biased") return ChunkLabel::biased;
  if (s == "non_biased") return ChunkLabel::non_biased;
  if (s == "unlabeled") return ChunkLabel::unlabeled;
  throw DataError("unknown chunk label \"" + std::string(s) + "\"");
}

std::string_view to_string(ChunkProvenance p) {
  return p == ChunkProvenance::anchored_on_bias_span ? "anchored_on_bias_span" : "window_sample";
}

ChunkProvenance parse_chunk_provenance(std::string_view s) {
  if (s == "anchored_on_bias_span") return ChunkProvenance::anchored_on_bias_span;
  if (s == "window_sample") return ChunkProvenance::window_sample;
  throw DataError("unknown chunk provenance \"" + std::string(s) + "\"");
}

namespace {

Chunk make_chunk(const std::vector<Sentence>& sentences, std::size_t first, std::size_t last,
                 std::string_view decision_id, ChunkLabel label, ChunkProvenance provenance) {
  Chunk c;
  c.decision_id = std::string(decision_id);
  c.first = first;
  c.last = last;
  for (std::size_t k = first; k <= last; ++k) {
    if (k > first) c.text.push_back(' ');
    c.text += sentences[k].text;
  }
  c.word_count = word_count(c.text);
  c.label = label;
  c.provenance = provenance;
  return c;
}

}  // namespace

std::vector<Chunk> extract_chunks(const std::vector<Sentence>& sentences, std::size_t window,
                                  std::size_t word_budget, std::string_view decision_id,
                                  ChunkLabel label) {
  if (window == 0) throw ConfigError("chunk window must be at least 1 sentence");
  if (word_budget == 0) throw ConfigError("word budget must be positive");
  std::vector<std::size_t> counts;
  counts.reserve(sentences.size());
  for (const auto& s : sentences) counts.push_back(word_count(s.text));

  std::vector<Chunk> out;
  std::size_t i = 0;
  while (i < sentences.size()) {
    std::size_t last = i;
    std::size_t words = counts[i];
    const bool oversized = words >= word_budget;
    if (!oversized) {
      while (last + 1 < sentences.size() && last - i + 1 < window &&
             words + counts[last + 1] < word_budget) {
        ++last;
        words += counts[last];
      }
    }
    Chunk c = make_chunk(sentences, i, last, decision_id, label, ChunkProvenance::window_sample);
    c.oversized = oversized;
    out.push_back(std::move(c));
    i = last + 1;
  }
  return out;
}

Chunk anchor_chunk(const Decision& decision, const BiasSpan& span, const ChunkParams& params) {
  if (params.window == 0) throw ConfigError("chunk window must be at least 1 sentence");
  if (!decision.clean_text) {
    throw SpanLocationError(decision.id, "decision " + decision.id + " has no clean text");
  }
  const std::string& text = *decision.clean_text;
  const std::string statement = collapse_whitespace(span.statement);
  const std::size_t pos = statement.empty() ? std::string::npos : text.find(statement);
  if (pos == std::string::npos) {
    throw SpanLocationError(decision.id, "bias statement not found in clean text of decision " +
                                             decision.id + ": \"" + span.statement + "\"");
  }
  const std::size_t end = pos + statement.size() - 1;

  const auto sentences = segment(text, params.segmentation);
  auto sentence_at = [&](std::size_t offset) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      if (sentences[k].offset <= offset) idx = k;
    }
    return idx;
  };
  std::size_t first = sentence_at(pos);
  std::size_t last = sentence_at(end);

  std::size_t words = 0;
  for (std::size_t k = first; k <= last; ++k) words += word_count(sentences[k].text);
  const bool oversized = words >= params.word_budget;

  bool left_turn = true;
  while (!oversized && last - first + 1 < params.window) {
    bool grew = false;
    for (int attempt = 0; attempt < 2 && !grew; ++attempt) {
      const bool left = left_turn;
      left_turn = !left_turn;
      if (left && first > 0) {
        const std::size_t w = word_count(sentences[first - 1].text);
        if (words + w < params.word_budget) {
          --first;
          words += w;
          grew = true;
        }
      } else if (!left && last + 1 < sentences.size()) {
        const std::size_t w = word_count(sentences[last + 1].text);
        if (words + w < params.word_budget) {
          ++last;
          words += w;
          grew = true;
        }
      }
    }
    if (!grew) break;
  }

  Chunk c = make_chunk(sentences, first, last, decision.id, ChunkLabel::biased,
                       ChunkProvenance::anchored_on_bias_span);
  c.oversized = oversized;
  return c;
}

namespace {

Decision with_clean_text(const Decision& d, const CleaningConfig& cleaning) {
  Decision copy = d;
  if (!copy.clean_text) copy.clean_text = clean(copy.raw_text, cleaning);
  return copy;
}

}  // namespace

std::vector<Chunk> training_chunks(const Decision& decision, const ChunkParams& params,
                                   const CleaningConfig& cleaning) {
  const Decision d = with_clean_text(decision, cleaning);
  if (is_biased(d)) {
    std::vector<Chunk> out;
    for (const auto& span : d.bias_spans) {
      Chunk c = anchor_chunk(d, span, params);
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Chunk& o) {
        return o.first == c.first && o.last == c.last;
      });
      if (!duplicate) out.push_back(std::move(c));
    }
    return out;
  }
  const ChunkLabel label = is_annotated(d) ? ChunkLabel::non_biased : ChunkLabel::unlabeled;
  return extract_chunks(segment(*d.clean_text, params.segmentation), params.window,
                        params.word_budget, d.id, label);
}

std::vector<Chunk> decision_chunks(const Decision& decision, const ChunkParams& params,
                                   const CleaningConfig& cleaning) {
  const Decision d = with_clean_text(decision, cleaning);
  return extract_chunks(segment(*d.clean_text, params.segmentation), params.window,
                        params.word_budget, d.id, ChunkLabel::unlabeled);
}

}  // namespace biaslex
