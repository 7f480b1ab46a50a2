#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "biaslex/corpus.hpp"

namespace biaslex {

struct CleaningConfig {
  bool strip_headers = true;
  bool strip_signatures = true;
  bool strip_special_chars = true;
  // ECMAScript regexes searched within each line; a matching line is dropped.
  std::vector<std::string> header_patterns;
  std::vector<std::string> signature_patterns;
  // UTF-8 code points deleted wherever they occur.
  std::set<std::string> removable_chars;

  // The shipped defaults (identical to data/patterns/*.txt).
  static CleaningConfig defaults();
  void validate() const;
};

std::vector<std::string> default_header_patterns();
std::vector<std::string> default_signature_patterns();
std::set<std::string> default_removable_chars();

// One pattern per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> parse_pattern_file(std::string_view text);
std::vector<std::string> load_pattern_file(const std::filesystem::path& path);

// Removes noise lines and characters and collapses whitespace. Idempotent.
std::string clean(std::string_view raw, const CleaningConfig& cfg);

enum class Terminator { period, semicolon, exclamation, question, end_of_text };

std::string_view to_string(Terminator t);

struct Sentence {
  std::string text;
  std::size_t index = 0;
  Terminator terminator = Terminator::end_of_text;
  // Byte offset of `text` inside the segmented string.
  std::size_t offset = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct SegmentConfig {
  // Off by default: the break rule is purely punctuation-based.
  bool abbreviation_guard = false;
  std::vector<std::string> abbreviations = default_abbreviations();

  static std::vector<std::string> default_abbreviations();
};

// A terminator closes a sentence when it is followed by whitespace or the end
// of the text; runs of terminators stay with the sentence they close.
std::vector<Sentence> segment(std::string_view clean_text, const SegmentConfig& cfg = {});

std::size_t word_count(std::string_view text);

enum class ChunkLabel { biased, non_biased, unlabeled };
enum class ChunkProvenance { anchored_on_bias_span, window_sample };

std::string_view to_string(ChunkLabel label);
ChunkLabel parse_chunk_label(std::string_view s);
std::string_view to_string(ChunkProvenance p);
ChunkProvenance parse_chunk_provenance(std::string_view s);

struct Chunk {
  std::string decision_id;
  std::size_t first = 0;  // inclusive sentence ordinals
  std::size_t last = 0;
  std::string text;
  std::size_t word_count = 0;
  ChunkLabel label = ChunkLabel::unlabeled;
  ChunkProvenance provenance = ChunkProvenance::window_sample;
  bool oversized = false;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkParams {
  std::size_t window = 4;
  std::size_t word_budget = 480;
  SegmentConfig segmentation;
};

// Consecutive, non-overlapping windows of up to `window` sentences. A window
// closes early when the next sentence would bring it to `word_budget` words.
std::vector<Chunk> extract_chunks(const std::vector<Sentence>& sentences, std::size_t window,
                                  std::size_t word_budget, std::string_view decision_id = {},
                                  ChunkLabel label = ChunkLabel::unlabeled);

// The minimal sentence window containing the statement, padded alternately
// left and right up to `window` sentences while staying under the budget.
// Throws SpanLocationError when the statement is not in the clean text.
Chunk anchor_chunk(const Decision& decision, const BiasSpan& span, const ChunkParams& params);

// Training chunks for one decision: anchored positives for biased decisions,
// every window as a negative for annotated non-biased ones, unlabeled windows
// otherwise. Uses clean_text, cleaning raw_text with `cleaning` when absent.
std::vector<Chunk> training_chunks(const Decision& decision, const ChunkParams& params,
                                   const CleaningConfig& cleaning);

// All window chunks of the full decision, unlabeled.
std::vector<Chunk> decision_chunks(const Decision& decision, const ChunkParams& params,
                                   const CleaningConfig& cleaning);

// JSON Lines: {"decision_id","range":[first,last],"text","label","provenance"}.
std::string chunk_to_jsonl(const Chunk& c);
Chunk chunk_from_jsonl(std::string_view line);
std::vector<Chunk> read_chunks(const std::filesystem::path& path);
void write_chunks(const std::vector<Chunk>& chunks, const std::filesystem::path& path);

}  // namespace biaslex
