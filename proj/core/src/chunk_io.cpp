#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "biaslex/error.hpp"
#include "biaslex/text_prep.hpp"

namespace biaslex {

using nlohmann::json;

std::string chunk_to_jsonl(const Chunk& c) {
  const json j = {{"decision_id", c.decision_id},
                  {"range", {c.first, c.last}},
                  {"text", c.text},
                  {"label", std::string(to_string(c.label))},
                  {"provenance", std::string(to_string(c.provenance))}};
  return j.dump();
}

Chunk chunk_from_jsonl(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("chunk line parse error: ") + e.what(), 1);
  }
  if (!j.is_object()) throw DataError("chunk line must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "decision_id" && key != "range" && key != "text" && key != "label" &&
        key != "provenance") {
      throw DataError("chunk line: unknown key \"" + key + "\"");
    }
  }
  try {
    Chunk c;
    c.decision_id = j.at("decision_id").get<std::string>();
    const auto& range = j.at("range");
    if (!range.is_array() || range.size() != 2) throw DataError("chunk range must be [first, last]");
    c.first = range[0].get<std::size_t>();
    c.last = range[1].get<std::size_t>();
    if (c.last < c.first) throw DataError("chunk range is reversed");
    c.text = j.at("text").get<std::string>();
    c.word_count = word_count(c.text);
    c.label = parse_chunk_label(j.at("label").get<std::string>());
    c.provenance = parse_chunk_provenance(j.at("provenance").get<std::string>());
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("chunk line: ") + e.what());
  }
}

std::vector<Chunk> read_chunks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open chunk file " + path.string());
  std::vector<Chunk> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(chunk_from_jsonl(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what(), lineno);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_chunks(const std::vector<Chunk>& chunks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write chunk file " + path.string());
  for (const auto& c : chunks) out << chunk_to_jsonl(c) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace biaslex
