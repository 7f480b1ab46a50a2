#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "biaslex/experiment.hpp"
#include "biaslex/split.hpp"
#include "biaslex/text_prep.hpp"

namespace biaslex::cli {

// Everything a command can be configured with. Plain `key = value` lines;
// '#' starts a comment. Every key is optional; unknown keys are an error.
struct RunConfig {
  ExperimentConfig experiment;
  CleaningConfig cleaning = CleaningConfig::defaults();
  ChunkParams chunking;
  SplitSpec split;
  GridSpec grid;
  std::size_t bias_dict_size = 200;

  // Resource files; relative paths resolve against the config file.
  std::filesystem::path dict_bias;
  std::filesystem::path dict_general;
  std::filesystem::path stopwords;
  std::filesystem::path header_patterns;
  std::filesystem::path signature_patterns;

  // Keys that were set explicitly, by the file or by a flag.
  std::map<std::string, std::string, std::less<>> explicit_keys;

  void set(std::string_view key, std::string_view value, const std::filesystem::path& base_dir);
  void set_seed(std::uint64_t seed);

  // Loads dictionaries, stopwords and pattern files, derives dependent
  // defaults, then validates every section.
  void finalize();
  // Checks that only matter to the grid command.
  void validate_grid() const;

  // Canonical `key = value` listing of every key, sorted.
  std::string effective_text() const;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<std::string> run_config_keys();

}  // namespace biaslex::cli
