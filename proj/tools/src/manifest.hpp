#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace biaslex::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to a command's outputs. Holds no
// timestamps, so identical runs give identical manifests.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;  // normalized, replayable
  std::string config_text;             // effective configuration
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  // Writes <dir>/run-manifest.json with SHA-256 digests of config, inputs
  // and outputs.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace biaslex::cli
