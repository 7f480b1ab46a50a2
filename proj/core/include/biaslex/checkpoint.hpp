#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "biaslex/model.hpp"
#include "biaslex/optimizer.hpp"

namespace biaslex {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  TextClassifier classifier;
  std::optional<AdamState> optimizer;
};

// JSON container: format tag, version, configs, vocabulary, parameter
// tensors (row-major) and optional optimizer moments.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// When `expected` is given, a checkpoint built for a different model
// configuration is rejected with ConfigError.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace biaslex
