#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biaslex/augmentation.hpp"
#include "biaslex/checkpoint.hpp"
#include "biaslex/corpus.hpp"
#include "biaslex/evaluation.hpp"
#include "biaslex/model.hpp"
#include "biaslex/optimizer.hpp"
#include "biaslex/text_prep.hpp"

namespace biaslex {

enum class Protocol { baseline, deep };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view s);

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetTag dataset = DatasetTag::DVC;
  AugmentationConfig augmentation;
  Protocol protocol = Protocol::deep;
  // Trainable top blocks under the deep protocol; ignored by baseline.
  std::size_t n_layers = 2;
  // Also train the embeddings when the deep protocol covers every block.
  bool train_embeddings = false;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  // Peak rates per protocol; they replace optimizer.learning_rate.
  double deep_learning_rate = 1e-3;
  double baseline_learning_rate = 3e-2;
  OptimizerConfig optimizer;
  ModelConfig model;  // vocab_size is filled in from the training split
  TokenizerConfig tokenizer;
  std::uint64_t seed = 20240601;

  void validate() const;
  FreezeMask freeze_mask() const;
  // `optimizer` with the protocol's peak rate.
  OptimizerConfig effective_optimizer() const;
};

// Training and validation chunks; every chunk must be labeled.
struct ExperimentData {
  std::vector<Chunk> train;
  std::vector<Chunk> val;
};

struct ExperimentResult {
  std::vector<EpochRecord> epochs;
  // State at the epoch with the highest validation balanced accuracy.
  Checkpoint best;
  std::size_t best_epoch = 0;
  // State after the last epoch.
  TextClassifier final_model;
  Parameters initial_params;
  MetricsReport report;
};

// Trains a fresh classifier. Each epoch: oversample biased items, shuffle,
// augment online, step in batches under the protocol's freeze mask at the
// cosine rate for that epoch, then evaluate unaugmented train and validation
// sets. Throws ConfigError on an empty training split or a split missing a
// class, NumericError (with the epoch) on a non-finite loss.
ExperimentResult run_experiment(const ExperimentData& data, const ExperimentConfig& cfg);

// Item order used for one training epoch: indices into `labels` with biased
// items repeated per the oversampling factor, then shuffled.
std::vector<std::size_t> epoch_order(const std::vector<int>& labels, double oversample_biased,
                                     std::uint64_t seed, std::size_t epoch);

struct TrainingBatch {
  std::vector<std::string> texts;
  std::vector<int> labels;
};

// The epoch's batches in training order, augmented when the weight is
// positive. The last batch may be short.
std::vector<TrainingBatch> epoch_batches(const std::vector<std::string>& texts,
                                         const std::vector<int>& labels,
                                         const ExperimentConfig& cfg, std::size_t epoch);

struct GridDataset {
  std::string name;
  DatasetTag tag = DatasetTag::DVC;
  ExperimentData data;
};

struct GridRow {
  std::string dataset;
  Protocol protocol = Protocol::baseline;
  double weight = 0.0;
  BestScore best_train;
  BestScore best_val;
  std::string error;  // non-empty when the cell failed
};

struct GridSpec {
  std::vector<double> weights{0.0, 0.3, 0.7, 1.0};
  std::vector<Protocol> protocols{Protocol::baseline, Protocol::deep};
  std::size_t jobs = 1;  // cells run concurrently
};

// Cross product datasets x protocols x weights, in that nesting order. A
// failing cell is recorded and the grid continues.
std::vector<GridRow> grid(const std::vector<GridDataset>& datasets, const GridSpec& spec,
                          const ExperimentConfig& base);

std::string grid_table_text(const std::vector<GridRow>& rows);
nlohmann::ordered_json grid_table_json(const std::vector<GridRow>& rows);

}  // namespace biaslex
