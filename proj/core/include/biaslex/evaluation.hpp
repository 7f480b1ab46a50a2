#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biaslex/corpus.hpp"
#include "biaslex/model.hpp"
#include "biaslex/text_prep.hpp"

namespace biaslex {

// Binary confusion counts; the positive class is "biased".
struct ConfusionMatrix {
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tp = 0;

  static ConfusionMatrix from_predictions(std::span<const int> actual, std::span<const int> predicted);

  std::uint64_t total() const { return tn + fp + fn + tp; }

  struct Percent {
    double tn, fp, fn, tp;
  };
  // Cells as percentages of the total, each rounded to two decimals.
  Percent percent() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Mean of the two per-class recalls: (tn/(tn+fp) + tp/(tp+fn)) / 2.
// Throws UndefinedMetricError when either actual class is empty.
double balanced_accuracy(const ConfusionMatrix& cm);

// Same formula over real-valued cells, e.g. published percentages.
double balanced_accuracy(double tn, double fp, double fn, double tp);

enum class DecisionLabel { non_biased, biased };

std::string_view to_string(DecisionLabel label);

struct DecisionPrediction {
  std::string id;
  DecisionLabel label = DecisionLabel::non_biased;
  std::vector<DecisionLabel> chunk_labels;
};

// Maps chunk texts to 0/1 predictions.
using ChunkPredictor = std::function<std::vector<int>(const std::vector<std::string>&)>;

// Splits the whole decision into window chunks, predicts every chunk and
// labels the decision biased iff any chunk is predicted biased. Throws
// DataError when the decision has no usable clean text.
DecisionPrediction classify_decision(const Decision& decision, const ChunkPredictor& predict,
                                     const ChunkParams& params);

DecisionPrediction classify_decision(const Decision& decision, const TextClassifier& model,
                                     const ChunkParams& params);

// One training epoch as reported.
struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_balanced_accuracy = 0.0;
  double val_balanced_accuracy = 0.0;
  double learning_rate = 0.0;
  ConfusionMatrix val_confusion;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct BestScore {
  double acc = 0.0;
  std::size_t epoch = 0;
};

// Highest value, earliest epoch on ties.
BestScore best_train(const std::vector<EpochRecord>& records);
BestScore best_val(const std::vector<EpochRecord>& records);
// Epoch with the lowest validation loss, earliest on ties.
std::size_t lowest_val_loss_epoch(const std::vector<EpochRecord>& records);

inline constexpr std::string_view kReportSchemaVersion = "1";

struct MetricsReport {
  std::string experiment;
  std::string dataset;
  std::string protocol;
  double weight = 0.0;
  std::vector<EpochRecord> epochs;
  std::size_t confusion_epoch = 0;
  ConfusionMatrix confusion;
  BestScore best_train;
  BestScore best_val;
  std::vector<DecisionPrediction> decisions;

  // Fills the confusion matrix and best records from `epochs`.
  static MetricsReport from_epochs(std::string experiment, std::string dataset,
                                   std::string protocol, double weight,
                                   std::vector<EpochRecord> epochs);
};

nlohmann::ordered_json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

// Structural check of a report JSON document; returns human-readable errors
// (empty when valid). Used for reports produced by external trainers too.
std::vector<std::string> validate_report_json(const nlohmann::json& j);

// Summary row in the results-table shape, followed by the confusion matrix
// in percent with two decimals.
std::string render_report_text(const MetricsReport& report);

// Writes <stem>.json and <stem>.txt under `dir`. Byte-identical on re-render.
void render_report(const MetricsReport& report, const std::filesystem::path& dir,
                   const std::string& stem = "report");

std::string format_percent(double value);

}  // namespace biaslex
