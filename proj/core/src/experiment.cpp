#include "biaslex/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "biaslex/error.hpp"
#include "biaslex/log.hpp"
#include "biaslex/rng.hpp"

namespace biaslex {

namespace {

// Seed salts keep the shuffle, dropout and initialization streams apart.
constexpr std::uint64_t kShuffleSalt = 0x5348554646ULL;
constexpr std::uint64_t kDropoutSalt = 0x44524f50ULL;
constexpr std::uint64_t kInitSalt = 0x494e4954ULL;
constexpr std::size_t kEvalBatch = 64;

int binary_label(const Chunk& c, const char* split) {
  switch (c.label) {
    case ChunkLabel::biased:
      return 1;
    case ChunkLabel::non_biased:
      return 0;
    case ChunkLabel::unlabeled:
      break;
  }
  throw ConfigError(std::string(split) + " split contains an unlabeled chunk from " +
                    c.decision_id);
}

struct LabeledSet {
  std::vector<std::string> texts;
  std::vector<int> labels;
};

LabeledSet labeled(const std::vector<Chunk>& chunks, const char* split) {
  LabeledSet s;
  for (const auto& c : chunks) {
    s.texts.push_back(c.text);
    s.labels.push_back(binary_label(c, split));
  }
  const auto pos = std::count(s.labels.begin(), s.labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(s.labels.size())) {
    throw ConfigError(std::string(split) + " split must contain both classes");
  }
  return s;
}

struct Evaluation {
  double loss = 0.0;
  double balanced_accuracy = 0.0;
  ConfusionMatrix confusion;
};

Evaluation evaluate(const TextClassifier& model, const LabeledSet& set) {
  const Matrix logits = model.logits(set.texts, kEvalBatch);
  Evaluation e;
  e.loss = cross_entropy(logits, set.labels);
  const auto pred = predict_labels(logits);
  e.confusion = ConfusionMatrix::from_predictions(set.labels, pred);
  e.balanced_accuracy = balanced_accuracy(e.confusion);
  return e;
}

}  // namespace

std::string_view to_string(Protocol p) { return p == Protocol::deep ? "deep" : "baseline"; }

Protocol parse_protocol(std::string_view s) {
  if (s == "deep") return Protocol::deep;
  if (s == "baseline") return Protocol::baseline;
  throw ConfigError("unknown protocol \"" + std::string(s) + "\"");
}

void ExperimentConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (protocol == Protocol::deep && (n_layers == 0 || n_layers > model.num_blocks)) {
    throw ConfigError("n_layers must be in [1, num_blocks] for the deep protocol");
  }
  augmentation.validate();
  effective_optimizer().validate();
  tokenizer.validate();
  if (tokenizer.max_tokens > model.max_positions) {
    throw ConfigError("max_tokens exceeds the model's max_positions");
  }
}

FreezeMask ExperimentConfig::freeze_mask() const {
  if (protocol == Protocol::baseline) return FreezeMask::baseline();
  FreezeMask m = FreezeMask::deep(n_layers);
  m.train_embeddings = train_embeddings;
  return m;
}

OptimizerConfig ExperimentConfig::effective_optimizer() const {
  OptimizerConfig o = optimizer;
  o.learning_rate = protocol == Protocol::deep ? deep_learning_rate : baseline_learning_rate;
  return o;
}

std::vector<std::size_t> epoch_order(const std::vector<int>& labels, double oversample_biased,
                                     std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order;
  const auto whole = static_cast<std::size_t>(std::floor(oversample_biased));
  const double frac = oversample_biased - static_cast<double>(whole);
  double carry = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t copies = 1;
    if (labels[i] != 0) {
      copies = whole;
      // Spread the fractional part evenly over the biased items.
      carry += frac;
      if (carry >= 1.0 - 1e-12) {
        ++copies;
        carry -= 1.0;
      }
    }
    order.insert(order.end(), copies, i);
  }
  SeededStream rng(seed ^ kShuffleSalt, epoch);
  rng.shuffle(order.begin(), order.end());
  return order;
}

std::vector<TrainingBatch> epoch_batches(const std::vector<std::string>& texts,
                                        const std::vector<int>& labels,
                                        const ExperimentConfig& cfg, std::size_t epoch) {
  const auto order = epoch_order(labels, cfg.augmentation.oversample_biased, cfg.seed, epoch);
  std::vector<TrainingBatch> out;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    TrainingBatch b;
    for (std::size_t p = start; p < end; ++p) {
      const std::size_t item = order[p];
      const int y = labels[item];
      if (cfg.augmentation.weight > 0.0) {
        b.texts.push_back(augment(texts[item], y != 0 ? TextLabel::biased : TextLabel::non_biased,
                                  cfg.augmentation,
                                  stream_id(static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(p))));
      } else {
        b.texts.push_back(texts[item]);
      }
      b.labels.push_back(y);
    }
    out.push_back(std::move(b));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentData& data, const ExperimentConfig& cfg) {
  cfg.validate();
  if (data.train.empty()) throw ConfigError("training split is empty");
  if (data.val.empty()) throw ConfigError("validation split is empty");
  const LabeledSet train = labeled(data.train, "training");
  const LabeledSet val = labeled(data.val, "validation");

  TextClassifier model;
  model.tokenizer = cfg.tokenizer;
  model.vocab = Vocabulary::build(train.texts, cfg.tokenizer);
  model.model = cfg.model;
  model.model.vocab_size = model.vocab.size();
  model.model.validate();
  model.params = Parameters::initialize(model.model, cfg.seed ^ kInitSalt);

  const FreezeMask mask = cfg.freeze_mask();
  mask.validate(model.model);

  ExperimentResult result;
  result.initial_params = model.params;
  AdamState state = AdamState::for_params(model.params);
  const OptimizerConfig opt = cfg.effective_optimizer();
  double best_acc = -1.0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = cosine_lr(static_cast<double>(epoch - 1), opt);
    const auto batches = epoch_batches(train.texts, train.labels, cfg, epoch);
    for (std::size_t batch_id = 0; batch_id < batches.size(); ++batch_id) {
      const TrainingBatch& batch = batches[batch_id];
      std::vector<std::vector<TokenId>> seqs;
      seqs.reserve(batch.texts.size());
      for (const auto& text : batch.texts) seqs.push_back(tokenize(text, model.vocab, model.tokenizer));
      const DropoutStream dropout{cfg.seed ^ kDropoutSalt,
                                  stream_id(static_cast<std::uint32_t>(epoch),
                                            static_cast<std::uint32_t>(batch_id))};
      const ForwardPass pass = forward(model.params, model.model, pad_batch(std::move(seqs)), dropout);
      try {
        const LossAndGrads lg =
            loss_and_grads(pass, batch.labels, model.params, model.model, mask, batch_id);
        adamw_step(model.params, lg.grads, state, opt, lr);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
    }

    const Evaluation tr = evaluate(model, train);
    const Evaluation va = evaluate(model, val);
    if (!std::isfinite(tr.loss) || !std::isfinite(va.loss)) {
      throw NumericError("epoch " + std::to_string(epoch) + ": non-finite evaluation loss");
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = tr.loss;
    rec.val_loss = va.loss;
    rec.train_balanced_accuracy = tr.balanced_accuracy;
    rec.val_balanced_accuracy = va.balanced_accuracy;
    rec.learning_rate = lr;
    rec.val_confusion = va.confusion;
    result.epochs.push_back(rec);

    if (va.balanced_accuracy > best_acc) {
      best_acc = va.balanced_accuracy;
      result.best_epoch = epoch;
      result.best = Checkpoint{model, state};
    }
  }

  result.final_model = std::move(model);
  result.report = MetricsReport::from_epochs(
      cfg.name, std::string(to_string(cfg.dataset)), std::string(to_string(cfg.protocol)),
      cfg.augmentation.weight, result.epochs);
  return result;
}

std::vector<GridRow> grid(const std::vector<GridDataset>& datasets, const GridSpec& spec,
                          const ExperimentConfig& base) {
  struct Cell {
    const GridDataset* dataset;
    Protocol protocol;
    double weight;
  };
  std::vector<Cell> cells;
  for (const auto& d : datasets) {
    for (Protocol p : spec.protocols) {
      for (double w : spec.weights) cells.push_back({&d, p, w});
    }
  }
  std::vector<GridRow> rows(cells.size());

  auto run_cell = [&](std::size_t i) {
    const Cell& c = cells[i];
    GridRow& row = rows[i];
    row.dataset = c.dataset->name;
    row.protocol = c.protocol;
    row.weight = c.weight;
    try {
      ExperimentConfig cfg = base;
      cfg.dataset = c.dataset->tag;
      cfg.protocol = c.protocol;
      cfg.augmentation.weight = c.weight;
      std::ostringstream name;
      name << c.dataset->name << '-' << to_string(c.protocol) << '-' << c.weight;
      cfg.name = name.str();
      const ExperimentResult r = run_experiment(c.dataset->data, cfg);
      row.best_train = r.report.best_train;
      row.best_val = r.report.best_val;
    } catch (const std::exception& e) {
      row.error = e.what();
      warn("grid cell " + row.dataset + "/" + std::string(to_string(row.protocol)) + " failed: " +
           e.what());
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(spec.jobs, cells.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
      });
    }
    for (auto& w : workers) w.join();
  }
  return rows;
}

namespace {

std::string weight_text(double w) {
  std::ostringstream os;
  os << w;
  return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string grid_table_text(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << pad("dataset", 9) << pad("protocol", 10) << pad("weight", 8)
     << "best-balanced accuracy (%) (epoch)\n";
  for (const auto& r : rows) {
    os << pad(r.dataset, 9) << pad(std::string(to_string(r.protocol)), 10)
       << pad(weight_text(r.weight), 8);
    if (!r.error.empty()) {
      os << "failed: " << r.error << '\n';
      continue;
    }
    os << format_percent(100.0 * r.best_train.acc) << " (T) (" << r.best_train.epoch << "), "
       << format_percent(100.0 * r.best_val.acc) << " (V) (" << r.best_val.epoch << ")\n";
  }
  return os.str();
}

nlohmann::ordered_json grid_table_json(const std::vector<GridRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j = {{"dataset", r.dataset},
                                {"protocol", std::string(to_string(r.protocol))},
                                {"weight", r.weight}};
    if (r.error.empty()) {
      j["best_train"] = {{"acc", r.best_train.acc}, {"epoch", r.best_train.epoch}};
      j["best_val"] = {{"acc", r.best_val.acc}, {"epoch", r.best_val.epoch}};
    } else {
      j["best_train"] = nullptr;
      j["best_val"] = nullptr;
      j["error"] = r.error;
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace biaslex
