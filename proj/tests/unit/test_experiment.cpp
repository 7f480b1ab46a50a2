#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <map>

#include "biaslex/error.hpp"
#include "biaslex/experiment.hpp"
#include "test_support.hpp"

using namespace biaslex;

namespace {

const ExperimentData& small_data() {
  static const ExperimentData data = [] {
    ExperimentData d;
    const auto train = read_chunks(fixtures::test_data("synthetic_train.jsonl"));
    const auto val = read_chunks(fixtures::test_data("synthetic_val.jsonl"));
    d.train.assign(train.begin(), train.begin() + 60);
    d.val.assign(val.begin(), val.begin() + 20);
    return d;
  }();
  return data;
}

ExperimentConfig small_config(Protocol protocol = Protocol::deep) {
  ExperimentConfig cfg;
  cfg.name = "unit";
  cfg.protocol = protocol;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.model.embed_dim = 16;
  cfg.model.num_heads = 2;
  cfg.model.num_blocks = 2;
  cfg.model.feedforward_dim = 32;
  cfg.model.max_positions = 96;
  cfg.tokenizer.max_tokens = 96;
  cfg.n_layers = 2;
  cfg.optimizer.schedule_period = 3;
  return cfg;
}

// Every word of every training text mapped to a distinct synonym.
AugmentationConfig full_coverage(const std::vector<Chunk>& chunks, double weight) {
  AugmentationConfig a;
  a.weight = weight;
  a.stopwords = {"de"};
  for (const auto& c : chunks) {
    for (const auto& w : word_pieces(c.text, TokenizerConfig{.case_preserving = false})) {
      if (!a.general_dict.contains(w)) a.general_dict.add(w, {w + "zz"});
    }
  }
  return a;
}

std::vector<std::string> texts_of(const std::vector<Chunk>& chunks) {
  std::vector<std::string> t;
  for (const auto& c : chunks) t.push_back(c.text);
  return t;
}

std::vector<int> labels_of(const std::vector<Chunk>& chunks) {
  std::vector<int> l;
  for (const auto& c : chunks) l.push_back(c.label == ChunkLabel::biased ? 1 : 0);
  return l;
}

}  // namespace

TEST(EpochOrder, OversamplingCounts) {
  const std::vector<int> labels = {0, 1, 0, 1, 1, 0, 1};
  for (double factor : {1.0, 2.0, 1.5, 2.25}) {
    const auto order = epoch_order(labels, factor, 7, 1);
    std::map<std::size_t, std::size_t> copies;
    for (auto i : order) ++copies[i];
    std::size_t biased_total = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == 0) {
        EXPECT_EQ(copies[i], 1u);
      } else {
        EXPECT_GE(copies[i], static_cast<std::size_t>(factor));
        EXPECT_LE(copies[i], static_cast<std::size_t>(factor) + 1);
        biased_total += copies[i];
      }
    }
    EXPECT_EQ(biased_total, static_cast<std::size_t>(std::floor(4 * factor + 1e-9))) << factor;
  }
  EXPECT_EQ(epoch_order(labels, 2.0, 7, 1), epoch_order(labels, 2.0, 7, 1));
  EXPECT_NE(epoch_order(labels, 2.0, 7, 1), epoch_order(labels, 2.0, 7, 2));
}

TEST(EpochBatches, ShortLastBatchKept) {
  ExperimentConfig cfg = small_config();
  const auto& d = small_data();
  const auto batches = epoch_batches(texts_of(d.train), labels_of(d.train), cfg, 1);
  ASSERT_EQ(batches.size(), 4u);  // 60 items in batches of 16
  EXPECT_EQ(batches.back().texts.size(), 12u);
}

TEST(EpochBatches, FullWeightChangesEveryEpoch) {
  const auto& d = small_data();
  ExperimentConfig plain = small_config();
  ExperimentConfig aug = plain;
  aug.augmentation = full_coverage(d.train, 1.0);
  for (std::size_t epoch = 1; epoch <= 3; ++epoch) {
    const auto a = epoch_batches(texts_of(d.train), labels_of(d.train), plain, epoch);
    const auto b = epoch_batches(texts_of(d.train), labels_of(d.train), aug, epoch);
    ASSERT_EQ(a.size(), b.size());
    std::size_t differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].labels, b[i].labels);
      differing += a[i].texts != b[i].texts;
    }
    EXPECT_GE(differing, 1u) << "epoch " << epoch;
  }
}

TEST(RunExperiment, RecordsAndDeterminism) {
  const ExperimentConfig cfg = small_config();
  const auto a = run_experiment(small_data(), cfg);
  ASSERT_EQ(a.epochs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.epochs[i].epoch, i + 1);
    EXPECT_GE(a.epochs[i].val_balanced_accuracy, 0.0);
    EXPECT_LE(a.epochs[i].val_balanced_accuracy, 1.0);
  }
  EXPECT_EQ(a.epochs[0].learning_rate, cfg.deep_learning_rate);
  EXPECT_EQ(a.best_epoch, best_val(a.epochs).epoch);
  EXPECT_EQ(a.report.epochs, a.epochs);

  const auto b = run_experiment(small_data(), cfg);
  EXPECT_EQ(a.epochs, b.epochs);
  EXPECT_EQ(a.final_model.params, b.final_model.params);
}

TEST(RunExperiment, BaselineLeavesEncoderUntouched) {
  const auto r = run_experiment(small_data(), small_config(Protocol::baseline));
  const auto before = r.initial_params.tensors();
  const auto after = r.final_model.params.tensors();
  std::size_t changed_head = 0;
  for (std::size_t i = 0; i < after.size(); ++i) {
    const bool same = std::memcmp(before[i].tensor->data(), after[i].tensor->data(),
                                  sizeof(double) * after[i].tensor->size()) == 0;
    if (after[i].group.kind == ParamGroup::Kind::head) {
      changed_head += !same;
    } else {
      EXPECT_TRUE(same) << after[i].name;
    }
  }
  EXPECT_GT(changed_head, 0u);
}

TEST(RunExperiment, InputErrors) {
  const ExperimentConfig cfg = small_config();
  ExperimentData empty;
  empty.val = small_data().val;
  EXPECT_THROW(run_experiment(empty, cfg), ConfigError);

  ExperimentData unlabeled = small_data();
  unlabeled.train[3].label = ChunkLabel::unlabeled;
  EXPECT_THROW(run_experiment(unlabeled, cfg), ConfigError);

  ExperimentData one_class = small_data();
  for (auto& c : one_class.train) c.label = ChunkLabel::non_biased;
  EXPECT_THROW(run_experiment(one_class, cfg), ConfigError);

  ExperimentConfig bad = cfg;
  bad.n_layers = 3;
  EXPECT_THROW(run_experiment(small_data(), bad), ConfigError);
}

TEST(Grid, SingleCellAndFailureIsolation) {
  ExperimentConfig base = small_config();
  base.epochs = 1;
  base.optimizer.schedule_period = 1;
  GridSpec spec;
  spec.weights = {0.0};
  spec.protocols = {Protocol::deep};
  const std::vector<GridDataset> one = {{"SYN", DatasetTag::DVC, small_data()}};
  const auto rows = grid(one, spec, base);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_EQ(rows[0].best_val.epoch, 1u);

  std::vector<GridDataset> two = one;
  two.push_back({"BROKEN", DatasetTag::PAC, ExperimentData{}});
  const auto mixed = grid(two, spec, base);
  ASSERT_EQ(mixed.size(), 2u);
  EXPECT_TRUE(mixed[0].error.empty());
  EXPECT_FALSE(mixed[1].error.empty());
  const auto j = grid_table_json(mixed);
  EXPECT_TRUE(j[1]["best_val"].is_null());
  EXPECT_EQ(j[0]["best_val"]["epoch"], 1);
  EXPECT_NE(grid_table_text(mixed).find("failed:"), std::string::npos);
}

TEST(Grid, ParallelMatchesSerial) {
  ExperimentConfig base = small_config();
  base.epochs = 1;
  base.optimizer.schedule_period = 1;
  base.augmentation.stopwords = {"de"};
  GridSpec spec;
  spec.weights = {0.0, 0.7};
  spec.protocols = {Protocol::baseline, Protocol::deep};
  const std::vector<GridDataset> ds = {{"SYN", DatasetTag::DVC, small_data()}};
  const auto serial = grid(ds, spec, base);
  spec.jobs = 3;
  const auto parallel = grid(ds, spec, base);
  EXPECT_EQ(grid_table_json(serial).dump(), grid_table_json(parallel).dump());
  EXPECT_EQ(serial.size(), 4u);
}
