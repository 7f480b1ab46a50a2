#include <benchmark/benchmark.h>

#include <sstream>

#include "biaslex/augmentation.hpp"
#include "biaslex/model.hpp"
#include "biaslex/text_prep.hpp"
#include "biaslex/tokenizer.hpp"
#include "test_support.hpp"

using namespace biaslex;

namespace {

ModelConfig bench_model(std::size_t d) {
  ModelConfig cfg;
  cfg.vocab_size = 2000;
  cfg.max_positions = 128;
  cfg.embed_dim = d;
  cfg.num_heads = 4;
  cfg.num_blocks = 2;
  cfg.feedforward_dim = 4 * d;
  cfg.dropout_rate = 0.1;
  return cfg;
}

Batch bench_batch(std::size_t rows, std::size_t len) {
  fixtures::Gen g(3);
  std::vector<std::vector<int>> seqs(rows);
  for (auto& s : seqs) {
    const std::size_t n = g.size(len / 2, len);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<int>(g.size(1, 1999)));
  }
  return pad_batch(seqs);
}

void BM_Forward(benchmark::State& state) {
  const auto cfg = bench_model(static_cast<std::size_t>(state.range(0)));
  const auto params = Parameters::initialize(cfg, 1);
  const auto batch = bench_batch(32, 128);
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, cfg, batch).logits);
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto cfg = bench_model(static_cast<std::size_t>(state.range(0)));
  const auto params = Parameters::initialize(cfg, 1);
  const auto batch = bench_batch(32, 128);
  const std::vector<int> labels(32, 1);
  const auto mask = FreezeMask::everything(cfg.num_blocks);
  for (auto _ : state) {
    const auto pass = forward(params, cfg, batch, DropoutStream{1, 0});
    benchmark::DoNotOptimize(loss_and_grads(pass, labels, params, cfg, mask).loss);
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Augment(benchmark::State& state) {
  AugmentationConfig cfg;
  cfg.weight = 0.3;
  fixtures::Gen g(5);
  std::string text;
  for (int i = 0; i < 40; ++i) text += g.sentence() + ". ";
  std::istringstream in(text);
  for (std::string w; in >> w;) cfg.general_dict.add(w, {w + "x"});
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(augment(text, TextLabel::biased, cfg, stream++));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Augment);

void BM_CleanSegmentChunk(benchmark::State& state) {
  fixtures::Gen g(9);
  std::string doc;
  for (int i = 0; i < 20; ++i) doc += g.raw_document() + "\n";
  const auto cleaning = CleaningConfig::defaults();
  for (auto _ : state) {
    const auto sentences = segment(clean(doc, cleaning));
    benchmark::DoNotOptimize(extract_chunks(sentences, 4, 512));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_CleanSegmentChunk);

}  // namespace

BENCHMARK_MAIN();
