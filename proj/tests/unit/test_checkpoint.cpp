#include <gtest/gtest.h>

#include "biaslex/checkpoint.hpp"
#include "biaslex/error.hpp"
#include "test_support.hpp"

using namespace biaslex;

namespace {

Checkpoint make_checkpoint(bool with_optimizer) {
  Checkpoint c;
  c.classifier.vocab = Vocabulary::from_words({"réu", "vítima"});
  c.classifier.model.vocab_size = c.classifier.vocab.size();
  c.classifier.model.embed_dim = 8;
  c.classifier.model.num_heads = 2;
  c.classifier.model.feedforward_dim = 16;
  c.classifier.model.max_positions = 32;
  c.classifier.tokenizer.max_tokens = 32;
  c.classifier.params = Parameters::initialize(c.classifier.model, 77);
  if (with_optimizer) {
    AdamState s = AdamState::for_params(c.classifier.params);
    s.step = 12;
    s.m.head_bias(0, 1) = 0.125;
    s.v.token_embedding(3, 4) = 1.0 / 3.0;
    c.optimizer = s;
  }
  return c;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  for (bool opt : {false, true}) {
    const Checkpoint c = make_checkpoint(opt);
    const auto dir = fixtures::scratch_dir("ckpt");
    save_checkpoint(c, dir / "m.json");
    const Checkpoint back = load_checkpoint(dir / "m.json", c.classifier.model);
    EXPECT_EQ(back.classifier.params, c.classifier.params);
    EXPECT_EQ(back.classifier.vocab, c.classifier.vocab);
    EXPECT_EQ(back.classifier.model, c.classifier.model);
    EXPECT_EQ(back.classifier.tokenizer, c.classifier.tokenizer);
    ASSERT_EQ(back.optimizer.has_value(), opt);
    if (opt) {
      EXPECT_EQ(back.optimizer->step, 12u);
      EXPECT_EQ(back.optimizer->m, c.optimizer->m);
      EXPECT_EQ(back.optimizer->v, c.optimizer->v);
    }
    EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(c));
  }
}

TEST(Checkpoint, MismatchedConfigIsRejected) {
  const Checkpoint c = make_checkpoint(false);
  const auto dir = fixtures::scratch_dir("ckpt-mismatch");
  save_checkpoint(c, dir / "m.json");
  ModelConfig other = c.classifier.model;
  other.num_blocks = 3;
  EXPECT_THROW(load_checkpoint(dir / "m.json", other), ConfigError);
}

TEST(Checkpoint, CorruptInputs) {
  EXPECT_THROW(parse_checkpoint("not json"), DataError);
  EXPECT_THROW(parse_checkpoint(R"({"format":"other"})"), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.json"), IoError);
}
