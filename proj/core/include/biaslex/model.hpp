#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biaslex/tokenizer.hpp"

namespace biaslex {

using Matrix = Eigen::MatrixXd;

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t max_positions = 512;
  std::size_t embed_dim = 64;
  std::size_t num_heads = 4;
  std::size_t num_blocks = 2;
  std::size_t feedforward_dim = 256;
  double dropout_rate = 0.1;
  std::size_t num_classes = 2;
  double layer_norm_eps = 1e-5;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct BlockParams {
  Matrix ln1_gain, ln1_bias;
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln2_gain, ln2_bias;
  Matrix w1, b1, w2, b2;
};

// Which part of the network a tensor belongs to.
struct ParamGroup {
  enum class Kind { embedding, block, head } kind;
  std::size_t block = 0;
};

template <typename M>
struct TensorRef {
  std::string name;
  ParamGroup group;
  M* tensor;
};

// Pre-LN transformer encoder with a classification head reading the [CLS]
// position. Row vectors (biases, norms) are stored as 1 x n matrices.
struct Parameters {
  Matrix token_embedding;     // vocab x d
  Matrix position_embedding;  // positions x d
  std::vector<BlockParams> blocks;
  Matrix final_ln_gain, final_ln_bias;
  Matrix head_weight;  // d x classes
  Matrix head_bias;    // 1 x classes

  // Same-shaped zero tensors.
  static Parameters zeros_like(const Parameters& p);
  // Truncated normal (sigma 0.02, cut at 2 sigma) weights, zero biases, unit
  // norm gains.
  static Parameters initialize(const ModelConfig& cfg, std::uint64_t seed);

  std::vector<TensorRef<Matrix>> tensors();
  std::vector<TensorRef<const Matrix>> tensors() const;

  friend bool operator==(const Parameters& a, const Parameters& b);
};

// Selects the trainable tensors. The head is always trainable; the top
// `trainable_top_blocks` encoder blocks are trainable; embeddings train only
// when every block does and `train_embeddings` is set.
struct FreezeMask {
  std::size_t trainable_top_blocks = 0;
  bool head_always_trainable = true;
  bool train_embeddings = false;

  static FreezeMask baseline() { return {}; }
  static FreezeMask deep(std::size_t n_layers) { return {n_layers, true, false}; }
  static FreezeMask everything(std::size_t num_blocks) { return {num_blocks, true, true}; }

  void validate(const ModelConfig& cfg) const;
  bool trainable(const ParamGroup& g, std::size_t num_blocks) const;
};

// Gradient buffers for the trainable tensors only.
class Gradients {
 public:
  Gradients(Parameters buffers, std::vector<bool> present)
      : buffers_(std::move(buffers)), present_(std::move(present)) {}

  // Null for frozen tensors.
  const Matrix* find(std::string_view name) const;
  bool has(std::string_view name) const { return find(name) != nullptr; }
  const Parameters& buffers() const { return buffers_; }
  const std::vector<bool>& present() const { return present_; }
  std::vector<std::string> names() const;

 private:
  Parameters buffers_;
  std::vector<bool> present_;
};

struct LayerNormCache {
  Matrix xhat;
  Eigen::VectorXd rstd;
};

struct BlockCache {
  Matrix x_in, a, q, k, v, o, h, c, f1, g;
  LayerNormCache ln1, ln2;
  std::vector<Matrix> probs;  // per head, length x length
  Matrix attn_mask, ffn_mask;  // dropout scales; empty when dropout is off
};

struct SequenceCache {
  std::vector<TokenId> ids;  // without trailing padding
  Matrix embed_mask;
  std::vector<BlockCache> blocks;
  LayerNormCache final_ln;  // [CLS] row only
  Matrix cls;               // 1 x d, after the final norm
};

struct ForwardPass {
  Matrix logits;  // batch x classes
  std::vector<SequenceCache> rows;
};

// Dropout is active only when a stream is supplied.
struct DropoutStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Throws ConfigError on shape mismatches, token ids outside the vocabulary,
// non-trailing padding or sequences longer than max_positions.
ForwardPass forward(const Parameters& params, const ModelConfig& cfg, const Batch& batch,
                    std::optional<DropoutStream> dropout = std::nullopt);

struct LossAndGrads {
  double loss = 0.0;
  Gradients grads;
};

// Mean cross-entropy and its gradients for the tensors the mask selects.
// Throws NumericError (naming `batch_id`) on a non-finite loss.
LossAndGrads loss_and_grads(const ForwardPass& pass, std::span<const int> labels,
                            const Parameters& params, const ModelConfig& cfg,
                            const FreezeMask& mask, std::size_t batch_id = 0);

double cross_entropy(const Matrix& logits, std::span<const int> labels);

// Row-wise argmax; ties resolve to class 0.
std::vector<int> predict_labels(const Matrix& logits);

// Parameters plus everything needed to turn raw text into predictions.
struct TextClassifier {
  ModelConfig model;
  TokenizerConfig tokenizer;
  Vocabulary vocab;
  Parameters params;

  Matrix logits(const std::vector<std::string>& texts, std::size_t batch_size = 64) const;
  std::vector<int> predict(const std::vector<std::string>& texts, std::size_t batch_size = 64) const;
};

}  // namespace biaslex
