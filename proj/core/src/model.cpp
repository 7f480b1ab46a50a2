#include "biaslex/model.hpp"

#include <algorithm>
#include <cmath>

#include "biaslex/error.hpp"
#include "biaslex/rng.hpp"

namespace biaslex {
namespace {

constexpr double kInitStd = 0.02;
constexpr double kGeluC = 0.79788456080286535588;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

Matrix truncated_normal(Eigen::Index rows, Eigen::Index cols, SeededStream& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double z = rng.normal();
      while (std::abs(z) > 2.0) z = rng.normal();
      m(i, j) = kInitStd * z;
    }
  }
  return m;
}

Matrix row_zeros(std::size_t n) { return Matrix::Zero(1, static_cast<Eigen::Index>(n)); }
Matrix row_ones(std::size_t n) { return Matrix::Ones(1, static_cast<Eigen::Index>(n)); }

template <typename P, typename M>
std::vector<TensorRef<M>> collect(P& p) {
  using G = ParamGroup;
  std::vector<TensorRef<M>> out;
  out.push_back({"embed.token", {G::Kind::embedding, 0}, &p.token_embedding});
  out.push_back({"embed.position", {G::Kind::embedding, 0}, &p.position_embedding});
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    auto& blk = p.blocks[b];
    const std::string pre = "block" + std::to_string(b) + ".";
    const G g{G::Kind::block, b};
    out.push_back({pre + "ln1.gain", g, &blk.ln1_gain});
    out.push_back({pre + "ln1.bias", g, &blk.ln1_bias});
    out.push_back({pre + "attn.wq", g, &blk.wq});
    out.push_back({pre + "attn.bq", g, &blk.bq});
    out.push_back({pre + "attn.wk", g, &blk.wk});
    out.push_back({pre + "attn.bk", g, &blk.bk});
    out.push_back({pre + "attn.wv", g, &blk.wv});
    out.push_back({pre + "attn.bv", g, &blk.bv});
    out.push_back({pre + "attn.wo", g, &blk.wo});
    out.push_back({pre + "attn.bo", g, &blk.bo});
    out.push_back({pre + "ln2.gain", g, &blk.ln2_gain});
    out.push_back({pre + "ln2.bias", g, &blk.ln2_bias});
    out.push_back({pre + "ffn.w1", g, &blk.w1});
    out.push_back({pre + "ffn.b1", g, &blk.b1});
    out.push_back({pre + "ffn.w2", g, &blk.w2});
    out.push_back({pre + "ffn.b2", g, &blk.b2});
  }
  out.push_back({"head.ln.gain", {G::Kind::head, 0}, &p.final_ln_gain});
  out.push_back({"head.ln.bias", {G::Kind::head, 0}, &p.final_ln_bias});
  out.push_back({"head.weight", {G::Kind::head, 0}, &p.head_weight});
  out.push_back({"head.bias", {G::Kind::head, 0}, &p.head_bias});
  return out;
}

// Row-wise layer norm. Returns gain * xhat + bias.
Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps,
                  LayerNormCache& cache) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  cache.xhat.resize(n, x.cols());
  cache.rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).sum() / d;
    const auto centered = x.row(i).array() - mean;
    const double var = centered.square().sum() / d;
    const double rstd = 1.0 / std::sqrt(var + eps);
    cache.rstd(i) = rstd;
    cache.xhat.row(i) = centered * rstd;
  }
  Matrix y = cache.xhat.array().rowwise() * gain.row(0).array();
  y.rowwise() += bias.row(0);
  return y;
}

// Accumulates gain/bias gradients (when requested) and returns dx.
Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache, const Matrix& gain,
                           Matrix* dgain, Matrix* dbias) {
  if (dgain) *dgain += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  if (dbias) *dbias += dy.colwise().sum();
  const double d = static_cast<double>(dy.cols());
  Matrix dxhat = dy.array().rowwise() * gain.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double mean_dxhat = dxhat.row(i).sum() / d;
    const double mean_dxhat_xhat = (dxhat.row(i).array() * cache.xhat.row(i).array()).sum() / d;
    dx.row(i) = cache.rstd(i) *
                (dxhat.row(i).array() - mean_dxhat - cache.xhat.row(i).array() * mean_dxhat_xhat)
                    .matrix();
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, SeededStream& rng) {
  Matrix m(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.bernoulli(rate) ? 0.0 : keep_scale;
  }
  return m;
}

void check_shapes(const Parameters& p, const ModelConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(cfg.embed_dim);
  const auto f = static_cast<Eigen::Index>(cfg.feedforward_dim);
  const auto c = static_cast<Eigen::Index>(cfg.num_classes);
  auto expect = [](const Matrix& m, Eigen::Index r, Eigen::Index k, const char* what) {
    if (m.rows() != r || m.cols() != k) {
      throw ConfigError(std::string("parameter shape mismatch for ") + what);
    }
  };
  expect(p.token_embedding, static_cast<Eigen::Index>(cfg.vocab_size), d, "token embedding");
  expect(p.position_embedding, static_cast<Eigen::Index>(cfg.max_positions), d, "position embedding");
  if (p.blocks.size() != cfg.num_blocks) throw ConfigError("parameter block count mismatch");
  for (const auto& b : p.blocks) {
    expect(b.wq, d, d, "wq");
    expect(b.wk, d, d, "wk");
    expect(b.wv, d, d, "wv");
    expect(b.wo, d, d, "wo");
    expect(b.w1, d, f, "w1");
    expect(b.w2, f, d, "w2");
  }
  expect(p.head_weight, d, c, "head weight");
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size < 3) throw ConfigError("vocab_size must include the special tokens");
  if (max_positions == 0 || embed_dim == 0 || num_heads == 0 || feedforward_dim == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (embed_dim % num_heads != 0) throw ConfigError("embed_dim must be divisible by num_heads");
  if (num_classes != 2) throw ConfigError("the classifier is binary");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0, 1)");
}

Parameters Parameters::initialize(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SeededStream rng(seed, 0x1d1e);
  const auto d = static_cast<Eigen::Index>(cfg.embed_dim);
  const auto f = static_cast<Eigen::Index>(cfg.feedforward_dim);
  Parameters p;
  p.token_embedding = truncated_normal(static_cast<Eigen::Index>(cfg.vocab_size), d, rng);
  p.position_embedding = truncated_normal(static_cast<Eigen::Index>(cfg.max_positions), d, rng);
  for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
    BlockParams blk;
    blk.ln1_gain = row_ones(cfg.embed_dim);
    blk.ln1_bias = row_zeros(cfg.embed_dim);
    blk.wq = truncated_normal(d, d, rng);
    blk.bq = row_zeros(cfg.embed_dim);
    blk.wk = truncated_normal(d, d, rng);
    blk.bk = row_zeros(cfg.embed_dim);
    blk.wv = truncated_normal(d, d, rng);
    blk.bv = row_zeros(cfg.embed_dim);
    blk.wo = truncated_normal(d, d, rng);
    blk.bo = row_zeros(cfg.embed_dim);
    blk.ln2_gain = row_ones(cfg.embed_dim);
    blk.ln2_bias = row_zeros(cfg.embed_dim);
    blk.w1 = truncated_normal(d, f, rng);
    blk.b1 = row_zeros(cfg.feedforward_dim);
    blk.w2 = truncated_normal(f, d, rng);
    blk.b2 = row_zeros(cfg.embed_dim);
    p.blocks.push_back(std::move(blk));
  }
  p.final_ln_gain = row_ones(cfg.embed_dim);
  p.final_ln_bias = row_zeros(cfg.embed_dim);
  p.head_weight = truncated_normal(d, static_cast<Eigen::Index>(cfg.num_classes), rng);
  p.head_bias = row_zeros(cfg.num_classes);
  return p;
}

Parameters Parameters::zeros_like(const Parameters& p) {
  Parameters z = p;
  for (auto& t : z.tensors()) t.tensor->setZero();
  return z;
}

std::vector<TensorRef<Matrix>> Parameters::tensors() { return collect<Parameters, Matrix>(*this); }

std::vector<TensorRef<const Matrix>> Parameters::tensors() const {
  return collect<const Parameters, const Matrix>(*this);
}

bool operator==(const Parameters& a, const Parameters& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const Matrix& x = *ta[i].tensor;
    const Matrix& y = *tb[i].tensor;
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    // Bitwise comparison via exact equality of every element.
    if (!(x.array() == y.array()).all()) return false;
  }
  return true;
}

void FreezeMask::validate(const ModelConfig& cfg) const {
  if (trainable_top_blocks > cfg.num_blocks) {
    throw ConfigError("trainable_top_blocks exceeds the number of encoder blocks");
  }
}

bool FreezeMask::trainable(const ParamGroup& g, std::size_t num_blocks) const {
  switch (g.kind) {
    case ParamGroup::Kind::head:
      return head_always_trainable;
    case ParamGroup::Kind::block:
      return g.block + trainable_top_blocks >= num_blocks;
    case ParamGroup::Kind::embedding:
      return train_embeddings && trainable_top_blocks == num_blocks;
  }
  return false;
}

const Matrix* Gradients::find(std::string_view name) const {
  const auto refs = buffers_.tensors();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].name == name) return present_[i] ? refs[i].tensor : nullptr;
  }
  return nullptr;
}

std::vector<std::string> Gradients::names() const {
  std::vector<std::string> out;
  const auto refs = buffers_.tensors();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (present_[i]) out.push_back(refs[i].name);
  }
  return out;
}

ForwardPass forward(const Parameters& params, const ModelConfig& cfg, const Batch& batch,
                    std::optional<DropoutStream> dropout) {
  cfg.validate();
  check_shapes(params, cfg);
  const auto d = static_cast<Eigen::Index>(cfg.embed_dim);
  const auto heads = static_cast<Eigen::Index>(cfg.num_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool use_dropout = dropout.has_value() && cfg.dropout_rate > 0.0;
  std::optional<SeededStream> rng;
  if (use_dropout) rng.emplace(dropout->seed, dropout->stream);

  ForwardPass out;
  out.logits.resize(static_cast<Eigen::Index>(batch.ids.size()),
                    static_cast<Eigen::Index>(cfg.num_classes));
  out.rows.resize(batch.ids.size());

  for (std::size_t r = 0; r < batch.ids.size(); ++r) {
    const auto& row = batch.ids[r];
    if (row.size() != batch.length) throw ConfigError("batch rows must share the padded length");
    std::size_t len = row.size();
    while (len > 0 && row[len - 1] == Vocabulary::kPad) --len;
    if (len == 0) throw ConfigError("a sequence must contain at least the [CLS] token");
    if (len > cfg.max_positions) throw ConfigError("sequence longer than max_positions");
    SequenceCache& sc = out.rows[r];
    sc.ids.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(len));
    const auto L = static_cast<Eigen::Index>(len);

    Matrix x(L, d);
    for (Eigen::Index i = 0; i < L; ++i) {
      const TokenId id = sc.ids[static_cast<std::size_t>(i)];
      if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
        throw ConfigError("token id outside the vocabulary");
      }
      if (id == Vocabulary::kPad) throw ConfigError("padding must be trailing");
      x.row(i) = params.token_embedding.row(id) + params.position_embedding.row(i);
    }
    if (use_dropout) {
      sc.embed_mask = dropout_mask(L, d, cfg.dropout_rate, *rng);
      x = x.cwiseProduct(sc.embed_mask);
    }

    sc.blocks.resize(cfg.num_blocks);
    for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
      const BlockParams& p = params.blocks[b];
      BlockCache& bc = sc.blocks[b];
      bc.x_in = x;
      bc.a = layer_norm(x, p.ln1_gain, p.ln1_bias, cfg.layer_norm_eps, bc.ln1);
      bc.q = affine(bc.a, p.wq, p.bq);
      bc.k = affine(bc.a, p.wk, p.bk);
      bc.v = affine(bc.a, p.wv, p.bv);
      bc.o.resize(L, d);
      bc.probs.resize(cfg.num_heads);
      for (Eigen::Index h = 0; h < heads; ++h) {
        const auto qh = bc.q.middleCols(h * dh, dh);
        const auto kh = bc.k.middleCols(h * dh, dh);
        const auto vh = bc.v.middleCols(h * dh, dh);
        Matrix s = (qh * kh.transpose()) * scale;
        for (Eigen::Index i = 0; i < L; ++i) {
          const double mx = s.row(i).maxCoeff();
          s.row(i) = (s.row(i).array() - mx).exp().matrix();
          s.row(i) /= s.row(i).sum();
        }
        bc.o.middleCols(h * dh, dh) = s * vh;
        bc.probs[static_cast<std::size_t>(h)] = std::move(s);
      }
      Matrix attn = affine(bc.o, p.wo, p.bo);
      if (use_dropout) {
        bc.attn_mask = dropout_mask(L, d, cfg.dropout_rate, *rng);
        attn = attn.cwiseProduct(bc.attn_mask);
      }
      bc.h = x + attn;
      bc.c = layer_norm(bc.h, p.ln2_gain, p.ln2_bias, cfg.layer_norm_eps, bc.ln2);
      bc.f1 = affine(bc.c, p.w1, p.b1);
      bc.g = bc.f1.unaryExpr([](double v) { return gelu(v); });
      Matrix f2 = affine(bc.g, p.w2, p.b2);
      if (use_dropout) {
        bc.ffn_mask = dropout_mask(L, d, cfg.dropout_rate, *rng);
        f2 = f2.cwiseProduct(bc.ffn_mask);
      }
      x = bc.h + f2;
    }

    sc.cls = layer_norm(x.topRows(1), params.final_ln_gain, params.final_ln_bias,
                        cfg.layer_norm_eps, sc.final_ln);
    out.logits.row(static_cast<Eigen::Index>(r)) = sc.cls * params.head_weight + params.head_bias;
  }
  return out;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw ConfigError("label count does not match the batch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) throw ConfigError("labels must be 0 or 1");
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    total += lse - logits(i, y);
  }
  return logits.rows() == 0 ? 0.0 : total / static_cast<double>(logits.rows());
}

LossAndGrads loss_and_grads(const ForwardPass& pass, std::span<const int> labels,
                            const Parameters& params, const ModelConfig& cfg,
                            const FreezeMask& mask, std::size_t batch_id) {
  mask.validate(cfg);
  const double loss = cross_entropy(pass.logits, labels);
  if (!std::isfinite(loss)) {
    throw NumericError("non-finite loss in batch " + std::to_string(batch_id));
  }

  Parameters grads = Parameters::zeros_like(params);
  const std::size_t B = cfg.num_blocks;
  const bool train_head = mask.trainable({ParamGroup::Kind::head, 0}, B);
  const bool train_embed = mask.trainable({ParamGroup::Kind::embedding, 0}, B);
  std::vector<bool> train_block(B);
  for (std::size_t b = 0; b < B; ++b) train_block[b] = mask.trainable({ParamGroup::Kind::block, b}, B);
  // Backprop stops below the lowest trainable tensor.
  std::size_t lowest = B;
  for (std::size_t b = 0; b < B; ++b) {
    if (train_block[b]) {
      lowest = b;
      break;
    }
  }
  if (train_embed) lowest = 0;
  const bool need_encoder = lowest < B || train_embed;

  const auto d = static_cast<Eigen::Index>(cfg.embed_dim);
  const auto heads = static_cast<Eigen::Index>(cfg.num_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double inv_n = 1.0 / static_cast<double>(pass.logits.rows());

  for (std::size_t r = 0; r < pass.rows.size(); ++r) {
    const SequenceCache& sc = pass.rows[r];
    const auto ri = static_cast<Eigen::Index>(r);
    // Softmax minus one-hot, averaged over the batch.
    Eigen::RowVectorXd prob = pass.logits.row(ri);
    prob = (prob.array() - prob.maxCoeff()).exp().matrix();
    prob /= prob.sum();
    Eigen::RowVectorXd dlogit = prob;
    dlogit(labels[r]) -= 1.0;
    dlogit *= inv_n;

    if (train_head) {
      grads.head_weight += sc.cls.transpose() * dlogit;
      grads.head_bias += dlogit;
    }
    if (!need_encoder) {
      // The final norm is part of the head; its gradients still need dcls.
      if (train_head) {
        const Matrix dcls = dlogit * params.head_weight.transpose();
        layer_norm_backward(dcls, sc.final_ln, params.final_ln_gain, &grads.final_ln_gain,
                            &grads.final_ln_bias);
      }
      continue;
    }
    const Matrix dcls = dlogit * params.head_weight.transpose();
    const auto L = static_cast<Eigen::Index>(sc.ids.size());
    Matrix dx = Matrix::Zero(L, d);
    dx.topRows(1) = layer_norm_backward(dcls, sc.final_ln, params.final_ln_gain,
                                        train_head ? &grads.final_ln_gain : nullptr,
                                        train_head ? &grads.final_ln_bias : nullptr);

    for (std::size_t bi = B; bi-- > lowest;) {
      const BlockParams& p = params.blocks[bi];
      const BlockCache& bc = sc.blocks[bi];
      BlockParams& g = grads.blocks[bi];
      const bool tr = train_block[bi];

      // Feed-forward branch.
      Matrix df2 = dx;
      if (bc.ffn_mask.size() != 0) df2 = df2.cwiseProduct(bc.ffn_mask);
      if (tr) {
        g.w2 += bc.g.transpose() * df2;
        g.b2 += df2.colwise().sum();
      }
      Matrix df1 = (df2 * p.w2.transpose()).cwiseProduct(
          bc.f1.unaryExpr([](double v) { return gelu_grad(v); }));
      if (tr) {
        g.w1 += bc.c.transpose() * df1;
        g.b1 += df1.colwise().sum();
      }
      const Matrix dc = df1 * p.w1.transpose();
      Matrix dh_total = dx + layer_norm_backward(dc, bc.ln2, p.ln2_gain, tr ? &g.ln2_gain : nullptr,
                                                 tr ? &g.ln2_bias : nullptr);

      // Attention branch.
      Matrix dattn = dh_total;
      if (bc.attn_mask.size() != 0) dattn = dattn.cwiseProduct(bc.attn_mask);
      if (tr) {
        g.wo += bc.o.transpose() * dattn;
        g.bo += dattn.colwise().sum();
      }
      const Matrix d_o = dattn * p.wo.transpose();
      Matrix dq(L, d), dk(L, d), dv(L, d);
      for (Eigen::Index h = 0; h < heads; ++h) {
        const Matrix& P = bc.probs[static_cast<std::size_t>(h)];
        const auto doh = d_o.middleCols(h * dh, dh);
        const auto qh = bc.q.middleCols(h * dh, dh);
        const auto kh = bc.k.middleCols(h * dh, dh);
        const auto vh = bc.v.middleCols(h * dh, dh);
        const Matrix dP = doh * vh.transpose();
        dv.middleCols(h * dh, dh) = P.transpose() * doh;
        const Eigen::VectorXd row_dot = (dP.array() * P.array()).rowwise().sum();
        Matrix dS = P.array() * (dP.array().colwise() - row_dot.array());
        dS *= scale;
        dq.middleCols(h * dh, dh) = dS * kh;
        dk.middleCols(h * dh, dh) = dS.transpose() * qh;
      }
      if (tr) {
        g.wq += bc.a.transpose() * dq;
        g.bq += dq.colwise().sum();
        g.wk += bc.a.transpose() * dk;
        g.bk += dk.colwise().sum();
        g.wv += bc.a.transpose() * dv;
        g.bv += dv.colwise().sum();
      }
      const Matrix da = dq * p.wq.transpose() + dk * p.wk.transpose() + dv * p.wv.transpose();
      dx = dh_total + layer_norm_backward(da, bc.ln1, p.ln1_gain, tr ? &g.ln1_gain : nullptr,
                                          tr ? &g.ln1_bias : nullptr);
    }

    if (train_embed) {
      if (sc.embed_mask.size() != 0) dx = dx.cwiseProduct(sc.embed_mask);
      for (Eigen::Index i = 0; i < L; ++i) {
        grads.token_embedding.row(sc.ids[static_cast<std::size_t>(i)]) += dx.row(i);
        grads.position_embedding.row(i) += dx.row(i);
      }
    }
  }

  std::vector<bool> present;
  for (const auto& t : grads.tensors()) present.push_back(mask.trainable(t.group, B));
  for (const auto& t : grads.tensors()) {
    if (!t.tensor->allFinite()) {
      throw NumericError("non-finite gradient for " + t.name + " in batch " + std::to_string(batch_id));
    }
  }
  return {loss, Gradients(std::move(grads), std::move(present))};
}

std::vector<int> predict_labels(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = logits(i, 1) > logits(i, 0) ? 1 : 0;
  }
  return out;
}

Matrix TextClassifier::logits(const std::vector<std::string>& texts, std::size_t batch_size) const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  Matrix out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(model.num_classes));
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    std::vector<std::vector<TokenId>> seqs;
    for (std::size_t i = start; i < end; ++i) seqs.push_back(tokenize(texts[i], vocab, tokenizer));
    const ForwardPass pass = forward(params, model, pad_batch(std::move(seqs)));
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) =
        pass.logits;
  }
  return out;
}

std::vector<int> TextClassifier::predict(const std::vector<std::string>& texts,
                                         std::size_t batch_size) const {
  return predict_labels(logits(texts, batch_size));
}

}  // namespace biaslex
