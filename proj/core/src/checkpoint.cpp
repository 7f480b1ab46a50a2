#include "biaslex/checkpoint.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "biaslex/error.hpp"

namespace biaslex {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "biaslex-checkpoint";

json model_config_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},       {"max_positions", c.max_positions},
          {"embed_dim", c.embed_dim},         {"num_heads", c.num_heads},
          {"num_blocks", c.num_blocks},       {"feedforward_dim", c.feedforward_dim},
          {"dropout_rate", c.dropout_rate},   {"num_classes", c.num_classes},
          {"layer_norm_eps", c.layer_norm_eps}};
}

ModelConfig model_config_from(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_positions = j.at("max_positions").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.num_heads = j.at("num_heads").get<std::size_t>();
  c.num_blocks = j.at("num_blocks").get<std::size_t>();
  c.feedforward_dim = j.at("feedforward_dim").get<std::size_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.layer_norm_eps = j.at("layer_norm_eps").get<double>();
  return c;
}

json tensor_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

void tensor_from(const json& j, Matrix& m, const std::string& name) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows != m.rows() || cols != m.cols()) {
    throw ConfigError("checkpoint tensor " + name + " has a shape inconsistent with its config");
  }
  const auto& data = j.at("data");
  if (data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("checkpoint tensor " + name + " has the wrong element count");
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
  }
}

json params_json(const Parameters& p) {
  json out = json::object();
  for (const auto& t : p.tensors()) out[t.name] = tensor_json(*t.tensor);
  return out;
}

void params_from(const json& j, Parameters& p) {
  for (auto& t : p.tensors()) {
    const auto it = j.find(t.name);
    if (it == j.end()) throw DataError("checkpoint is missing tensor " + t.name);
    tensor_from(*it, *t.tensor, t.name);
  }
  if (j.size() != p.tensors().size()) throw DataError("checkpoint has unexpected tensors");
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& c = ckpt.classifier;
  json root = {{"format", kFormat},
               {"version", kCheckpointVersion},
               {"model_config", model_config_json(c.model)},
               {"tokenizer_config",
                {{"max_tokens", c.tokenizer.max_tokens},
                 {"min_frequency", c.tokenizer.min_frequency},
                 {"case_preserving", c.tokenizer.case_preserving}}},
               {"vocab", c.vocab.words()},
               {"params", params_json(c.params)}};
  if (ckpt.optimizer) {
    root["optimizer"] = {{"step", ckpt.optimizer->step},
                         {"m", params_json(ckpt.optimizer->m)},
                         {"v", params_json(ckpt.optimizer->v)}};
  } else {
    root["optimizer"] = nullptr;
  }
  return root.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint parse error: ") + e.what(), 0);
  }
  try {
    if (root.at("format") != kFormat) throw DataError("not a biaslex checkpoint");
    if (root.at("version") != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version " + root.at("version").dump());
    }
    Checkpoint ckpt;
    auto& c = ckpt.classifier;
    c.model = model_config_from(root.at("model_config"));
    c.model.validate();
    const auto& tc = root.at("tokenizer_config");
    c.tokenizer.max_tokens = tc.at("max_tokens").get<std::size_t>();
    c.tokenizer.min_frequency = tc.at("min_frequency").get<std::size_t>();
    c.tokenizer.case_preserving = tc.at("case_preserving").get<bool>();
    c.tokenizer.validate();
    auto words = root.at("vocab").get<std::vector<std::string>>();
    if (words.size() < 3) throw DataError("checkpoint vocabulary lacks special tokens");
    c.vocab = Vocabulary::from_words(std::vector<std::string>(words.begin() + 3, words.end()));
    if (c.vocab.words() != words) throw DataError("checkpoint vocabulary is malformed");
    if (c.vocab.size() != c.model.vocab_size) {
      throw ConfigError("checkpoint vocabulary size does not match model_config.vocab_size");
    }
    // Shape template from the config; values come from the file.
    c.params = Parameters::zeros_like(Parameters::initialize(c.model, 0));
    params_from(root.at("params"), c.params);
    const auto& opt = root.at("optimizer");
    if (!opt.is_null()) {
      AdamState st = AdamState::for_params(c.params);
      st.step = opt.at("step").get<std::uint64_t>();
      params_from(opt.at("m"), st.m);
      params_from(opt.at("v"), st.v);
      ckpt.optimizer = std::move(st);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(ckpt);
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Checkpoint ckpt = parse_checkpoint(buf.str());
  if (expected && !(*expected == ckpt.classifier.model)) {
    throw ConfigError("checkpoint model configuration does not match the expected configuration");
  }
  return ckpt;
}

}  // namespace biaslex
