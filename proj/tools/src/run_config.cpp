#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "biaslex/augmentation.hpp"
#include "biaslex/error.hpp"

namespace biaslex::cli {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("config key " + std::string(key) + ": expected " + std::string(want) + ", got \"" +
                    std::string(value) + "\"");
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::size_t to_size(std::string_view key, std::string_view v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string num(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string num(std::uint64_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

fs::path resolve(std::string_view v, const fs::path& base) {
  if (v.empty()) return {};
  fs::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return fs::absolute(p).lexically_normal();
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value, const fs::path& base)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  Setter set;
  Getter get;
};

#define BL_SIZE(field) \
  Key{[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) { c.field = to_size(k, v); }, \
      [](const RunConfig& c) { return num(static_cast<std::uint64_t>(c.field)); }}
#define BL_REAL(field) \
  Key{[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) { c.field = to_double(k, v); }, \
      [](const RunConfig& c) { return num(c.field); }}
#define BL_BOOL(field) \
  Key{[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) { c.field = to_bool(k, v); }, \
      [](const RunConfig& c) { return flag(c.field); }}
#define BL_PATH(field) \
  Key{[](RunConfig& c, std::string_view, std::string_view v, const fs::path& base) { c.field = resolve(v, base); }, \
      [](const RunConfig& c) { return c.field.string(); }}

const std::map<std::string, Key, std::less<>>& keys() {
  static const std::map<std::string, Key, std::less<>> table = {
      {"name", {[](RunConfig& c, std::string_view, std::string_view v, const fs::path&) { c.experiment.name = v; },
                [](const RunConfig& c) { return c.experiment.name; }}},
      {"dataset", {[](RunConfig& c, std::string_view, std::string_view v, const fs::path&) {
                     try {
                       c.experiment.dataset = parse_dataset_tag(v);
                     } catch (const Error&) {
                       bad_value("dataset", v, "DVC or PAC");
                     }
                   },
                   [](const RunConfig& c) { return std::string(to_string(c.experiment.dataset)); }}},
      {"protocol", {[](RunConfig& c, std::string_view, std::string_view v, const fs::path&) {
                      c.experiment.protocol = parse_protocol(v);
                    },
                    [](const RunConfig& c) { return std::string(to_string(c.experiment.protocol)); }}},
      {"n_layers", BL_SIZE(experiment.n_layers)},
      {"train_embeddings", BL_BOOL(experiment.train_embeddings)},
      {"batch_size", BL_SIZE(experiment.batch_size)},
      {"epochs", BL_SIZE(experiment.epochs)},
      {"deep_learning_rate", BL_REAL(experiment.deep_learning_rate)},
      {"baseline_learning_rate", BL_REAL(experiment.baseline_learning_rate)},
      {"seed", {[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) { c.set_seed(to_u64(k, v)); },
                [](const RunConfig& c) { return num(c.experiment.seed); }}},
      {"eta_min", BL_REAL(experiment.optimizer.eta_min)},
      {"beta1", BL_REAL(experiment.optimizer.beta1)},
      {"beta2", BL_REAL(experiment.optimizer.beta2)},
      {"epsilon", BL_REAL(experiment.optimizer.epsilon)},
      {"weight_decay", BL_REAL(experiment.optimizer.weight_decay)},
      {"schedule_period", BL_SIZE(experiment.optimizer.schedule_period)},
      {"embed_dim", BL_SIZE(experiment.model.embed_dim)},
      {"num_heads", BL_SIZE(experiment.model.num_heads)},
      {"num_blocks", BL_SIZE(experiment.model.num_blocks)},
      {"feedforward_dim", BL_SIZE(experiment.model.feedforward_dim)},
      {"dropout_rate", BL_REAL(experiment.model.dropout_rate)},
      {"max_positions", BL_SIZE(experiment.model.max_positions)},
      {"max_tokens", BL_SIZE(experiment.tokenizer.max_tokens)},
      {"min_frequency", BL_SIZE(experiment.tokenizer.min_frequency)},
      {"case_preserving", BL_BOOL(experiment.tokenizer.case_preserving)},
      {"weight", BL_REAL(experiment.augmentation.weight)},
      {"oversample_biased", BL_REAL(experiment.augmentation.oversample_biased)},
      {"dict_bias", BL_PATH(dict_bias)},
      {"dict_general", BL_PATH(dict_general)},
      {"stopwords", BL_PATH(stopwords)},
      {"split_ratios", {[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) {
                          const auto parts = split_list(v);
                          if (parts.size() != 3) bad_value(k, v, "three comma-separated ratios");
                          for (std::size_t i = 0; i < 3; ++i) c.split.ratios[i] = to_double(k, parts[i]);
                        },
                        [](const RunConfig& c) {
                          return num(c.split.ratios[0]) + "," + num(c.split.ratios[1]) + "," + num(c.split.ratios[2]);
                        }}},
      {"stratify", BL_BOOL(split.stratify_on_label)},
      {"strip_headers", BL_BOOL(cleaning.strip_headers)},
      {"strip_signatures", BL_BOOL(cleaning.strip_signatures)},
      {"strip_special_chars", BL_BOOL(cleaning.strip_special_chars)},
      {"header_patterns", BL_PATH(header_patterns)},
      {"signature_patterns", BL_PATH(signature_patterns)},
      {"window", BL_SIZE(chunking.window)},
      {"word_budget", BL_SIZE(chunking.word_budget)},
      {"abbreviation_guard", BL_BOOL(chunking.segmentation.abbreviation_guard)},
      {"grid_weights", {[](RunConfig& c, std::string_view k, std::string_view v, const fs::path&) {
                          c.grid.weights.clear();
                          for (auto p : split_list(v)) c.grid.weights.push_back(to_double(k, p));
                        },
                        [](const RunConfig& c) {
                          std::string s;
                          for (std::size_t i = 0; i < c.grid.weights.size(); ++i) s += (i ? "," : "") + num(c.grid.weights[i]);
                          return s;
                        }}},
      {"grid_protocols", {[](RunConfig& c, std::string_view, std::string_view v, const fs::path&) {
                            c.grid.protocols.clear();
                            for (auto p : split_list(v)) c.grid.protocols.push_back(parse_protocol(p));
                          },
                          [](const RunConfig& c) {
                            std::string s;
                            for (std::size_t i = 0; i < c.grid.protocols.size(); ++i) {
                              s += (i ? "," : "") + std::string(to_string(c.grid.protocols[i]));
                            }
                            return s;
                          }}},
      {"grid_jobs", BL_SIZE(grid.jobs)},
      {"bias_dict_size", BL_SIZE(bias_dict_size)},
  };
  return table;
}

#undef BL_SIZE
#undef BL_REAL
#undef BL_BOOL
#undef BL_PATH

std::string read_text(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::vector<std::string> run_config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : keys()) out.push_back(k);
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value, const fs::path& base_dir) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw ConfigError("unknown config key \"" + std::string(key) + "\"");
  it->second.set(*this, key, value, base_dir);
  explicit_keys[std::string(key)] = std::string(value);
}

void RunConfig::set_seed(std::uint64_t seed) {
  experiment.seed = seed;
  experiment.augmentation.seed = seed;
  split.seed = seed;
}

void RunConfig::finalize() {
  auto given = [&](const char* k) { return explicit_keys.contains(k); };
  if (!given("schedule_period")) experiment.optimizer.schedule_period = experiment.epochs;
  if (!given("feedforward_dim")) experiment.model.feedforward_dim = 4 * experiment.model.embed_dim;
  if (!given("max_positions")) experiment.model.max_positions = experiment.tokenizer.max_tokens;

  try {
    if (!dict_bias.empty()) experiment.augmentation.bias_dict = load_dictionary(dict_bias);
    if (!dict_general.empty()) experiment.augmentation.general_dict = load_dictionary(dict_general);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  if (!stopwords.empty()) experiment.augmentation.stopwords = parse_stopwords(read_text(stopwords, "stopword file"));
  if (!header_patterns.empty()) {
    cleaning.header_patterns = parse_pattern_file(read_text(header_patterns, "pattern file"));
  }
  if (!signature_patterns.empty()) {
    cleaning.signature_patterns = parse_pattern_file(read_text(signature_patterns, "pattern file"));
  }

  cleaning.validate();
  if (chunking.window == 0) throw ConfigError("window must be at least 1 sentence");
  if (chunking.word_budget == 0) throw ConfigError("word_budget must be positive");
  split.validate();
  experiment.validate();
  if (bias_dict_size == 0) throw ConfigError("bias_dict_size must be positive");
}

void RunConfig::validate_grid() const {
  if (grid.weights.empty() || grid.protocols.empty()) throw ConfigError("grid needs weights and protocols");
  for (double w : grid.weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("grid weights must be in [0, 1]");
    if (w > 0.0 && experiment.augmentation.stopwords.empty()) {
      throw ConfigError("a stopword list is required when a grid weight is positive");
    }
  }
  if (grid.jobs == 0) throw ConfigError("grid_jobs must be at least 1");
}

std::string RunConfig::effective_text() const {
  std::string out;
  for (const auto& [k, key] : keys()) out += k + " = " + key.get(*this) + "\n";
  return out;
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (cfg.explicit_keys.contains(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key \"" + std::string(key) + "\"");
    }
    try {
      cfg.set(key, trim(line.substr(eq + 1)), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_text(path, "config file"), fs::absolute(path).parent_path());
}

}  // namespace biaslex::cli
