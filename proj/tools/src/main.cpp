#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "biaslex/augmentation.hpp"
#include "biaslex/checkpoint.hpp"
#include "biaslex/corpus.hpp"
#include "biaslex/error.hpp"
#include "biaslex/evaluation.hpp"
#include "biaslex/experiment.hpp"
#include "biaslex/split.hpp"
#include "biaslex/text_prep.hpp"
#include "manifest.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace biaslex;
using biaslex::cli::RunConfig;
using biaslex::cli::RunManifest;

namespace {

// Process exit codes.
enum Exit : int {
  kOk = 0,
  kViolations = 1,
  kUsage = 2,
  kConfig = 3,
  kData = 4,
  kNumeric = 5,
  kIo = 6,
  kInternal = 7,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::vector<std::string> data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string dict_bias;
  std::string dict_general;
  std::string stopwords;
  std::string checkpoint;
};

struct Context {
  std::string command;
  Options opt;
  RunConfig cfg;
  fs::path out;
  RunManifest manifest;

  fs::path output(const std::string& name) {
    const fs::path p = out / name;
    manifest.outputs.push_back(p);
    return p;
  }
};

fs::path absolute(const std::string& p) { return fs::absolute(p).lexically_normal(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

const fs::path& single_data(const Context& ctx) {
  static fs::path p;
  if (ctx.opt.data.size() != 1) throw UsageError(ctx.command + " takes exactly one --data input");
  p = absolute(ctx.opt.data.front());
  return p;
}

LoadedDataset load_decisions(Context& ctx) {
  const fs::path& path = single_data(ctx);
  ctx.manifest.inputs.push_back(path);
  return load_dataset(path);
}

std::vector<Chunk> load_chunk_file(Context& ctx) {
  const fs::path& path = single_data(ctx);
  ctx.manifest.inputs.push_back(path);
  return read_chunks(path);
}

void ensure_clean_text(Decision& d, const CleaningConfig& cleaning) {
  if (!d.clean_text) d.clean_text = clean(d.raw_text, cleaning);
}

TextClassifier load_classifier(Context& ctx) {
  if (ctx.opt.checkpoint.empty()) throw UsageError(ctx.command + " requires --checkpoint");
  const fs::path path = absolute(ctx.opt.checkpoint);
  ctx.manifest.inputs.push_back(path);
  return load_checkpoint(path).classifier;
}

nlohmann::ordered_json confusion_json(const ConfusionMatrix& cm) {
  const auto p = cm.percent();
  nlohmann::ordered_json j = {{"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}, {"tp", cm.tp}};
  j["percent"] = {{"tn", p.tn}, {"fp", p.fp}, {"fn", p.fn}, {"tp", p.tp}};
  return j;
}

std::string confusion_text(const ConfusionMatrix& cm) {
  const auto p = cm.percent();
  std::ostringstream os;
  os << "confusion matrix (%)\n"
     << "                    pred. non-biased  pred. biased\n"
     << "actual non-biased   " << std::setw(16) << format_percent(p.tn) << std::setw(14) << format_percent(p.fp) << "\n"
     << "actual biased       " << std::setw(16) << format_percent(p.fn) << std::setw(14) << format_percent(p.tp) << "\n";
  return os.str();
}

// --- subcommands -----------------------------------------------------------

int cmd_clean(Context& ctx) {
  auto ds = load_decisions(ctx);
  for (auto& d : ds.decisions) d.clean_text = clean(d.raw_text, ctx.cfg.cleaning);
  save_dataset(ds.decisions, ds.manifest.tag, ctx.output("clean.json"));
  std::cerr << "cleaned " << ds.decisions.size() << " decisions\n";
  return kOk;
}

int cmd_segment(Context& ctx) {
  auto ds = load_decisions(ctx);
  std::string lines;
  std::size_t total = 0;
  for (auto& d : ds.decisions) {
    ensure_clean_text(d, ctx.cfg.cleaning);
    for (const auto& s : segment(*d.clean_text, ctx.cfg.chunking.segmentation)) {
      nlohmann::ordered_json j = {{"decision_id", d.id},
                                  {"index", s.index},
                                  {"terminator", std::string(to_string(s.terminator))},
                                  {"text", s.text}};
      lines += j.dump() + "\n";
      ++total;
    }
  }
  write_text(ctx.output("sentences.jsonl"), lines);
  std::cerr << "wrote " << total << " sentences\n";
  return kOk;
}

int cmd_chunk(Context& ctx) {
  auto ds = load_decisions(ctx);
  std::vector<Chunk> all;
  for (auto& d : ds.decisions) {
    ensure_clean_text(d, ctx.cfg.cleaning);
    auto chunks = training_chunks(d, ctx.cfg.chunking, ctx.cfg.cleaning);
    all.insert(all.end(), chunks.begin(), chunks.end());
  }
  write_chunks(all, ctx.output("chunks.jsonl"));
  std::size_t b = 0, n = 0, u = 0;
  for (const auto& c : all) {
    (c.label == ChunkLabel::biased ? b : c.label == ChunkLabel::non_biased ? n : u)++;
  }
  std::cerr << "wrote " << all.size() << " chunks (" << b << " biased, " << n << " non_biased, " << u
            << " unlabeled)\n";
  return kOk;
}

int cmd_validate(Context& ctx) {
  const auto ds = load_decisions(ctx);
  std::string listing;
  for (const auto& v : ds.violations) listing += format_violation(v) + "\n";
  std::cout << listing;
  if (!ctx.out.empty()) write_text(ctx.output("violations.txt"), listing);
  std::cerr << ds.decisions.size() << " decisions, " << ds.violations.size() << " violation(s)\n";
  return ds.violations.empty() ? kOk : kViolations;
}

int cmd_split(Context& ctx) {
  const auto chunks = load_chunk_file(ctx);
  const auto s = split(chunks, ctx.cfg.split);
  const std::array<std::pair<const char*, const std::vector<std::size_t>*>, 3> parts{
      {{"train.jsonl", &s.train}, {"val.jsonl", &s.val}, {"test.jsonl", &s.test}}};
  for (const auto& [name, idx] : parts) {
    std::vector<Chunk> subset;
    for (auto i : *idx) subset.push_back(chunks[i]);
    write_chunks(subset, ctx.output(name));
  }
  std::cerr << "split " << chunks.size() << " chunks into " << s.train.size() << "/" << s.val.size() << "/"
            << s.test.size() << "\n";
  return kOk;
}

int cmd_bias_dict(Context& ctx) {
  const auto chunks = load_chunk_file(ctx);
  const auto ranked = build_bias_dict(chunks, ctx.cfg.bias_dict_size, ctx.cfg.experiment.augmentation.stopwords);
  write_text(ctx.output("bias_dict_template.json"), bias_dict_template_json(ranked));
  std::cerr << "ranked " << ranked.size() << " words\n";
  return kOk;
}

ExperimentData load_split_dir(const fs::path& dir, Context& ctx) {
  ExperimentData d;
  const fs::path train = dir / "train.jsonl";
  const fs::path val = dir / "val.jsonl";
  for (const auto& p : {train, val}) {
    if (!fs::exists(p)) throw UsageError("input not found: " + p.string());
    ctx.manifest.inputs.push_back(p);
  }
  d.train = read_chunks(train);
  d.val = read_chunks(val);
  return d;
}

int cmd_train(Context& ctx) {
  const fs::path dir = single_data(ctx);
  if (!fs::is_directory(dir)) throw UsageError("train expects --data to be a split directory");
  const ExperimentData data = load_split_dir(dir, ctx);
  const ExperimentResult r = run_experiment(data, ctx.cfg.experiment);
  save_checkpoint(r.best, ctx.output("checkpoint.json"));
  render_report(r.report, ctx.out, "report");
  ctx.manifest.outputs.push_back(ctx.out / "report.json");
  ctx.manifest.outputs.push_back(ctx.out / "report.txt");
  std::cout << render_report_text(r.report);
  return kOk;
}

int cmd_grid(Context& ctx) {
  ctx.cfg.validate_grid();
  std::vector<GridDataset> datasets;
  for (const auto& spec : ctx.opt.data) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("grid --data takes NAME=DIR, got " + spec);
    GridDataset g;
    g.name = spec.substr(0, eq);
    g.tag = (g.name == "DVC" || g.name == "PAC") ? parse_dataset_tag(g.name) : ctx.cfg.experiment.dataset;
    const fs::path dir = absolute(spec.substr(eq + 1));
    if (!fs::is_directory(dir)) throw UsageError("input not found: " + dir.string());
    g.data = load_split_dir(dir, ctx);
    datasets.push_back(std::move(g));
  }
  const auto rows = grid(datasets, ctx.cfg.grid, ctx.cfg.experiment);
  const std::string table = grid_table_text(rows);
  write_text(ctx.output("grid.txt"), table);
  write_text(ctx.output("grid.json"), grid_table_json(rows).dump(2) + "\n");
  std::cout << table;
  return kOk;
}

int cmd_evaluate(Context& ctx) {
  const TextClassifier model = load_classifier(ctx);
  const fs::path data = single_data(ctx);
  nlohmann::ordered_json j;
  std::string text;
  ConfusionMatrix cm;

  if (data.extension() == ".jsonl") {
    ctx.manifest.inputs.push_back(data);
    std::vector<std::string> texts;
    std::vector<int> gold;
    for (const auto& c : read_chunks(data)) {
      if (c.label == ChunkLabel::unlabeled) continue;
      texts.push_back(c.text);
      gold.push_back(c.label == ChunkLabel::biased ? 1 : 0);
    }
    if (texts.empty()) throw DataError("no labeled chunks to evaluate in " + data.string());
    cm = ConfusionMatrix::from_predictions(gold, model.predict(texts));
    j["granularity"] = "chunk";
  } else {
    auto ds = load_decisions(ctx);
    auto rows = nlohmann::ordered_json::array();
    std::vector<int> gold, pred;
    for (auto& d : ds.decisions) {
      ensure_clean_text(d, ctx.cfg.cleaning);
      const DecisionPrediction p = classify_decision(d, model, ctx.cfg.chunking);
      nlohmann::ordered_json row = {{"id", p.id}, {"label", std::string(to_string(p.label))}};
      auto chunk_labels = nlohmann::ordered_json::array();
      for (auto l : p.chunk_labels) chunk_labels.push_back(std::string(to_string(l)));
      row["chunk_labels"] = chunk_labels;
      if (is_annotated(d)) {
        const bool biased = is_biased(d);
        row["gold"] = biased ? "biased" : "non_biased";
        gold.push_back(biased ? 1 : 0);
        pred.push_back(p.label == DecisionLabel::biased ? 1 : 0);
      } else {
        row["gold"] = nullptr;
      }
      text += p.id + "\t" + std::string(to_string(p.label)) + "\n";
      rows.push_back(std::move(row));
    }
    cm = ConfusionMatrix::from_predictions(gold, pred);
    j["granularity"] = "decision";
    j["decisions"] = std::move(rows);
  }

  j["confusion_matrix"] = confusion_json(cm);
  std::string summary;
  try {
    const double ba = balanced_accuracy(cm);
    j["balanced_accuracy"] = ba;
    summary = "balanced accuracy: " + format_percent(100.0 * ba) + "%\n";
  } catch (const UndefinedMetricError& e) {
    j["balanced_accuracy"] = nullptr;
    summary = std::string("balanced accuracy: undefined (") + e.what() + ")\n";
  }
  const std::string report = summary + confusion_text(cm) + (text.empty() ? "" : "\n" + text);
  write_text(ctx.output("evaluation.json"), j.dump(2) + "\n");
  write_text(ctx.output("evaluation.txt"), report);
  std::cout << summary << confusion_text(cm);
  return kOk;
}

int cmd_predict(Context& ctx) {
  const TextClassifier model = load_classifier(ctx);
  const fs::path data = single_data(ctx);
  ctx.manifest.inputs.push_back(data);
  std::vector<nlohmann::ordered_json> rows;
  std::vector<std::string> texts;
  if (data.extension() == ".jsonl") {
    for (const auto& c : read_chunks(data)) {
      rows.push_back({{"decision_id", c.decision_id}, {"range", {c.first, c.last}}});
      texts.push_back(c.text);
    }
  } else {
    std::ifstream in(data, std::ios::binary);
    if (!in) throw IoError("cannot open " + data.string());
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back({{"line", n}});
      texts.push_back(line);
    }
  }
  const Matrix logits = model.logits(texts);
  const auto labels = predict_labels(logits);
  std::string out;
  std::size_t biased = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i]["label"] = labels[i] ? "biased" : "non_biased";
    rows[i]["logits"] = {logits(static_cast<Eigen::Index>(i), 0), logits(static_cast<Eigen::Index>(i), 1)};
    out += rows[i].dump() + "\n";
    biased += labels[i] != 0;
  }
  write_text(ctx.output("predictions.jsonl"), out);
  std::cerr << "predicted " << rows.size() << " texts, " << biased << " biased\n";
  return kOk;
}

int cmd_report(Context& ctx) {
  const fs::path path = single_data(ctx);
  ctx.manifest.inputs.push_back(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
  const auto errors = validate_report_json(j);
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << path.string() << ": " << e << "\n";
    throw DataError("report " + path.string() + " does not match the report schema");
  }
  const MetricsReport r = report_from_json(j);
  render_report(r, ctx.out, "report");
  ctx.manifest.outputs.push_back(ctx.out / "report.json");
  ctx.manifest.outputs.push_back(ctx.out / "report.txt");
  std::cout << render_report_text(r);
  return kOk;
}

// --- wiring ----------------------------------------------------------------

struct Command {
  const char* name;
  const char* help;
  int (*run)(Context&);
  bool needs_out;
  bool uses_checkpoint;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"clean", "strip headers, signatures and noise characters from a decisions dataset", cmd_clean, true, false},
      {"segment", "split cleaned decisions into sentences", cmd_segment, true, false},
      {"chunk", "extract labeled training chunks from a decisions dataset", cmd_chunk, true, false},
      {"validate", "check a decisions dataset against its annotation schema", cmd_validate, false, false},
      {"split", "split a chunk file into train/val/test by decision", cmd_split, true, false},
      {"train", "train a classifier on a split directory", cmd_train, true, false},
      {"grid", "run the dataset x protocol x weight grid", cmd_grid, true, false},
      {"evaluate", "score a checkpoint on chunks or whole decisions", cmd_evaluate, true, true},
      {"predict", "label chunks or text lines with a checkpoint", cmd_predict, true, true},
      {"report", "validate and render a metrics report", cmd_report, true, false},
      {"bias-dict", "rank bias-associated words into a dictionary template", cmd_bias_dict, true, false},
  };
  return list;
}

void check_exists(const std::string& path, const char* what) {
  if (!path.empty() && !fs::exists(path)) {
    throw UsageError(std::string(what) + " not found: " + path);
  }
}

int run(const Command& command, Options opt) {
  Context ctx;
  ctx.command = command.name;
  ctx.opt = std::move(opt);
  const Options& o = ctx.opt;

  check_exists(o.config, "config file");
  check_exists(o.dict_bias, "bias dictionary");
  check_exists(o.dict_general, "general dictionary");
  check_exists(o.stopwords, "stopword file");
  check_exists(o.checkpoint, "checkpoint");
  if (ctx.command != "grid") {
    for (const auto& d : o.data) check_exists(d, "input");
  }
  if (o.data.empty()) throw UsageError(ctx.command + " requires --data");
  if (command.needs_out && o.out.empty()) throw UsageError(ctx.command + " requires --out");

  ctx.cfg = o.config.empty() ? RunConfig{} : cli::load_run_config(o.config);
  const fs::path cwd = fs::current_path();
  if (o.seed) ctx.cfg.set("seed", std::to_string(*o.seed), cwd);
  if (!o.dict_bias.empty()) ctx.cfg.set("dict_bias", o.dict_bias, cwd);
  if (!o.dict_general.empty()) ctx.cfg.set("dict_general", o.dict_general, cwd);
  if (!o.stopwords.empty()) ctx.cfg.set("stopwords", o.stopwords, cwd);
  ctx.cfg.finalize();

  if (!o.config.empty()) ctx.manifest.inputs.push_back(absolute(o.config));
  for (const auto* p : {&ctx.cfg.dict_bias, &ctx.cfg.dict_general, &ctx.cfg.stopwords,
                        &ctx.cfg.header_patterns, &ctx.cfg.signature_patterns}) {
    if (!p->empty()) ctx.manifest.inputs.push_back(*p);
  }

  if (!o.out.empty()) {
    ctx.out = absolute(o.out);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw IoError("cannot create output directory " + ctx.out.string() + ": " + ec.message());
  }

  ctx.manifest.command = ctx.command;
  ctx.manifest.seed = ctx.cfg.experiment.seed;
  ctx.manifest.config_text = ctx.cfg.effective_text();
  ctx.manifest.arguments = {ctx.command};
  for (const auto& d : o.data) {
    const auto eq = d.find('=');
    const bool named = ctx.command == "grid" && eq != std::string::npos;
    ctx.manifest.arguments.push_back("--data");
    ctx.manifest.arguments.push_back(named ? d.substr(0, eq + 1) + absolute(d.substr(eq + 1)).string()
                                           : absolute(d).string());
  }
  if (!o.checkpoint.empty()) {
    ctx.manifest.arguments.push_back("--checkpoint");
    ctx.manifest.arguments.push_back(absolute(o.checkpoint).string());
  }

  const int code = command.run(ctx);

  if (!ctx.out.empty()) {
    // Inputs are read before anything is written, but refuse to record a run
    // whose outputs landed on one of its inputs.
    for (const auto& out : ctx.manifest.outputs) {
      for (const auto& in : ctx.manifest.inputs) {
        if (fs::exists(in) && fs::equivalent(out, in)) {
          throw UsageError("output " + out.string() + " overwrote an input");
        }
      }
    }
    ctx.manifest.write(ctx.out);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biaslex: bias detection pipeline for judicial decisions"};
  app.set_version_flag("--version", BIASLEX_VERSION);
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--data", opt.data, c.name == std::string("grid") ? "split directory as NAME=DIR (repeatable)"
                                                                       : "input file or directory")
        ->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--config", opt.config, "key = value configuration file");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--dict-bias", opt.dict_bias, "bias synonym dictionary (JSON)");
    sub->add_option("--dict-general", opt.dict_general, "general synonym dictionary (JSON)");
    sub->add_option("--stopwords", opt.stopwords, "stopword list, one word per line");
    if (c.uses_checkpoint) sub->add_option("--checkpoint", opt.checkpoint, "model checkpoint")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const Command* selected = nullptr;
  for (const auto& c : commands()) {
    if (app.got_subcommand(c.name)) selected = &c;
  }
  if (app.get_subcommand(selected->name)->count("--seed") > 0) opt.seed = seed;

  try {
    return run(*selected, opt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const UndefinedMetricError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
