// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "biaslex/augmentation.hpp"
#include "biaslex/corpus.hpp"
#include "biaslex/error.hpp"
#include "biaslex/evaluation.hpp"
#include "biaslex/experiment.hpp"
#include "biaslex/log.hpp"
#include "biaslex/model.hpp"
#include "biaslex/optimizer.hpp"
#include "biaslex/split.hpp"
#include "biaslex/text_prep.hpp"
#include "run_config.hpp"
#include "test_support.hpp"

using namespace biaslex;
using biaslex::fixtures::Gen;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure; later checks still run but keep the message.
struct Checker {
  Outcome o;
  void require(bool ok, const std::string& what) {
    if (!ok && o.pass) {
      o.pass = false;
      o.detail = what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- gradient oracle ---------------------------------------------------------

Outcome gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelConfig cfg;
  cfg.vocab_size = 10;
  cfg.max_positions = 8;
  cfg.embed_dim = 8;
  cfg.num_heads = 2;
  cfg.num_blocks = 1;
  cfg.feedforward_dim = 32;
  cfg.dropout_rate = 0.0;
  Parameters params = Parameters::initialize(cfg, 2024);
  Gen g(2024, 1);
  for (auto& t : params.tensors()) {
    const double centre = t.name.find("gain") != std::string::npos ? 1.0 : 0.0;
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) t.tensor->data()[i] = centre + g.real(-0.6, 0.6);
  }
  const Batch batch = pad_batch({{2, 3, 4, 5}, {2, 6, 7}, {2, 8, 9, 3, 1, 5}});
  const std::vector<int> labels = {0, 1, 1};
  const auto lg = loss_and_grads(forward(params, cfg, batch), labels, params, cfg, FreezeMask::everything(1));

  Checker c;
  double worst = 0.0;
  std::size_t n = 0;
  for (auto& t : params.tensors()) {
    const Matrix* grad = lg.grads.find(t.name);
    c.require(grad != nullptr, "no gradient for " + t.name);
    if (!grad) continue;
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) {
      double& x = t.tensor->data()[i];
      const double saved = x;
      const double h = 1e-5;
      x = saved + h;
      const double up = cross_entropy(forward(params, cfg, batch).logits, labels);
      x = saved - h;
      const double down = cross_entropy(forward(params, cfg, batch).logits, labels);
      x = saved;
      const double fd = (up - down) / (2 * h);
      const double an = grad->data()[i];
      const double err = std::abs(an - fd);
      const double tol = std::max(1e-6, 1e-4 * std::max(std::abs(an), std::abs(fd)));
      worst = std::max(worst, err / tol);
      c.require(err <= tol, t.name + fmt(" analytic %.3e vs numeric %.3e", an, fd));
      ++n;
    }
  }
  const double secs = seconds_since(t0);
  c.require(secs < 30.0, fmt("took %.1f s", secs));
  if (c.o.pass) c.o.detail = std::to_string(n) + " scalars, worst error/tolerance " + fmt("%.3f, %.2f s", worst, secs);
  return c.o;
}

// --- optimizer and schedule --------------------------------------------------

Outcome optimizer_schedule() {
  Checker c;
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  Matrix theta = Matrix::Zero(1, 1), m = Matrix::Zero(1, 1), v = Matrix::Zero(1, 1);
  adamw_update(theta, Matrix::Ones(1, 1), m, v, 1, 0.1, cfg);
  const double expected = -0.1 / (1.0 + 1e-8);
  c.require(std::abs(theta(0, 0) - expected) <= 1e-9, fmt("adamw step %.12f", theta(0, 0)));

  OptimizerConfig s;
  s.learning_rate = 3e-4;
  s.eta_min = 0.0;
  s.schedule_period = 20;
  c.require(std::abs(cosine_lr(0, s) - 3e-4) <= 1e-12, "cosine t=0");
  c.require(std::abs(cosine_lr(20, s)) <= 1e-12, "cosine t=T");
  c.require(std::abs(cosine_lr(10, s) - 1.5e-4) <= 1e-12, "cosine t=T/2");
  if (c.o.pass) c.o.detail = fmt("theta=%.12f; lr(0,10,20)=%.1e,%.1e,", theta(0, 0), cosine_lr(0, s), cosine_lr(10, s)) +
                             fmt("%.1e", cosine_lr(20, s));
  return c.o;
}

// --- augmentation ------------------------------------------------------------

Outcome augmentation_contract() {
  Checker c;
  const std::vector<std::string> vocab = {"casa", "rua", "juiz", "pena", "laudo", "fato", "prova", "autos", "mulher"};
  AugmentationConfig cfg;
  cfg.stopwords = {"o", "a", "de"};
  for (const auto& w : vocab) cfg.general_dict.add(w, {w + "um", w + "dois"});

  Gen g(99);
  cfg.weight = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = g.raw_document();
    c.require(augment(text, i % 2 ? TextLabel::biased : TextLabel::non_biased, cfg, i) == text,
              "weight 0 changed text " + std::to_string(i));
  }

  auto text_of = [&](std::size_t n) {
    std::string s;
    for (std::size_t k = 0; k < n; ++k) s += (k ? " " : "") + g.pick(vocab);
    return s;
  };
  cfg.weight = 1.0;
  for (int i = 0; i < 200; ++i) {
    const std::string t = text_of(25);
    c.require(replacement_rate(t, augment(t, TextLabel::non_biased, cfg, i), cfg.stopwords) == 1.0,
              "weight 1 left a word");
  }

  cfg.weight = 0.3;
  std::size_t positions = 0;
  double changed = 0.0;
  std::vector<std::string> first_run;
  std::vector<std::string> inputs;
  for (std::uint64_t i = 0; positions < 12000; ++i) {
    const std::string t = text_of(50);
    const std::string out = augment(t, TextLabel::biased, cfg, i);
    inputs.push_back(t);
    first_run.push_back(out);
    changed += replacement_rate(t, out, cfg.stopwords) * 50.0;
    positions += 50;
  }
  const double rate = changed / static_cast<double>(positions);
  const double sigma = std::sqrt(0.3 * 0.7 / static_cast<double>(positions));
  c.require(std::abs(rate - 0.3) <= 3 * sigma, fmt("rate %.4f outside 0.3 +- %.4f", rate, 3 * sigma));

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    c.require(augment(inputs[i], TextLabel::biased, cfg, i) == first_run[i], "replay differs");
  }
  if (c.o.pass) c.o.detail = fmt("rate %.4f over %.0f positions (3 sigma %.4f)", rate, double(positions), 3 * sigma);
  return c.o;
}

// --- split -------------------------------------------------------------------

std::array<std::size_t, 3> apportion_oracle(std::size_t n) {
  const std::array<std::size_t, 3> pct{72, 18, 10};
  std::array<std::size_t, 3> out{}, rem{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    out[i] = n * pct[i] / 100;
    rem[i] = n * pct[i] % 100;
    used += out[i];
  }
  while (used < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) best = rem[i] > rem[best] ? i : best;
    ++out[best];
    rem[best] = 0;
    ++used;
  }
  return out;
}

Outcome split_apportionment() {
  Checker c;
  const std::map<std::size_t, std::array<std::size_t, 3>> worked = {
      {100, {72, 18, 10}}, {49, {35, 9, 5}}, {160, {115, 29, 16}}};
  SplitSpec flat;
  flat.stratify_on_label = false;
  for (const auto& [n, want] : worked) {
    c.require(apportion_oracle(n) == want, "oracle disagrees with worked sizes for " + std::to_string(n));
    c.require(largest_remainder(n, flat.ratios) == want, "largest_remainder(" + std::to_string(n) + ")");
    std::vector<SplitItem> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back({"d" + std::to_string(i), 0});
    const auto s = split(items, flat);
    c.require(std::array<std::size_t, 3>{s.train.size(), s.val.size(), s.test.size()} == want,
              "split sizes for " + std::to_string(n));
  }
  for (std::size_t n = 3; n <= 3000; ++n) {
    c.require(largest_remainder(n, flat.ratios) == apportion_oracle(n), "apportionment for " + std::to_string(n));
  }

  Gen g(7);
  for (int fixture = 0; fixture < 500; ++fixture) {
    std::vector<SplitItem> items;
    const std::size_t groups = g.size(1, 80);
    for (std::size_t d = 0; d < groups; ++d) {
      const std::size_t k = g.size(1, 6);
      for (std::size_t j = 0; j < k; ++j) items.push_back({"dec" + std::to_string(d), g.coin(0.2) ? 1 : 0});
    }
    g.raw().shuffle(items.begin(), items.end());
    SplitSpec spec;
    spec.seed = g.raw().below(1u << 31);
    spec.stratify_on_label = g.coin(0.5);
    const auto s = split(items, spec);
    std::map<std::string, int> where;
    std::size_t seen = 0;
    int part = 0;
    for (const auto* idx : {&s.train, &s.val, &s.test}) {
      for (auto i : *idx) {
        const auto [it, fresh] = where.emplace(items[i].group, part);
        c.require(fresh || it->second == part, "decision " + items[i].group + " crosses splits");
        ++seen;
      }
      ++part;
    }
    c.require(seen == items.size(), "split is not exhaustive");
  }
  if (c.o.pass) c.o.detail = "100->(72,18,10) 49->(35,9,5) 160->(115,29,16); 500 fixtures leak-free";
  return c.o;
}

// --- metrics -----------------------------------------------------------------

Outcome metric_oracle() {
  Checker c;
  const double ba = balanced_accuracy(34.21, 2.63, 5.26, 57.89);
  const double hand = 0.5 * (34.21 / 36.84 + 57.89 / 63.15);
  c.require(std::abs(ba - hand) < 1e-12 && std::abs(ba - 0.9227) <= 0.0005, fmt("balanced accuracy %.5f", ba));

  const auto p = ConfusionMatrix{13, 1, 2, 22}.percent();
  const std::string cells =
      format_percent(p.tn) + "/" + format_percent(p.fp) + "/" + format_percent(p.fn) + "/" + format_percent(p.tp);
  c.require(cells == "34.21/2.63/5.26/57.89", "rendered cells " + cells);

  Gen g(5);
  for (int i = 0; i < 50000; ++i) {
    const std::size_t hi = i % 3 == 0 ? 5 : (i % 3 == 1 ? 200 : 1000000);
    const ConfusionMatrix cm{g.size(0, hi), g.size(0, hi), g.size(0, hi), g.size(0, hi)};
    if (cm.total() == 0) continue;
    const auto q = cm.percent();
    const double sum = std::stod(format_percent(q.tn)) + std::stod(format_percent(q.fp)) +
                       std::stod(format_percent(q.fn)) + std::stod(format_percent(q.tp));
    c.require(std::abs(sum - 100.0) <= 0.01 + 1e-9, fmt("rendered sum %.4f", sum));
  }
  if (c.o.pass) c.o.detail = fmt("balanced accuracy %.4f; cells ", ba) + cells + "; 50000 random matrices sum to 100 +- 0.01";
  return c.o;
}

// --- decision rule -----------------------------------------------------------

Outcome decision_rule() {
  Checker c;
  Gen g(11);
  std::size_t single_chunk = 0, all_negative = 0, biased = 0;
  for (int fixture = 0; fixture < 200; ++fixture) {
    Decision d;
    d.id = "fx" + std::to_string(fixture);
    std::string text;
    const std::size_t n = fixture % 10 == 0 ? 1 : g.size(1, 20);
    for (std::size_t i = 0; i < n; ++i) text += (i ? " " : "") + g.sentence() + ".";
    d.raw_text = text;
    ChunkParams params;
    params.window = g.size(1, 5);
    // Every fifth fixture uses a predictor that never fires.
    const double rate = fixture % 5 == 0 ? 0.0 : g.real(0.05, 0.5);
    std::map<std::string, int> votes;
    auto label_of = [&](const std::string& t) {
      auto [it, fresh] = votes.emplace(t, 0);
      if (fresh) it->second = g.coin(rate) ? 1 : 0;
      return it->second;
    };
    const auto chunks = decision_chunks(d, params, CleaningConfig::defaults());
    bool oracle = false;
    for (const auto& ch : chunks) oracle = oracle || label_of(ch.text) == 1;

    const auto got = classify_decision(
        d,
        [&](const std::vector<std::string>& texts) {
          std::vector<int> out;
          for (const auto& t : texts) out.push_back(label_of(t));
          return out;
        },
        params);
    c.require((got.label == DecisionLabel::biased) == oracle, "fixture " + d.id + " disagrees with oracle");
    c.require(got.chunk_labels.size() == chunks.size(), "fixture " + d.id + " chunk count");
    single_chunk += chunks.size() == 1;
    all_negative += !oracle;
    biased += oracle;
  }
  c.require(single_chunk > 0 && all_negative > 0 && biased > 0, "fixtures miss a degenerate case");
  if (c.o.pass) {
    c.o.detail = "200 fixtures (" + std::to_string(single_chunk) + " single-chunk, " + std::to_string(all_negative) +
                 " all-negative, " + std::to_string(biased) + " biased)";
  }
  return c.o;
}

// --- learnability ------------------------------------------------------------

ExperimentData load_pair(const std::string& train, const std::string& val) {
  ExperimentData d;
  d.train = read_chunks(fixtures::test_data(train));
  d.val = read_chunks(fixtures::test_data(val));
  return d;
}

Outcome learnability() {
  Checker c;
  auto cfg = cli::load_run_config(std::filesystem::path(BIASLEX_CONFIG_DIR) / "synthetic.cfg");
  cfg.finalize();
  const ExperimentData data = load_pair("synthetic_train.jsonl", "synthetic_val.jsonl");
  c.require(data.train.size() == 200 && data.val.size() == 50, "synthetic corpus is not 200/50");

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig deep = cfg.experiment;
  deep.protocol = Protocol::deep;
  deep.n_layers = deep.model.num_blocks;
  const auto rd = run_experiment(data, deep);
  const double deep_secs = seconds_since(t0);

  ExperimentConfig base = cfg.experiment;
  base.protocol = Protocol::baseline;
  const auto rb = run_experiment(data, base);

  const double deep_best = best_val(rd.epochs).acc;
  const double base_best = best_val(rb.epochs).acc;
  const double deep_loss = rd.epochs.back().train_loss;
  const double base_loss = rb.epochs.back().train_loss;
  c.require(rd.epochs.size() == 20 && rb.epochs.size() == 20, "expected 20 epochs");
  c.require(deep_best >= 0.95, fmt("deep best val %.4f < 0.95", deep_best));
  c.require(base_best >= 0.70, fmt("baseline best val %.4f < 0.70", base_best));
  c.require(deep_loss <= base_loss, fmt("deep final train loss %.4f > baseline %.4f", deep_loss, base_loss));
  c.require(deep_secs < 300.0, fmt("deep run took %.0f s", deep_secs));
  if (c.o.pass) {
    c.o.detail = fmt("deep %.2f%% (epoch ", 100 * deep_best) + std::to_string(best_val(rd.epochs).epoch) +
                 fmt(", %.0f s), baseline %.2f%%; final train loss ", deep_secs, 100 * base_best) +
                 fmt("%.4f <= %.4f", deep_loss, base_loss);
  }
  return c.o;
}

// --- chunking ----------------------------------------------------------------

Outcome chunking_invariants() {
  Checker c;
  Gen g(13);
  const CleaningConfig cleaning = CleaningConfig::defaults();
  std::size_t anchored = 0;
  for (int doc = 0; doc < 1000; ++doc) {
    const std::string raw = g.raw_document();
    const std::string once = clean(raw, cleaning);
    c.require(clean(once, cleaning) == once, "clean not idempotent on document " + std::to_string(doc));

    const auto sentences = segment(once);
    std::string joined;
    for (const auto& s : sentences) joined += (joined.empty() ? "" : " ") + s.text;
    c.require(joined == once, "segmentation lost text in document " + std::to_string(doc));

    const std::size_t window = g.size(1, 6), budget = g.size(4, 60);
    std::size_t next = 0;
    for (const auto& ch : extract_chunks(sentences, window, budget)) {
      c.require(ch.first == next && ch.last >= ch.first && ch.last - ch.first < window,
                "chunks do not partition document " + std::to_string(doc));
      c.require(ch.oversized ? ch.first == ch.last : ch.word_count < budget, "budget broken");
      next = ch.last + 1;
    }
    c.require(next == sentences.size(), "chunks do not cover document " + std::to_string(doc));

    // Anchor a whole-word statement taken from the text.
    if (!sentences.empty()) {
      const auto& s = sentences[g.size(0, sentences.size() - 1)];
      std::vector<std::string> words;
      std::istringstream in(s.text);
      for (std::string w; in >> w;) words.push_back(w);
      const std::size_t from = g.size(0, words.size() - 1);
      const std::size_t len = g.size(1, words.size() - from);
      std::string statement;
      for (std::size_t k = from; k < from + len; ++k) statement += (k > from ? " " : "") + words[k];
      Decision d;
      d.id = "doc" + std::to_string(doc);
      d.clean_text = once;
      ChunkParams params;
      params.window = window;
      params.word_budget = budget;
      const Chunk ch = anchor_chunk(d, {statement, {}, {}}, params);
      c.require(ch.text.find(statement) != std::string::npos, "anchored chunk misses statement in " + d.id);
      ++anchored;
    }
  }
  if (c.o.pass) c.o.detail = "1000 documents; " + std::to_string(anchored) + " anchored statements contained";
  return c.o;
}

// --- schema ------------------------------------------------------------------

Outcome schema_golden() {
  Checker c;
  const auto golden = nlohmann::json::parse(fixtures::read_file(fixtures::test_data("schema_golden.json")));
  std::size_t fields = 0;
  for (DatasetTag tag : {DatasetTag::DVC, DatasetTag::PAC}) {
    const auto schema = build_schema(tag);
    const auto& want = golden.at(std::string(to_string(tag)));
    c.require(schema.size() == want.size(), std::string(to_string(tag)) + " attribute count");
    for (std::size_t i = 0; i < std::min(schema.size(), want.size()); ++i) {
      const auto& a = schema[i];
      const auto& e = want[i];
      const bool same = a.name == e.at("name").get<std::string>() &&
                        std::string(to_string(a.kind)) == e.at("kind").get<std::string>() &&
                        a.allowed_values == e.at("values").get<std::set<std::string>>() &&
                        a.allows_prej == e.at("prej").get<bool>() &&
                        a.range.has_value() == e.contains("range") &&
                        (!a.range || (a.range->lo == e["range"][0].get<double>() &&
                                      a.range->hi == e["range"][1].get<double>()));
      c.require(same, std::string(to_string(tag)) + " attribute " + a.name + " differs from golden");
      ++fields;
    }
  }
  const auto dvc = build_schema(DatasetTag::DVC);
  auto decision = [](std::map<std::string, std::vector<std::string>> attrs) {
    Decision d;
    d.id = "ex";
    d.raw_text = "Texto.";
    d.attributes = std::move(attrs);
    return d;
  };
  c.require(validate_decision(decision({{"vitima_genero", {"fem"}}}), dvc).empty(), "vitima_genero=fem rejected");
  const auto v = validate_decision(decision({{"pena_original", {"24.0"}}}), dvc);
  c.require(v.size() == 1 && v[0].rule == ViolationRule::out_of_range && v[0].attribute == "pena_original",
            "pena_original=24.0 not one out-of-range violation");
  c.require(validate_decision(decision({{"apelante_genero", {""}}}), dvc).empty(), "empty value rejected");
  if (c.o.pass) c.o.detail = std::to_string(fields) + " attributes match; 3 validation examples exact";
  return c.o;
}

// --- grid --------------------------------------------------------------------

Outcome grid_smoke() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = cli::load_run_config(std::filesystem::path(BIASLEX_CONFIG_DIR) / "grid_smoke.cfg");
  cfg.finalize();
  cfg.validate_grid();
  const std::vector<GridDataset> datasets = {
      {"DVC", DatasetTag::DVC, load_pair("synthetic_train.jsonl", "synthetic_val.jsonl")},
      {"PAC", DatasetTag::PAC, load_pair("synthetic_pac_train.jsonl", "synthetic_pac_val.jsonl")}};
  const auto first = grid(datasets, cfg.grid, cfg.experiment);
  const auto second = grid(datasets, cfg.grid, cfg.experiment);
  const std::string text = grid_table_text(first);
  const std::string json = grid_table_json(first).dump(2);
  c.require(first.size() == 16, "expected 16 rows, got " + std::to_string(first.size()));
  for (const auto& r : first) c.require(r.error.empty(), "cell failed: " + r.error);
  c.require(std::count(text.begin(), text.end(), '\n') == 17, "table text is not header + 16 rows");
  c.require(text == grid_table_text(second) && json == grid_table_json(second).dump(2), "re-run differs");
  const double secs = seconds_since(t0);
  c.require(secs < 1800.0, fmt("took %.0f s", secs));
  if (c.o.pass) c.o.detail = fmt("16 rows, identical on re-run, %.0f s for both runs", secs);
  return c.o;
}

}  // namespace

int main() {
  set_warning_sink({});
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient-oracle", gradient_oracle},
      {"optimizer-schedule-oracles", optimizer_schedule},
      {"augmentation-contract", augmentation_contract},
      {"split-apportionment", split_apportionment},
      {"metric-oracle", metric_oracle},
      {"decision-level-rule", decision_rule},
      {"learnability", learnability},
      {"chunking-invariants", chunking_invariants},
      {"schema-golden", schema_golden},
      {"grid-smoke", grid_smoke},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
