#include "biaslex/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biaslex/error.hpp"

namespace biaslex {

using nlohmann::json;
using nlohmann::ordered_json;

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const int> actual,
                                                  std::span<const int> predicted) {
  if (actual.size() != predicted.size()) {
    throw ConfigError("actual and predicted label counts differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool a = actual[i] != 0;
    const bool p = predicted[i] != 0;
    if (a && p) ++cm.tp;
    else if (a) ++cm.fn;
    else if (p) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

ConfusionMatrix::Percent ConfusionMatrix::percent() const {
  const std::uint64_t n = total();
  if (n == 0) return {0.0, 0.0, 0.0, 0.0};
  const std::array<std::uint64_t, 4> counts{tn, fp, fn, tp};
  // Work in hundredths of a percent, rounding half up.
  std::array<std::int64_t, 4> cells{};
  std::array<double, 4> error{};
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    cells[i] = static_cast<std::int64_t>((20000 * counts[i] + n) / (2 * n));
    error[i] = static_cast<double>(cells[i]) - 10000.0 * static_cast<double>(counts[i]) /
                                                   static_cast<double>(n);
    sum += cells[i];
  }
  // Independent rounding can drift by up to two hundredths; pull the sum back
  // within one hundredth by nudging the most-rounded cells.
  while (std::abs(sum - 10000) > 1) {
    const bool too_high = sum > 10000;
    std::size_t pick = 0;
    for (std::size_t i = 1; i < 4; ++i) {
      if (too_high ? error[i] > error[pick] : error[i] < error[pick]) pick = i;
    }
    cells[pick] += too_high ? -1 : 1;
    error[pick] += too_high ? -1.0 : 1.0;
    sum += too_high ? -1 : 1;
  }
  return {static_cast<double>(cells[0]) / 100.0, static_cast<double>(cells[1]) / 100.0,
          static_cast<double>(cells[2]) / 100.0, static_cast<double>(cells[3]) / 100.0};
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  if (cm.tn + cm.fp == 0) throw UndefinedMetricError("balanced accuracy: no actual negatives");
  if (cm.tp + cm.fn == 0) throw UndefinedMetricError("balanced accuracy: no actual positives");
  return balanced_accuracy(static_cast<double>(cm.tn), static_cast<double>(cm.fp),
                           static_cast<double>(cm.fn), static_cast<double>(cm.tp));
}

double balanced_accuracy(double tn, double fp, double fn, double tp) {
  if (!(tn + fp > 0.0)) throw UndefinedMetricError("balanced accuracy: no actual negatives");
  if (!(tp + fn > 0.0)) throw UndefinedMetricError("balanced accuracy: no actual positives");
  return 0.5 * (tn / (tn + fp) + tp / (tp + fn));
}

std::string_view to_string(DecisionLabel label) {
  return label == DecisionLabel::biased ? "biased" : "non_biased";
}

DecisionPrediction classify_decision(const Decision& decision, const ChunkPredictor& predict,
                                     const ChunkParams& params) {
  const auto chunks = decision_chunks(decision, params, CleaningConfig::defaults());
  if (chunks.empty()) {
    throw DataError("cannot classify decision " + decision.id + ": empty clean text");
  }
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  const std::vector<int> labels = predict(texts);
  if (labels.size() != texts.size()) throw ConfigError("predictor returned the wrong label count");

  DecisionPrediction out;
  out.id = decision.id;
  for (int l : labels) {
    out.chunk_labels.push_back(l != 0 ? DecisionLabel::biased : DecisionLabel::non_biased);
  }
  const bool any = std::any_of(labels.begin(), labels.end(), [](int l) { return l != 0; });
  out.label = any ? DecisionLabel::biased : DecisionLabel::non_biased;
  return out;
}

DecisionPrediction classify_decision(const Decision& decision, const TextClassifier& model,
                                     const ChunkParams& params) {
  return classify_decision(
      decision, [&](const std::vector<std::string>& texts) { return model.predict(texts); },
      params);
}

BestScore best_train(const std::vector<EpochRecord>& records) {
  BestScore best;
  for (const auto& r : records) {
    if (best.epoch == 0 || r.train_balanced_accuracy > best.acc) {
      best = {r.train_balanced_accuracy, r.epoch};
    }
  }
  return best;
}

BestScore best_val(const std::vector<EpochRecord>& records) {
  BestScore best;
  for (const auto& r : records) {
    if (best.epoch == 0 || r.val_balanced_accuracy > best.acc) {
      best = {r.val_balanced_accuracy, r.epoch};
    }
  }
  return best;
}

std::size_t lowest_val_loss_epoch(const std::vector<EpochRecord>& records) {
  std::size_t epoch = 0;
  double lowest = 0.0;
  for (const auto& r : records) {
    if (epoch == 0 || r.val_loss < lowest) {
      epoch = r.epoch;
      lowest = r.val_loss;
    }
  }
  return epoch;
}

MetricsReport MetricsReport::from_epochs(std::string experiment, std::string dataset,
                                         std::string protocol, double weight,
                                         std::vector<EpochRecord> epochs) {
  MetricsReport r;
  r.experiment = std::move(experiment);
  r.dataset = std::move(dataset);
  r.protocol = std::move(protocol);
  r.weight = weight;
  r.epochs = std::move(epochs);
  r.confusion_epoch = lowest_val_loss_epoch(r.epochs);
  for (const auto& e : r.epochs) {
    if (e.epoch == r.confusion_epoch) r.confusion = e.val_confusion;
  }
  r.best_train = biaslex::best_train(r.epochs);
  r.best_val = biaslex::best_val(r.epochs);
  return r;
}

namespace {

ordered_json cm_counts_json(const ConfusionMatrix& cm) {
  return {{"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}, {"tp", cm.tp}};
}

ConfusionMatrix cm_from(const json& j) {
  return {j.at("tn").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(),
          j.at("fn").get<std::uint64_t>(), j.at("tp").get<std::uint64_t>()};
}

DecisionLabel decision_label_from(const std::string& s) {
  if (s == "biased") return DecisionLabel::biased;
  if (s == "non_biased") return DecisionLabel::non_biased;
  throw DataError("unknown decision label \"" + s + "\"");
}

}  // namespace

ordered_json report_to_json(const MetricsReport& report) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"train_balanced_accuracy", e.train_balanced_accuracy},
                      {"val_balanced_accuracy", e.val_balanced_accuracy},
                      {"learning_rate", e.learning_rate},
                      {"val_confusion", cm_counts_json(e.val_confusion)}});
  }
  const auto pct = report.confusion.percent();
  ordered_json cm = cm_counts_json(report.confusion);
  cm["percent"] = {{"tn", pct.tn}, {"fp", pct.fp}, {"fn", pct.fn}, {"tp", pct.tp}};
  ordered_json decisions = ordered_json::array();
  for (const auto& d : report.decisions) {
    ordered_json labels = ordered_json::array();
    for (auto l : d.chunk_labels) labels.push_back(std::string(to_string(l)));
    decisions.push_back({{"id", d.id}, {"label", std::string(to_string(d.label))},
                         {"chunk_labels", std::move(labels)}});
  }
  return {{"schema_version", std::string(kReportSchemaVersion)},
          {"experiment", report.experiment},
          {"dataset", report.dataset},
          {"protocol", report.protocol},
          {"weight", report.weight},
          {"epochs", std::move(epochs)},
          {"confusion_epoch", report.confusion_epoch},
          {"confusion_matrix", std::move(cm)},
          {"best_train", {{"acc", report.best_train.acc}, {"epoch", report.best_train.epoch}}},
          {"best_val", {{"acc", report.best_val.acc}, {"epoch", report.best_val.epoch}}},
          {"decisions", std::move(decisions)}};
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional, const std::string& where,
                std::vector<std::string>& errors) {
  if (!obj.is_object()) {
    errors.push_back(where + ": expected an object");
    return;
  }
  for (const char* k : required) {
    if (!obj.contains(k)) errors.push_back(where + ": missing \"" + k + "\"");
  }
  for (const auto& [key, _] : obj.items()) {
    const bool known =
        std::any_of(required.begin(), required.end(), [&](const char* k) { return key == k; }) ||
        std::any_of(optional.begin(), optional.end(), [&](const char* k) { return key == k; });
    if (!known) errors.push_back(where + ": unknown key \"" + key + "\"");
  }
}

void check_number(const json& obj, const char* key, const std::string& where,
                  std::vector<std::string>& errors, std::optional<double> lo = std::nullopt,
                  std::optional<double> hi = std::nullopt) {
  if (!obj.is_object() || !obj.contains(key)) return;
  const auto& v = obj[key];
  if (!v.is_number()) {
    errors.push_back(where + "." + key + ": expected a number");
    return;
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) errors.push_back(where + "." + key + ": not finite");
  if ((lo && x < *lo) || (hi && x > *hi)) {
    errors.push_back(where + "." + key + ": out of range");
  }
}

void check_count(const json& obj, const char* key, const std::string& where,
                 std::vector<std::string>& errors) {
  if (!obj.is_object() || !obj.contains(key)) return;
  if (!obj[key].is_number_unsigned() && !(obj[key].is_number_integer() && obj[key].get<long long>() >= 0)) {
    errors.push_back(where + "." + key + ": expected a non-negative integer");
  }
}

void check_string(const json& obj, const char* key, const std::string& where,
                  std::vector<std::string>& errors) {
  if (!obj.is_object() || !obj.contains(key)) return;
  if (!obj[key].is_string()) errors.push_back(where + "." + key + ": expected a string");
}

void check_cm(const json& cm, const std::string& where, std::vector<std::string>& errors,
              bool with_percent) {
  if (with_percent) {
    check_keys(cm, {"tn", "fp", "fn", "tp", "percent"}, {}, where, errors);
  } else {
    check_keys(cm, {"tn", "fp", "fn", "tp"}, {}, where, errors);
  }
  for (const char* k : {"tn", "fp", "fn", "tp"}) check_count(cm, k, where, errors);
  if (with_percent && cm.is_object() && cm.contains("percent")) {
    const auto& p = cm["percent"];
    check_keys(p, {"tn", "fp", "fn", "tp"}, {}, where + ".percent", errors);
    double sum = 0.0;
    bool all_numbers = p.is_object();
    for (const char* k : {"tn", "fp", "fn", "tp"}) {
      check_number(p, k, where + ".percent", errors, 0.0, 100.0);
      if (p.is_object() && p.contains(k) && p[k].is_number()) {
        sum += p[k].get<double>();
      } else {
        all_numbers = false;
      }
    }
    const bool any_counts = cm.value("tn", 0) + cm.value("fp", 0) + cm.value("fn", 0) + cm.value("tp", 0) > 0;
    if (all_numbers && any_counts && std::abs(sum - 100.0) > 0.01 + 1e-9) {
      errors.push_back(where + ".percent: cells do not sum to 100");
    }
  }
}

void check_best(const json& obj, const char* key, std::vector<std::string>& errors) {
  if (!obj.contains(key)) return;
  const std::string where = key;
  check_keys(obj[key], {"acc", "epoch"}, {}, where, errors);
  check_number(obj[key], "acc", where, errors, 0.0, 1.0);
  check_count(obj[key], "epoch", where, errors);
}

}  // namespace

std::vector<std::string> validate_report_json(const json& j) {
  std::vector<std::string> errors;
  check_keys(j,
             {"schema_version", "experiment", "dataset", "protocol", "weight", "epochs",
              "confusion_epoch", "confusion_matrix", "best_train", "best_val", "decisions"},
             {}, "report", errors);
  if (!j.is_object()) return errors;
  if (j.contains("schema_version") && j["schema_version"] != std::string(kReportSchemaVersion)) {
    errors.push_back("report.schema_version: unsupported version");
  }
  check_string(j, "experiment", "report", errors);
  check_string(j, "dataset", "report", errors);
  check_string(j, "protocol", "report", errors);
  check_number(j, "weight", "report", errors, 0.0, 1.0);
  check_count(j, "confusion_epoch", "report", errors);

  if (j.contains("epochs")) {
    if (!j["epochs"].is_array()) {
      errors.push_back("report.epochs: expected an array");
    } else {
      std::size_t expect = 1;
      for (const auto& e : j["epochs"]) {
        const std::string where = "epochs[" + std::to_string(expect - 1) + "]";
        check_keys(e,
                   {"epoch", "train_loss", "val_loss", "train_balanced_accuracy",
                    "val_balanced_accuracy", "learning_rate"},
                   {"val_confusion"}, where, errors);
        check_count(e, "epoch", where, errors);
        if (e.is_object() && e.contains("epoch") && e["epoch"].is_number_integer() &&
            e["epoch"].get<long long>() != static_cast<long long>(expect)) {
          errors.push_back(where + ".epoch: epochs must be numbered 1, 2, ...");
        }
        check_number(e, "train_loss", where, errors, 0.0);
        check_number(e, "val_loss", where, errors, 0.0);
        check_number(e, "train_balanced_accuracy", where, errors, 0.0, 1.0);
        check_number(e, "val_balanced_accuracy", where, errors, 0.0, 1.0);
        check_number(e, "learning_rate", where, errors, 0.0);
        if (e.is_object() && e.contains("val_confusion")) {
          check_cm(e["val_confusion"], where + ".val_confusion", errors, false);
        }
        ++expect;
      }
    }
  }
  if (j.contains("confusion_matrix")) check_cm(j["confusion_matrix"], "confusion_matrix", errors, true);
  check_best(j, "best_train", errors);
  check_best(j, "best_val", errors);
  if (j.contains("decisions")) {
    if (!j["decisions"].is_array()) {
      errors.push_back("report.decisions: expected an array");
    } else {
      std::size_t i = 0;
      for (const auto& d : j["decisions"]) {
        const std::string where = "decisions[" + std::to_string(i++) + "]";
        check_keys(d, {"id", "label", "chunk_labels"}, {}, where, errors);
        check_string(d, "id", where, errors);
        auto label_ok = [](const json& v) {
          return v.is_string() && (v == "biased" || v == "non_biased");
        };
        if (d.is_object() && d.contains("label") && !label_ok(d["label"])) {
          errors.push_back(where + ".label: expected biased or non_biased");
        }
        if (d.is_object() && d.contains("chunk_labels")) {
          if (!d["chunk_labels"].is_array() ||
              !std::all_of(d["chunk_labels"].begin(), d["chunk_labels"].end(), label_ok)) {
            errors.push_back(where + ".chunk_labels: expected an array of labels");
          }
        }
      }
    }
  }
  return errors;
}

MetricsReport report_from_json(const json& j) {
  const auto errors = validate_report_json(j);
  if (!errors.empty()) throw DataError("invalid report: " + errors.front());
  MetricsReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.protocol = j.at("protocol").get<std::string>();
  r.weight = j.at("weight").get<double>();
  for (const auto& e : j.at("epochs")) {
    EpochRecord rec;
    rec.epoch = e.at("epoch").get<std::size_t>();
    rec.train_loss = e.at("train_loss").get<double>();
    rec.val_loss = e.at("val_loss").get<double>();
    rec.train_balanced_accuracy = e.at("train_balanced_accuracy").get<double>();
    rec.val_balanced_accuracy = e.at("val_balanced_accuracy").get<double>();
    rec.learning_rate = e.at("learning_rate").get<double>();
    if (e.contains("val_confusion")) rec.val_confusion = cm_from(e.at("val_confusion"));
    r.epochs.push_back(rec);
  }
  r.confusion_epoch = j.at("confusion_epoch").get<std::size_t>();
  r.confusion = cm_from(j.at("confusion_matrix"));
  r.best_train = {j.at("best_train").at("acc").get<double>(),
                  j.at("best_train").at("epoch").get<std::size_t>()};
  r.best_val = {j.at("best_val").at("acc").get<double>(),
                j.at("best_val").at("epoch").get<std::size_t>()};
  for (const auto& d : j.at("decisions")) {
    DecisionPrediction p;
    p.id = d.at("id").get<std::string>();
    p.label = decision_label_from(d.at("label").get<std::string>());
    for (const auto& l : d.at("chunk_labels")) p.chunk_labels.push_back(decision_label_from(l.get<std::string>()));
    r.decisions.push_back(std::move(p));
  }
  return r;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string format_weight(double w) {
  std::ostringstream os;
  os << w;
  return os.str();
}

}  // namespace

std::string render_report_text(const MetricsReport& report) {
  std::ostringstream os;
  os << "experiment: " << report.experiment << "\n\n";
  os << pad_right("dataset", 9) << pad_right("protocol", 10) << pad_right("weight", 8)
     << "best-balanced accuracy (%) (epoch)\n";
  os << pad_right(report.dataset, 9) << pad_right(report.protocol, 10)
     << pad_right(format_weight(report.weight), 8) << format_percent(100.0 * report.best_train.acc)
     << " (T) (" << report.best_train.epoch << "), " << format_percent(100.0 * report.best_val.acc)
     << " (V) (" << report.best_val.epoch << ")\n\n";

  const auto pct = report.confusion.percent();
  os << "confusion matrix, lowest validation loss epoch " << report.confusion_epoch << " (%)\n";
  os << pad_right("", 20) << pad_left("pred. non-biased", 18) << pad_left("pred. biased", 14) << "\n";
  os << pad_right("actual non-biased", 20) << pad_left(format_percent(pct.tn), 18)
     << pad_left(format_percent(pct.fp), 14) << "\n";
  os << pad_right("actual biased", 20) << pad_left(format_percent(pct.fn), 18)
     << pad_left(format_percent(pct.tp), 14) << "\n";

  if (!report.decisions.empty()) {
    os << "\ndecisions\n";
    for (const auto& d : report.decisions) {
      os << d.id << '\t' << to_string(d.label) << '\t';
      for (std::size_t i = 0; i < d.chunk_labels.size(); ++i) {
        if (i > 0) os << ',';
        os << (d.chunk_labels[i] == DecisionLabel::biased ? 'B' : 'N');
      }
      os << '\n';
    }
  }
  return os.str();
}

void render_report(const MetricsReport& report, const std::filesystem::path& dir,
                   const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
  };
  write(dir / (stem + ".json"), report_to_json(report).dump(2) + "\n");
  write(dir / (stem + ".txt"), render_report_text(report));
}

}  // namespace biaslex
