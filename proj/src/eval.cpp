#include "hivesound/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hivesound/rng.hpp"

namespace hivesound {

namespace {

FeatureTable subtable(const FeatureTable& table, const std::vector<std::size_t>& rows) {
  FeatureTable out;
  out.feature_names = table.feature_names;
  out.rows.reserve(rows.size());
  for (std::size_t r : rows) out.rows.push_back(table.rows[r]);
  return out;
}

std::vector<std::size_t> class_indices(const FeatureTable& table, Label label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].label == label) idx.push_back(i);
  return idx;
}

char fmt_buf[64];
const char* fmt(double v) {
  std::snprintf(fmt_buf, sizeof fmt_buf, "%.9g", v);
  return fmt_buf;
}

}  // namespace

std::pair<FeatureTable, FeatureTable> stratified_split(const FeatureTable& table,
                                                       double test_fraction,
                                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("stratified_split: test fraction must be in (0, 1)");

  std::vector<std::size_t> train_rows, test_rows;
  int class_id = 0;
  for (Label label : {Label::Bee, Label::NoBee}) {
    auto members = class_indices(table, label);
    if (members.size() < 2)
      throw std::runtime_error("stratified_split: class '" + to_string(label) +
                               "' has fewer than two rows");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(class_id++)));
    shuffle(members, rng);
    auto take = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * test_fraction));
    take = std::min(take, members.size() - 1);  // keep at least one row in train
    test_rows.insert(test_rows.end(), members.begin(), members.begin() + static_cast<long>(take));
    train_rows.insert(train_rows.end(), members.begin() + static_cast<long>(take), members.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {subtable(table, train_rows), subtable(table, test_rows)};
}

std::vector<std::pair<FeatureTable, FeatureTable>> kfold(const FeatureTable& table, int k,
                                                         std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > table.rows.size())
    throw std::invalid_argument("kfold: k exceeds the row count");

  std::vector<int> fold_of(table.rows.size(), -1);
  std::size_t cursor = 0;  // continues across classes so fold sizes differ by <= 1
  int class_id = 0;
  for (Label label : {Label::Bee, Label::NoBee}) {
    auto members = class_indices(table, label);
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(k))
      throw std::runtime_error("kfold: class '" + to_string(label) + "' has fewer rows than folds");
    Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(class_id++)));
    shuffle(members, rng);
    for (std::size_t m : members) fold_of[m] = static_cast<int>(cursor++ % static_cast<std::size_t>(k));
  }

  std::vector<std::pair<FeatureTable, FeatureTable>> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows, val_rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
      (fold_of[i] == fold ? val_rows : train_rows).push_back(i);
    folds.emplace_back(subtable(table, train_rows), subtable(table, val_rows));
  }
  return folds;
}

double accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("accuracy: length mismatch or empty input");
  long hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::array<std::array<long, 2>, 2> confusion(const std::vector<Label>& predicted,
                                             const std::vector<Label>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("confusion: length mismatch or empty input");
  std::array<std::array<long, 2>, 2> m = {{{0, 0}, {0, 0}}};
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++m[truth[i] == Label::NoBee ? 1 : 0][predicted[i] == Label::NoBee ? 1 : 0];
  return m;
}

EvalReport evaluate_holdout(const TrainedModel& model, const FeatureTable& test) {
  if (test.rows.empty()) throw std::runtime_error("evaluate: empty table");
  std::vector<Label> preds, truth;
  preds.reserve(test.rows.size());
  truth.reserve(test.rows.size());
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    preds.push_back(predict_row(model, test, i).label);
    truth.push_back(test.rows[i].label);
  }
  EvalReport report;
  report.accuracy = accuracy(preds, truth);
  report.confusion = confusion(preds, truth);
  report.model_kind = to_string(model.kind());
  report.k_features = static_cast<int>(test.feature_names.size());
  report.rows = static_cast<long>(test.rows.size());
  return report;
}

namespace {

TrainedModel retrain_like(const TrainedModel& model, const FeatureTable& table) {
  switch (model.kind()) {
    case ModelKind::Mlp: return train_mlp(table, std::get<MlpParams>(model.params).spec);
    case ModelKind::Gnb: return train_gnb(table);
    case ModelKind::Tree: return train_tree(table, std::get<TreeParams>(model.params).config);
    case ModelKind::Forest: return train_forest(table, std::get<ForestParams>(model.params).config);
    case ModelKind::Svm: return train_svm(table, std::get<SvmParams>(model.params).config);
  }
  throw std::logic_error("retrain_like: unreachable");
}

}  // namespace

EvalReport evaluate_kfold(const TrainedModel& model, const FeatureTable& table, int k,
                          std::uint64_t seed) {
  const auto folds = kfold(table, k, seed);
  EvalReport report;
  report.seed = seed;
  report.model_kind = to_string(model.kind());
  report.k_features = static_cast<int>(table.feature_names.size());
  report.rows = static_cast<long>(table.rows.size());

  long hits = 0;
  for (const auto& [train, validation] : folds) {
    const TrainedModel fold_model = retrain_like(model, train);
    const EvalReport fold_report = evaluate_holdout(fold_model, validation);
    report.fold_accuracies.push_back(fold_report.accuracy);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) report.confusion[a][b] += fold_report.confusion[a][b];
    hits += fold_report.confusion[0][0] + fold_report.confusion[1][1];
  }
  report.accuracy = static_cast<double>(hits) / static_cast<double>(table.rows.size());
  return report;
}

// --- mixed-wave validation ------------------------------------------------

std::string to_string(Expected e) {
  switch (e) {
    case Expected::Bee: return "bee";
    case Expected::NoBee: return "nobee";
    case Expected::DontCare: return "dontcare";
  }
  return "bee";
}

MixedValidationResult run_mixed_validation(const PredictFn& predictor, const Segment& bee_src,
                                           const Segment& nobee_src, const StftConfig& cfg,
                                           const MelFilterbank& fb,
                                           const std::vector<std::string>& feature_subset) {
  struct CaseSpec {
    const char* name;
    double bee_seconds;  // leading bee duration; the rest is nobee
    Expected expected;
  };
  // the 50/50 wave is a don't-care: any prediction counts as correct
  const CaseSpec specs[5] = {{"wavefile1", 2.00, Expected::Bee},
                             {"wavefile2", 0.00, Expected::NoBee},
                             {"wavefile3", 1.00, Expected::DontCare},
                             {"wavefile4", 1.25, Expected::Bee},
                             {"wavefile5", 0.75, Expected::NoBee}};

  std::vector<int> subset_index;
  subset_index.reserve(feature_subset.size());
  for (const auto& name : feature_subset) {
    const int idx = feature_index(name);
    if (idx < 0) throw std::runtime_error("mixed validation: unknown feature '" + name + "'");
    subset_index.push_back(idx);
  }

  MixedValidationResult result;
  int correct = 0;
  char comp[64];
  for (const auto& spec : specs) {
    AudioClip clip;
    if (spec.bee_seconds >= 2.0) {
      clip = mix_segments(bee_src, nobee_src, 2.0);
      std::snprintf(comp, sizeof comp, "2.00s bee");
    } else if (spec.bee_seconds <= 0.0) {
      clip = mix_segments(nobee_src, bee_src, 2.0);
      std::snprintf(comp, sizeof comp, "2.00s nobee");
    } else {
      clip = mix_segments(bee_src, nobee_src, spec.bee_seconds);
      std::snprintf(comp, sizeof comp, "%.2fs bee + %.2fs nobee", spec.bee_seconds,
                    2.0 - spec.bee_seconds);
    }

    const auto full = extract_vector(clip, cfg, fb);
    std::vector<double> values;
    values.reserve(subset_index.size());
    for (int idx : subset_index) values.push_back(full[static_cast<std::size_t>(idx)]);
    const Prediction pred = predictor(feature_subset, values);

    MixedCaseResult c;
    c.name = spec.name;
    c.composition = comp;
    c.expected = spec.expected;
    c.predicted = pred.label;
    c.score = pred.score;
    c.correct = spec.expected == Expected::DontCare ||
                (spec.expected == Expected::Bee && pred.label == Label::Bee) ||
                (spec.expected == Expected::NoBee && pred.label == Label::NoBee);
    if (c.correct) ++correct;
    result.cases.push_back(std::move(c));
  }
  result.matching_accuracy = static_cast<double>(correct) / 5.0;
  return result;
}

MixedValidationResult run_mixed_validation(const TrainedModel& model, const Segment& bee_src,
                                           const Segment& nobee_src, const StftConfig& cfg,
                                           const MelFilterbank& fb) {
  return run_mixed_validation(
      [&model](const std::vector<std::string>& names, const std::vector<double>& values) {
        return predict(model, names, values);
      },
      bee_src, nobee_src, cfg, fb, model.feature_names);
}

// --- activation x optimizer sweep ------------------------------------------

SweepGrid activation_optimizer_sweep(const FeatureTable& table,
                                     const std::vector<Activation>& activations,
                                     const std::vector<OptimizerKind>& optimizers,
                                     const MlpSpec& base, double test_fraction,
                                     std::uint64_t seed) {
  if (activations.empty() || optimizers.empty())
    throw std::invalid_argument("sweep: empty axes");

  SweepGrid grid;
  grid.activations = activations;
  grid.optimizers = optimizers;
  grid.accuracies = Matrix(activations.size(), optimizers.size(),
                           std::numeric_limits<double>::quiet_NaN());

  const auto [train, test] = stratified_split(table, test_fraction, derive_seed(seed, 9000));

  for (std::size_t a = 0; a < activations.size(); ++a) {
    for (std::size_t o = 0; o < optimizers.size(); ++o) {
      MlpSpec spec = base;
      spec.hidden_activation = activations[a];
      spec.optimizer = optimizers[o];
      spec.seed = derive_seed(seed, 9001 + a * optimizers.size() + o);
      try {
        const TrainedModel model = train_mlp(train, spec);
        grid.accuracies(a, o) = evaluate_holdout(model, test).accuracy;
      } catch (const std::exception& e) {
        grid.errors.push_back(to_string(activations[a]) + "/" + to_string(optimizers[o]) + ": " +
                              e.what());
      }
    }
  }
  return grid;
}

// --- CSV exports ------------------------------------------------------------

void write_eval_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "key,value\n";
  f << "model_kind," << report.model_kind << '\n';
  f << "k_features," << report.k_features << '\n';
  f << "seed," << report.seed << '\n';
  f << "rows," << report.rows << '\n';
  f << "accuracy," << fmt(report.accuracy) << '\n';
  f << "confusion_bee_bee," << report.confusion[0][0] << '\n';
  f << "confusion_bee_nobee," << report.confusion[0][1] << '\n';
  f << "confusion_nobee_bee," << report.confusion[1][0] << '\n';
  f << "confusion_nobee_nobee," << report.confusion[1][1] << '\n';
  for (std::size_t i = 0; i < report.fold_accuracies.size(); ++i)
    f << "fold_" << (i + 1) << ',' << fmt(report.fold_accuracies[i]) << '\n';
  if (!report.fold_accuracies.empty()) {
    double mean = 0.0;
    for (double v : report.fold_accuracies) mean += v;
    f << "fold_mean," << fmt(mean / static_cast<double>(report.fold_accuracies.size())) << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_mixval_csv(const MixedValidationResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "case,composition,expected,predicted,score,correct\n";
  for (const auto& c : result.cases) {
    f << c.name << ',' << c.composition << ',' << to_string(c.expected) << ','
      << to_string(c.predicted) << ',' << fmt(c.score) << ',' << (c.correct ? 1 : 0) << '\n';
  }
  f << "matching_accuracy,,,,," << fmt(result.matching_accuracy) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_sweep_csv(const SweepGrid& grid, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "activation";
  for (OptimizerKind o : grid.optimizers) f << ',' << to_string(o);
  f << '\n';
  for (std::size_t a = 0; a < grid.activations.size(); ++a) {
    f << to_string(grid.activations[a]);
    for (std::size_t o = 0; o < grid.optimizers.size(); ++o)
      f << ',' << fmt(grid.accuracies(a, o));
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace hivesound
