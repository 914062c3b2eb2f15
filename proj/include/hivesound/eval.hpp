#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hivesound/classifiers.hpp"

namespace hivesound {

struct EvalReport {
  double accuracy = 0.0;
  // rows: true label (Bee, NoBee), cols: predicted
  std::array<std::array<long, 2>, 2> confusion = {{{0, 0}, {0, 0}}};
  std::vector<double> fold_accuracies;  // empty unless cross-validated
  std::uint64_t seed = 0;
  std::string model_kind;
  int k_features = 0;
  long rows = 0;
};

// Stratified holdout split: per-class test counts within +-1 of
// class_count * test_fraction; train and test are disjoint and exhaustive.
// test_fraction must lie in (0, 1); classes need at least 2 rows.
std::pair<FeatureTable, FeatureTable> stratified_split(const FeatureTable& table,
                                                       double test_fraction,
                                                       std::uint64_t seed);

// Stratified k folds; fold sizes differ by at most one and every row lands
// in exactly one validation fold. Each class count must be >= k.
std::vector<std::pair<FeatureTable, FeatureTable>> kfold(const FeatureTable& table, int k,
                                                         std::uint64_t seed);

double accuracy(const std::vector<Label>& predicted, const std::vector<Label>& truth);
std::array<std::array<long, 2>, 2> confusion(const std::vector<Label>& predicted,
                                             const std::vector<Label>& truth);

EvalReport evaluate_holdout(const TrainedModel& model, const FeatureTable& test);

// Retrains the model's kind and hyperparameters on each fold complement;
// accuracy and confusion are pooled over the validation folds.
EvalReport evaluate_kfold(const TrainedModel& model, const FeatureTable& table, int k,
                          std::uint64_t seed);

// --- mixed-wave validation ---------------------------------------------

enum class Expected { Bee, NoBee, DontCare };
std::string to_string(Expected e);

struct MixedCaseResult {
  std::string name;         // wavefile1..wavefile5
  std::string composition;  // e.g. "1.25s bee + 0.75s nobee"
  Expected expected = Expected::Bee;
  Label predicted = Label::Bee;
  double score = 0.0;
  bool correct = false;
};

struct MixedValidationResult {
  std::vector<MixedCaseResult> cases;
  double matching_accuracy = 0.0;  // in {0.2, 0.4, 0.6, 0.8, 1.0}
};

using PredictFn = std::function<Prediction(const std::vector<std::string>& names,
                                           const std::vector<double>& values)>;

// Builds the five validation waves from one Bee and one NoBee source
// segment: 2.0s bee, 2.0s nobee, 1.0+1.0, 1.25 bee + 0.75 nobee,
// 0.75 bee + 1.25 nobee. A case counts as correct when the prediction
// matches the majority-duration label; the 50/50 case always counts.
MixedValidationResult run_mixed_validation(const PredictFn& predictor,
                                           const Segment& bee_src, const Segment& nobee_src,
                                           const StftConfig& cfg, const MelFilterbank& fb,
                                           const std::vector<std::string>& feature_subset);
MixedValidationResult run_mixed_validation(const TrainedModel& model, const Segment& bee_src,
                                           const Segment& nobee_src, const StftConfig& cfg,
                                           const MelFilterbank& fb);

// --- synthetic corpus ---------------------------------------------------

// Deterministic in-memory corpus standing in for field recordings.
// Bee clips: harmonic buzz (fundamental 190-260 Hz, 4-8 harmonics with 1/h
// decay, slow amplitude modulation, -30 dB noise floor). NoBee clips: white
// noise, 1-6 kHz chirp sweeps, or impulsive clicks, optionally with a faint
// -15 dB buzz underneath. 2 s at 22050 Hz.
std::vector<Segment> gen_synthetic_corpus(int n_bee, int n_nobee, std::uint64_t seed);

// --- activation x optimizer sweep ---------------------------------------

struct SweepGrid {
  std::vector<Activation> activations;
  std::vector<OptimizerKind> optimizers;
  Matrix accuracies;                          // activations x optimizers; nan on failure
  std::vector<std::string> errors;            // per failed cell: "relu/ftrl: message"
};

// One MLP per (activation, optimizer) cell on a shared stratified split;
// per-cell divergence is recorded, not fatal.
SweepGrid activation_optimizer_sweep(const FeatureTable& table,
                                     const std::vector<Activation>& activations,
                                     const std::vector<OptimizerKind>& optimizers,
                                     const MlpSpec& base, double test_fraction,
                                     std::uint64_t seed);

// --- CSV exports ---------------------------------------------------------

void write_eval_csv(const EvalReport& report, const std::string& path);
void write_mixval_csv(const MixedValidationResult& result, const std::string& path);
void write_sweep_csv(const SweepGrid& grid, const std::string& path);

}  // namespace hivesound
