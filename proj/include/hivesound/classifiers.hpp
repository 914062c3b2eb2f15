#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hivesound/features.hpp"
#include "hivesound/optimizers.hpp"

namespace hivesound {

enum class Activation { Relu, Sigmoid, Tanh };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);
const std::vector<Activation>& all_activations();

// Classes are encoded Bee=0, NoBee=1 throughout; scores are P(NoBee) and
// the decision threshold is 0.5.
struct Prediction {
  Label label = Label::Bee;
  double score = 0.0;  // in [0, 1]; label == NoBee iff score >= 0.5
};

struct MlpSpec {
  std::vector<int> hidden_layers = {256, 128, 64};
  Activation hidden_activation = Activation::Sigmoid;
  OptimizerKind optimizer = OptimizerKind::AdaMax;
  double learning_rate = 1e-3;
  double decay = 1e-5;  // per-step schedule lr_t = lr / (1 + decay * t)
  int epochs = 1000;
  int batch_size = 128;
  std::uint64_t seed = 0;
};

struct MlpParams {
  MlpSpec spec;
  std::vector<int> layer_sizes;               // input, hidden..., 1
  std::vector<std::vector<double>> weights;   // per layer, out x in row-major
  std::vector<std::vector<double>> biases;    // per layer, out
};

struct GnbParams {
  double prior[2] = {0.0, 0.0};               // [Bee, NoBee]
  std::vector<double> mean[2];
  std::vector<double> variance[2];            // smoothed
};

enum class SplitCriterion { Gini, Entropy };
std::string to_string(SplitCriterion c);
SplitCriterion parse_criterion(const std::string& text);

struct TreeConfig {
  SplitCriterion criterion = SplitCriterion::Gini;
  int max_depth = 0;  // 0 = unbounded
  int min_split = 2;
};

struct TreeNode {
  int feature = -1;          // split feature; -1 for leaves
  double threshold = 0.0;    // x[feature] <= threshold goes left
  int left = -1, right = -1;
  double nobee_fraction = 0.0;
  int count = 0;
};

struct TreeParams {
  TreeConfig config;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestConfig {
  int n_trees = 100;
  int max_features = 0;  // 0 = floor(sqrt(feature count)) per split
  bool bootstrap = true;
  TreeConfig tree;
  std::uint64_t seed = 0;
  bool tie_to_nobee = true;  // majority-vote ties; flipping this breaks the
                             // score>=0.5 <-> NoBee invariant on exact ties
};

struct ForestParams {
  ForestConfig config;
  std::vector<TreeParams> trees;
  std::vector<double> importances;  // Gini importance per feature, sums to 1
  double oob_accuracy = 0.0;        // nan when bootstrap disabled
};

struct SvmConfig {
  double c = 1.0;
  int epochs = 1000;
  std::uint64_t seed = 0;
};

struct SvmParams {
  SvmConfig config;
  std::vector<double> weights;  // on standardized features; last entry is the bias
  std::vector<double> objective_trace;  // regularized hinge at the averaged iterate
};

// Per-feature z-score parameters captured at fit time. Constant features
// get stddev 1 and are flagged. Identity (mean 0, stddev 1) for the
// scale-free model kinds.
struct Standardizer {
  std::vector<double> mean, stddev;
  std::vector<std::uint8_t> constant;
};

enum class ModelKind { Mlp, Gnb, Tree, Forest, Svm };
std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& text);

struct TrainedModel {
  std::vector<std::string> feature_names;
  Standardizer norm;
  std::variant<MlpParams, GnbParams, TreeParams, ForestParams, SvmParams> params;

  ModelKind kind() const { return static_cast<ModelKind>(params.index()); }
};

// --- training ---------------------------------------------------------

// Mini-batch backpropagation on binary cross-entropy, Glorot-uniform init,
// deterministic given spec.seed. Throws on a non-finite loss (with the
// epoch index) and on single-class input.
TrainedModel train_mlp(const FeatureTable& table, const MlpSpec& spec);

// Per-class Gaussians with variance smoothing 1e-9 * max feature variance;
// priors from class frequencies.
TrainedModel train_gnb(const FeatureTable& table);

// CART, greedy axis-aligned splits; equal-impurity ties break toward the
// lowest feature index, then the lowest threshold.
TrainedModel train_tree(const FeatureTable& table, const TreeConfig& config = {});

TrainedModel train_forest(const FeatureTable& table, const ForestConfig& config = {});

// Linear SVM trained by deterministic full-batch subgradient descent on the
// regularized hinge loss, lr_t = 1 / (lambda * t) with lambda = 1 / (c * n).
// The bias is folded into the weight vector as a constant-1 feature.
TrainedModel train_svm(const FeatureTable& table, const SvmConfig& config = {});

// --- inference --------------------------------------------------------

// names must match model.feature_names exactly (order included).
Prediction predict(const TrainedModel& model, const std::vector<std::string>& names,
                   const std::vector<double>& values);
Prediction predict_row(const TrainedModel& model, const FeatureTable& table, std::size_t row);

// --- serialization ----------------------------------------------------

// Self-describing versioned text format; a reloaded model reproduces
// identical predictions bit for bit.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// --- internals exposed for direct checking ----------------------------

// Mean binary cross-entropy of the network on already-standardized rows,
// and its gradient with respect to every parameter in flatten order
// (weights then biases, layer by layer).
double mlp_loss(const MlpParams& params, const std::vector<std::vector<double>>& rows,
                const std::vector<double>& targets);
std::vector<double> mlp_loss_gradients(const MlpParams& params,
                                       const std::vector<std::vector<double>>& rows,
                                       const std::vector<double>& targets);
std::vector<double> mlp_flatten(const MlpParams& params);
void mlp_unflatten(MlpParams& params, const std::vector<double>& flat);

}  // namespace hivesound
