#include "hivesound/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "classifier_internal.hpp"
#include "hivesound/rng.hpp"

namespace hivesound {

namespace detail {

Standardizer fit_standardizer(const FeatureTable& table) {
  const std::size_t f = table.feature_names.size();
  const std::size_t n = table.rows.size();
  Standardizer s;
  s.mean.assign(f, 0.0);
  s.stddev.assign(f, 1.0);
  s.constant.assign(f, 0);

  for (const auto& row : table.rows)
    for (std::size_t j = 0; j < f; ++j) s.mean[j] += row.values[j];
  for (std::size_t j = 0; j < f; ++j) s.mean[j] /= static_cast<double>(n);

  std::vector<double> var(f, 0.0);
  for (const auto& row : table.rows)
    for (std::size_t j = 0; j < f; ++j) {
      const double d = row.values[j] - s.mean[j];
      var[j] += d * d;
    }
  for (std::size_t j = 0; j < f; ++j) {
    var[j] /= static_cast<double>(n);
    if (var[j] > 0.0) {
      s.stddev[j] = std::sqrt(var[j]);
    } else {
      s.stddev[j] = 1.0;
      s.constant[j] = 1;
    }
  }
  return s;
}

Standardizer identity_standardizer(std::size_t n_features) {
  Standardizer s;
  s.mean.assign(n_features, 0.0);
  s.stddev.assign(n_features, 1.0);
  s.constant.assign(n_features, 0);
  return s;
}

std::vector<double> apply_standardizer(const Standardizer& s, const std::vector<double>& values) {
  if (values.size() != s.mean.size())
    throw std::invalid_argument("standardizer: feature count mismatch");
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) out[j] = (values[j] - s.mean[j]) / s.stddev[j];
  return out;
}

std::vector<double> binary_targets(const FeatureTable& table) {
  std::vector<double> y(table.rows.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = table.rows[i].label == Label::NoBee ? 1.0 : 0.0;
  return y;
}

void require_both_classes(const FeatureTable& table, const char* who) {
  bool bee = false, nobee = false;
  for (const auto& row : table.rows) (row.label == Label::Bee ? bee : nobee) = true;
  if (!bee || !nobee)
    throw std::runtime_error(std::string(who) + ": both classes must be present");
}

}  // namespace detail

std::string to_string(SplitCriterion c) { return c == SplitCriterion::Gini ? "gini" : "entropy"; }

SplitCriterion parse_criterion(const std::string& text) {
  if (text == "gini") return SplitCriterion::Gini;
  if (text == "entropy") return SplitCriterion::Entropy;
  throw std::invalid_argument("unknown split criterion: " + text);
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Gnb: return "gnb";
    case ModelKind::Tree: return "tree";
    case ModelKind::Forest: return "forest";
    case ModelKind::Svm: return "svm";
  }
  return "mlp";
}

ModelKind parse_model_kind(const std::string& text) {
  for (ModelKind k : {ModelKind::Mlp, ModelKind::Gnb, ModelKind::Tree, ModelKind::Forest,
                      ModelKind::Svm})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown model kind: " + text);
}

// --- Gaussian naive Bayes ----------------------------------------------

TrainedModel train_gnb(const FeatureTable& table) {
  if (table.rows.empty()) throw std::runtime_error("train_gnb: empty table");
  detail::require_both_classes(table, "train_gnb");

  const std::size_t f = table.feature_names.size();
  const std::size_t n = table.rows.size();

  GnbParams p;
  long count[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    p.mean[c].assign(f, 0.0);
    p.variance[c].assign(f, 0.0);
  }
  for (const auto& row : table.rows) {
    const int c = row.label == Label::NoBee ? 1 : 0;
    ++count[c];
    for (std::size_t j = 0; j < f; ++j) p.mean[c][j] += row.values[j];
  }
  for (int c = 0; c < 2; ++c)
    for (std::size_t j = 0; j < f; ++j) p.mean[c][j] /= static_cast<double>(count[c]);
  for (const auto& row : table.rows) {
    const int c = row.label == Label::NoBee ? 1 : 0;
    for (std::size_t j = 0; j < f; ++j) {
      const double d = row.values[j] - p.mean[c][j];
      p.variance[c][j] += d * d;
    }
  }

  // smoothing: 1e-9 times the largest overall feature variance
  double max_var = 0.0;
  {
    std::vector<double> overall_mean(f, 0.0), overall_var(f, 0.0);
    for (const auto& row : table.rows)
      for (std::size_t j = 0; j < f; ++j) overall_mean[j] += row.values[j];
    for (std::size_t j = 0; j < f; ++j) overall_mean[j] /= static_cast<double>(n);
    for (const auto& row : table.rows)
      for (std::size_t j = 0; j < f; ++j) {
        const double d = row.values[j] - overall_mean[j];
        overall_var[j] += d * d;
      }
    for (std::size_t j = 0; j < f; ++j) max_var = std::max(max_var, overall_var[j] / n);
  }
  const double epsilon = std::max(1e-9 * max_var, 1e-300);

  for (int c = 0; c < 2; ++c)
    for (std::size_t j = 0; j < f; ++j)
      p.variance[c][j] = p.variance[c][j] / static_cast<double>(count[c]) + epsilon;

  p.prior[0] = static_cast<double>(count[0]) / static_cast<double>(n);
  p.prior[1] = static_cast<double>(count[1]) / static_cast<double>(n);

  TrainedModel model;
  model.feature_names = table.feature_names;
  model.norm = detail::identity_standardizer(f);
  model.params = std::move(p);
  return model;
}

// --- CART tree -----------------------------------------------------------

namespace {

double impurity(SplitCriterion criterion, long n_bee, long n_nobee) {
  const long total = n_bee + n_nobee;
  if (total == 0) return 0.0;
  const double p0 = static_cast<double>(n_bee) / static_cast<double>(total);
  const double p1 = static_cast<double>(n_nobee) / static_cast<double>(total);
  if (criterion == SplitCriterion::Gini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

struct TreeBuilder {
  const FeatureTable& table;
  TreeConfig config;
  std::vector<TreeNode> nodes;
  // per-split feature subsampling; empty candidates = all features
  Rng* rng = nullptr;
  int max_features = 0;
  // weighted impurity decrease per feature (for forest importances)
  std::vector<double>* importance = nullptr;
  std::size_t n_total = 0;

  TreeBuilder(const FeatureTable& t, const TreeConfig& c) : table(t), config(c) {}

  int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int depth) {
    long n_nobee = 0;
    for (std::size_t i = begin; i < end; ++i)
      if (table.rows[idx[i]].label == Label::NoBee) ++n_nobee;
    const long n_node = static_cast<long>(end - begin);
    const long n_bee = n_node - n_nobee;

    TreeNode node;
    node.count = static_cast<int>(n_node);
    node.nobee_fraction = static_cast<double>(n_nobee) / static_cast<double>(n_node);

    const bool pure = n_bee == 0 || n_nobee == 0;
    const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    bool split_found = false;
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_weighted = std::numeric_limits<double>::infinity();

    if (!pure && !depth_capped && n_node >= config.min_split) {
      std::vector<int> candidates = pick_features();
      std::vector<std::pair<double, int>> sorted;  // (value, is_nobee)
      sorted.reserve(end - begin);
      for (int feature : candidates) {
        sorted.clear();
        for (std::size_t i = begin; i < end; ++i) {
          const auto& row = table.rows[idx[i]];
          sorted.emplace_back(row.values[static_cast<std::size_t>(feature)],
                              row.label == Label::NoBee ? 1 : 0);
        }
        std::sort(sorted.begin(), sorted.end());
        long left_nobee = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
          left_nobee += sorted[i].second;
          if (sorted[i].first == sorted[i + 1].first) continue;
          const long left_n = static_cast<long>(i + 1);
          const long right_n = n_node - left_n;
          const double weighted =
              (static_cast<double>(left_n) *
                   impurity(config.criterion, left_n - left_nobee, left_nobee) +
               static_cast<double>(right_n) *
                   impurity(config.criterion, n_bee - (left_n - left_nobee),
                            n_nobee - left_nobee)) /
              static_cast<double>(n_node);
          const double threshold = sorted[i].first + 0.5 * (sorted[i + 1].first - sorted[i].first);
          // ties break toward the lowest feature index, then lowest threshold
          if (weighted < best_weighted ||
              (weighted == best_weighted &&
               (feature < best_feature ||
                (feature == best_feature && threshold < best_threshold)))) {
            best_weighted = weighted;
            best_feature = feature;
            best_threshold = threshold;
            split_found = true;
          }
        }
      }
    }

    const int my_index = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (!split_found) return my_index;

    const auto mid = std::partition(idx.begin() + static_cast<long>(begin),
                                    idx.begin() + static_cast<long>(end),
                                    [&](std::size_t r) {
                                      return table.rows[r].values[static_cast<std::size_t>(
                                                 best_feature)] <= best_threshold;
                                    }) -
                     idx.begin();

    if (importance != nullptr) {
      const double parent_imp = impurity(config.criterion, n_bee, n_nobee);
      (*importance)[static_cast<std::size_t>(best_feature)] +=
          static_cast<double>(n_node) / static_cast<double>(n_total) *
          (parent_imp - best_weighted);
    }

    nodes[static_cast<std::size_t>(my_index)].feature = best_feature;
    nodes[static_cast<std::size_t>(my_index)].threshold = best_threshold;
    const int left = build(idx, begin, static_cast<std::size_t>(mid), depth + 1);
    nodes[static_cast<std::size_t>(my_index)].left = left;
    const int right = build(idx, static_cast<std::size_t>(mid), end, depth + 1);
    nodes[static_cast<std::size_t>(my_index)].right = right;
    return my_index;
  }

  std::vector<int> pick_features() {
    const int f = static_cast<int>(table.feature_names.size());
    std::vector<int> all(static_cast<std::size_t>(f));
    std::iota(all.begin(), all.end(), 0);
    if (rng == nullptr || max_features <= 0 || max_features >= f) return all;
    // partial Fisher-Yates, then sort for deterministic scan order
    for (int i = 0; i < max_features; ++i) {
      const auto j = i + static_cast<int>(rng->index(static_cast<std::size_t>(f - i)));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(max_features));
    std::sort(all.begin(), all.end());
    return all;
  }
};

const TreeNode& walk_tree(const TreeParams& tree, const std::vector<double>& values) {
  const TreeNode* node = &tree.nodes[0];
  while (node->feature >= 0)
    node = &tree.nodes[static_cast<std::size_t>(
        values[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                           : node->right)];
  return *node;
}

TreeParams build_tree_on(const FeatureTable& table, std::vector<std::size_t>& idx,
                         const TreeConfig& config, Rng* rng, int max_features,
                         std::vector<double>* importance) {
  TreeBuilder builder(table, config);
  builder.rng = rng;
  builder.max_features = max_features;
  builder.importance = importance;
  builder.n_total = idx.size();
  builder.build(idx, 0, idx.size(), 0);
  TreeParams params;
  params.config = config;
  params.nodes = std::move(builder.nodes);
  return params;
}

}  // namespace

TrainedModel train_tree(const FeatureTable& table, const TreeConfig& config) {
  if (table.rows.empty()) throw std::runtime_error("train_tree: empty table");

  std::vector<std::size_t> idx(table.rows.size());
  std::iota(idx.begin(), idx.end(), 0);

  TrainedModel model;
  model.feature_names = table.feature_names;
  model.norm = detail::identity_standardizer(table.feature_names.size());
  model.params = build_tree_on(table, idx, config, nullptr, 0, nullptr);
  return model;
}

// --- random forest -------------------------------------------------------

TrainedModel train_forest(const FeatureTable& table, const ForestConfig& config) {
  if (table.rows.empty()) throw std::runtime_error("train_forest: empty table");
  if (config.n_trees < 1) throw std::invalid_argument("train_forest: need at least one tree");

  const std::size_t n = table.rows.size();
  const int f = static_cast<int>(table.feature_names.size());
  int max_features = config.max_features;
  if (max_features <= 0) max_features = static_cast<int>(std::floor(std::sqrt(f)));
  max_features = std::min(max_features, f);

  ForestParams forest;
  forest.config = config;
  forest.config.max_features = config.max_features;  // keep 0 = auto as given
  forest.importances.assign(static_cast<std::size_t>(f), 0.0);

  // out-of-bag votes: [row] -> (nobee votes, total votes)
  std::vector<std::pair<long, long>> oob(n, {0, 0});

  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));

    std::vector<std::size_t> idx;
    std::vector<std::uint8_t> in_bag(n, 0);
    idx.reserve(n);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = rng.index(n);
        idx.push_back(r);
        in_bag[r] = 1;
      }
    } else {
      idx.resize(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::fill(in_bag.begin(), in_bag.end(), 1);
    }

    TreeParams tree = build_tree_on(table, idx, config.tree, &rng,
                                    max_features < f ? max_features : 0, &forest.importances);

    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        if (in_bag[i]) continue;
        const TreeNode& leaf = walk_tree(tree, table.rows[i].values);
        ++oob[i].second;
        if (leaf.nobee_fraction >= 0.5) ++oob[i].first;
      }
    }
    forest.trees.push_back(std::move(tree));
  }

  double importance_total = 0.0;
  for (double v : forest.importances) importance_total += v;
  if (importance_total > 0.0)
    for (double& v : forest.importances) v /= importance_total;

  if (config.bootstrap) {
    long correct = 0, counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (oob[i].second == 0) continue;
      ++counted;
      const bool vote_nobee = 2 * oob[i].first >= oob[i].second;  // tie -> NoBee
      const bool truth_nobee = table.rows[i].label == Label::NoBee;
      if (vote_nobee == truth_nobee) ++correct;
    }
    forest.oob_accuracy = counted > 0 ? static_cast<double>(correct) / counted
                                      : std::numeric_limits<double>::quiet_NaN();
  } else {
    forest.oob_accuracy = std::numeric_limits<double>::quiet_NaN();
  }

  TrainedModel model;
  model.feature_names = table.feature_names;
  model.norm = detail::identity_standardizer(table.feature_names.size());
  model.params = std::move(forest);
  return model;
}

// --- linear SVM ----------------------------------------------------------

TrainedModel train_svm(const FeatureTable& table, const SvmConfig& config) {
  if (table.rows.empty()) throw std::runtime_error("train_svm: empty table");
  detail::require_both_classes(table, "train_svm");
  if (config.c <= 0.0) throw std::invalid_argument("train_svm: c must be positive");
  if (config.epochs < 1) throw std::invalid_argument("train_svm: epochs must be >= 1");

  TrainedModel model;
  model.feature_names = table.feature_names;
  model.norm = detail::fit_standardizer(table);

  const std::size_t n = table.rows.size();
  const std::size_t f = table.feature_names.size();
  const std::size_t dim = f + 1;  // trailing constant-1 feature carries the bias

  std::vector<std::vector<double>> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = detail::apply_standardizer(model.norm, table.rows[i].values);
    x[i].push_back(1.0);
    y[i] = table.rows[i].label == Label::NoBee ? 1.0 : -1.0;
  }

  const double lambda = 1.0 / (config.c * static_cast<double>(n));

  SvmParams p;
  p.config = config;
  p.weights.assign(dim, 0.0);
  p.objective_trace.reserve(static_cast<std::size_t>(config.epochs));

  std::vector<double> w_avg(dim, 0.0);
  std::vector<double> subgrad(dim, 0.0);

  auto objective = [&](const std::vector<double>& w) {
    double norm2 = 0.0;
    for (double v : w) norm2 += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double margin = 0.0;
      for (std::size_t j = 0; j < dim; ++j) margin += w[j] * x[i][j];
      hinge += std::max(0.0, 1.0 - y[i] * margin);
    }
    return 0.5 * lambda * norm2 + hinge / static_cast<double>(n);
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    // full-batch subgradient: lambda*w - mean over margin violators of y*x
    std::fill(subgrad.begin(), subgrad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double margin = 0.0;
      for (std::size_t j = 0; j < dim; ++j) margin += p.weights[j] * x[i][j];
      if (y[i] * margin < 1.0)
        for (std::size_t j = 0; j < dim; ++j) subgrad[j] -= y[i] * x[i][j];
    }
    const double lr = 1.0 / (lambda * static_cast<double>(epoch));
    for (std::size_t j = 0; j < dim; ++j) {
      p.weights[j] -= lr * (lambda * p.weights[j] + subgrad[j] / static_cast<double>(n));
      if (!std::isfinite(p.weights[j]))
        throw std::runtime_error("train_svm: weights diverged at epoch " + std::to_string(epoch));
      w_avg[j] += (p.weights[j] - w_avg[j]) / static_cast<double>(epoch);
    }
    p.objective_trace.push_back(objective(w_avg));
  }

  model.params = std::move(p);
  return model;
}

// --- prediction ----------------------------------------------------------

namespace {

Prediction from_score(double score_nobee) {
  Prediction pred;
  pred.score = score_nobee;
  pred.label = score_nobee >= 0.5 ? Label::NoBee : Label::Bee;
  return pred;
}

double gnb_score(const GnbParams& p, const std::vector<double>& values) {
  double log_post[2];
  for (int c = 0; c < 2; ++c) {
    double lp = std::log(p.prior[c]);
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double var = p.variance[c][j];
      const double d = values[j] - p.mean[c][j];
      lp += -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - d * d / (2.0 * var);
    }
    log_post[c] = lp;
  }
  // normalize via log-sum-exp; result is P(NoBee | x)
  const double m = std::max(log_post[0], log_post[1]);
  const double z0 = std::exp(log_post[0] - m);
  const double z1 = std::exp(log_post[1] - m);
  return z1 / (z0 + z1);
}

}  // namespace

Prediction predict(const TrainedModel& model, const std::vector<std::string>& names,
                   const std::vector<double>& values) {
  if (names != model.feature_names)
    throw std::runtime_error("predict: feature names do not match the fitted model");
  if (values.size() != names.size())
    throw std::invalid_argument("predict: value count does not match names");

  switch (model.kind()) {
    case ModelKind::Mlp: {
      const auto std_values = detail::apply_standardizer(model.norm, values);
      return from_score(mlp_score(std::get<MlpParams>(model.params), std_values));
    }
    case ModelKind::Gnb:
      return from_score(gnb_score(std::get<GnbParams>(model.params), values));
    case ModelKind::Tree: {
      const TreeNode& leaf = walk_tree(std::get<TreeParams>(model.params), values);
      return from_score(leaf.nobee_fraction);
    }
    case ModelKind::Forest: {
      const auto& forest = std::get<ForestParams>(model.params);
      long nobee = 0;
      for (const auto& tree : forest.trees)
        if (walk_tree(tree, values).nobee_fraction >= 0.5) ++nobee;
      const double frac = static_cast<double>(nobee) / static_cast<double>(forest.trees.size());
      if (!forest.config.tie_to_nobee && frac == 0.5) {
        Prediction pred;
        pred.score = frac;
        pred.label = Label::Bee;
        return pred;
      }
      return from_score(frac);
    }
    case ModelKind::Svm: {
      auto std_values = detail::apply_standardizer(model.norm, values);
      std_values.push_back(1.0);
      const auto& w = std::get<SvmParams>(model.params).weights;
      double margin = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) margin += w[j] * std_values[j];
      return from_score(detail::stable_sigmoid(margin));
    }
  }
  throw std::logic_error("predict: unreachable");
}

Prediction predict_row(const TrainedModel& model, const FeatureTable& table, std::size_t row) {
  return predict(model, table.feature_names, table.rows.at(row).values);
}

}  // namespace hivesound
