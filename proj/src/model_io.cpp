#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hivesound/classifiers.hpp"

namespace hivesound {

namespace {

constexpr const char* kMagic = "hivesound-model";
constexpr int kVersion = 1;

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << key << ' ' << v.size();
  for (double x : v) {
    out << ' ';
    put(out, x);
  }
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of file");
    return w;
  }

  std::string expect_key(const std::string& key) {
    const std::string w = word();
    if (w != key) fail("expected '" + key + "', got '" + w + "'");
    return w;
  }

  long integer() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const long v = std::stol(w, &used);
      if (used != w.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, got '" + w + "'");
    }
  }

  std::uint64_t unsigned_integer() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(w, &used);
      if (used != w.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected an unsigned integer, got '" + w + "'");
    }
  }

  // strtod-based so "nan" and "inf" round-trip
  double real() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + w + "'");
    }
  }

  std::vector<double> vector(const std::string& key) {
    expect_key(key);
    const long n = integer();
    if (n < 0) fail("negative vector length");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = real();
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error(path_ + ": bad model file: " + msg);
  }

 private:
  std::istream& in_;
  std::string path_;
};

void save_tree(std::ostream& out, const TreeParams& tree) {
  out << "criterion " << to_string(tree.config.criterion) << '\n';
  out << "max_depth " << tree.config.max_depth << '\n';
  out << "min_split " << tree.config.min_split << '\n';
  out << "nodes " << tree.nodes.size() << '\n';
  for (const auto& n : tree.nodes) {
    out << "node " << n.feature << ' ';
    put(out, n.threshold);
    out << ' ' << n.left << ' ' << n.right << ' ';
    put(out, n.nobee_fraction);
    out << ' ' << n.count << '\n';
  }
}

TreeParams load_tree(Reader& r) {
  TreeParams tree;
  r.expect_key("criterion");
  tree.config.criterion = parse_criterion(r.word());
  r.expect_key("max_depth");
  tree.config.max_depth = static_cast<int>(r.integer());
  r.expect_key("min_split");
  tree.config.min_split = static_cast<int>(r.integer());
  r.expect_key("nodes");
  const long count = r.integer();
  tree.nodes.resize(static_cast<std::size_t>(count));
  for (auto& n : tree.nodes) {
    r.expect_key("node");
    n.feature = static_cast<int>(r.integer());
    n.threshold = r.real();
    n.left = static_cast<int>(r.integer());
    n.right = static_cast<int>(r.integer());
    n.nobee_fraction = r.real();
    n.count = static_cast<int>(r.integer());
  }
  return tree;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(model.kind()) << '\n';
  out << "features " << model.feature_names.size() << '\n';
  out << "feature_names";
  for (const auto& n : model.feature_names) out << ' ' << n;
  out << '\n';
  put_vector(out, "norm_mean", model.norm.mean);
  put_vector(out, "norm_std", model.norm.stddev);
  out << "norm_const " << model.norm.constant.size();
  for (auto c : model.norm.constant) out << ' ' << static_cast<int>(c);
  out << '\n';

  switch (model.kind()) {
    case ModelKind::Mlp: {
      const auto& p = std::get<MlpParams>(model.params);
      out << "activation " << to_string(p.spec.hidden_activation) << '\n';
      out << "optimizer " << to_string(p.spec.optimizer) << '\n';
      out << "lr ";
      put(out, p.spec.learning_rate);
      out << '\n' << "decay ";
      put(out, p.spec.decay);
      out << '\n';
      out << "epochs " << p.spec.epochs << '\n';
      out << "batch " << p.spec.batch_size << '\n';
      out << "seed " << p.spec.seed << '\n';
      out << "layers " << p.layer_sizes.size();
      for (int s : p.layer_sizes) out << ' ' << s;
      out << '\n';
      for (std::size_t l = 0; l < p.weights.size(); ++l) {
        put_vector(out, "weights", p.weights[l]);
        put_vector(out, "biases", p.biases[l]);
      }
      break;
    }
    case ModelKind::Gnb: {
      const auto& p = std::get<GnbParams>(model.params);
      out << "priors ";
      put(out, p.prior[0]);
      out << ' ';
      put(out, p.prior[1]);
      out << '\n';
      put_vector(out, "mean_bee", p.mean[0]);
      put_vector(out, "var_bee", p.variance[0]);
      put_vector(out, "mean_nobee", p.mean[1]);
      put_vector(out, "var_nobee", p.variance[1]);
      break;
    }
    case ModelKind::Tree:
      save_tree(out, std::get<TreeParams>(model.params));
      break;
    case ModelKind::Forest: {
      const auto& p = std::get<ForestParams>(model.params);
      out << "trees " << p.trees.size() << '\n';
      out << "max_features " << p.config.max_features << '\n';
      out << "bootstrap " << (p.config.bootstrap ? 1 : 0) << '\n';
      out << "tie_to_nobee " << (p.config.tie_to_nobee ? 1 : 0) << '\n';
      out << "seed " << p.config.seed << '\n';
      out << "oob ";
      put(out, p.oob_accuracy);
      out << '\n';
      put_vector(out, "importances", p.importances);
      for (const auto& tree : p.trees) save_tree(out, tree);
      break;
    }
    case ModelKind::Svm: {
      const auto& p = std::get<SvmParams>(model.params);
      out << "c ";
      put(out, p.config.c);
      out << '\n';
      out << "epochs " << p.config.epochs << '\n';
      out << "seed " << p.config.seed << '\n';
      put_vector(out, "weights", p.weights);
      break;
    }
  }
  out << "end\n";

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << out.str();
  if (!f) throw std::runtime_error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  Reader r(f, path);

  if (r.word() != kMagic) r.fail("wrong magic");
  if (r.integer() != kVersion) r.fail("unsupported version");

  r.expect_key("kind");
  const ModelKind kind = parse_model_kind(r.word());

  TrainedModel model;
  r.expect_key("features");
  const long n_features = r.integer();
  if (n_features < 1) r.fail("no features");
  r.expect_key("feature_names");
  model.feature_names.resize(static_cast<std::size_t>(n_features));
  for (auto& n : model.feature_names) n = r.word();
  model.norm.mean = r.vector("norm_mean");
  model.norm.stddev = r.vector("norm_std");
  r.expect_key("norm_const");
  {
    const long n = r.integer();
    model.norm.constant.resize(static_cast<std::size_t>(n));
    for (auto& c : model.norm.constant) c = static_cast<std::uint8_t>(r.integer());
  }
  if (model.norm.mean.size() != model.feature_names.size() ||
      model.norm.stddev.size() != model.feature_names.size())
    r.fail("normalization size mismatch");

  switch (kind) {
    case ModelKind::Mlp: {
      MlpParams p;
      r.expect_key("activation");
      p.spec.hidden_activation = parse_activation(r.word());
      r.expect_key("optimizer");
      p.spec.optimizer = parse_optimizer(r.word());
      r.expect_key("lr");
      p.spec.learning_rate = r.real();
      r.expect_key("decay");
      p.spec.decay = r.real();
      r.expect_key("epochs");
      p.spec.epochs = static_cast<int>(r.integer());
      r.expect_key("batch");
      p.spec.batch_size = static_cast<int>(r.integer());
      r.expect_key("seed");
      p.spec.seed = r.unsigned_integer();
      r.expect_key("layers");
      const long n_sizes = r.integer();
      p.layer_sizes.resize(static_cast<std::size_t>(n_sizes));
      for (auto& s : p.layer_sizes) s = static_cast<int>(r.integer());
      p.spec.hidden_layers.assign(p.layer_sizes.begin() + 1, p.layer_sizes.end() - 1);
      for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        p.weights.push_back(r.vector("weights"));
        p.biases.push_back(r.vector("biases"));
        const auto expect = static_cast<std::size_t>(p.layer_sizes[l]) *
                            static_cast<std::size_t>(p.layer_sizes[l + 1]);
        if (p.weights.back().size() != expect ||
            p.biases.back().size() != static_cast<std::size_t>(p.layer_sizes[l + 1]))
          r.fail("layer shape mismatch");
      }
      model.params = std::move(p);
      break;
    }
    case ModelKind::Gnb: {
      GnbParams p;
      r.expect_key("priors");
      p.prior[0] = r.real();
      p.prior[1] = r.real();
      p.mean[0] = r.vector("mean_bee");
      p.variance[0] = r.vector("var_bee");
      p.mean[1] = r.vector("mean_nobee");
      p.variance[1] = r.vector("var_nobee");
      model.params = std::move(p);
      break;
    }
    case ModelKind::Tree:
      model.params = load_tree(r);
      break;
    case ModelKind::Forest: {
      ForestParams p;
      r.expect_key("trees");
      const long n_trees = r.integer();
      p.config.n_trees = static_cast<int>(n_trees);
      r.expect_key("max_features");
      p.config.max_features = static_cast<int>(r.integer());
      r.expect_key("bootstrap");
      p.config.bootstrap = r.integer() != 0;
      r.expect_key("tie_to_nobee");
      p.config.tie_to_nobee = r.integer() != 0;
      r.expect_key("seed");
      p.config.seed = r.unsigned_integer();
      r.expect_key("oob");
      p.oob_accuracy = r.real();
      p.importances = r.vector("importances");
      for (long t = 0; t < n_trees; ++t) p.trees.push_back(load_tree(r));
      if (!p.trees.empty()) p.config.tree = p.trees[0].config;
      model.params = std::move(p);
      break;
    }
    case ModelKind::Svm: {
      SvmParams p;
      r.expect_key("c");
      p.config.c = r.real();
      r.expect_key("epochs");
      p.config.epochs = static_cast<int>(r.integer());
      r.expect_key("seed");
      p.config.seed = r.unsigned_integer();
      p.weights = r.vector("weights");
      if (p.weights.size() != model.feature_names.size() + 1) r.fail("svm weight size mismatch");
      model.params = std::move(p);
      break;
    }
  }
  r.expect_key("end");
  return model;
}

}  // namespace hivesound
