#include <cmath>
#include <numeric>
#include <stdexcept>

#include "classifier_internal.hpp"
#include "hivesound/classifiers.hpp"
#include "hivesound/rng.hpp"

namespace hivesound {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
  }
  return "sigmoid";
}

Activation parse_activation(const std::string& text) {
  for (Activation a : all_activations())
    if (to_string(a) == text) return a;
  throw std::invalid_argument("unknown activation: " + text);
}

const std::vector<Activation>& all_activations() {
  static const std::vector<Activation> kinds = {Activation::Relu, Activation::Sigmoid,
                                                Activation::Tanh};
  return kinds;
}

namespace detail {

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

namespace {

using detail::stable_sigmoid;

double activate(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return stable_sigmoid(z);
    case Activation::Tanh: return std::tanh(z);
  }
  return z;
}

// derivative expressed through the activation value
double activate_grad(Activation a, double value) {
  switch (a) {
    case Activation::Relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return value * (1.0 - value);
    case Activation::Tanh: return 1.0 - value * value;
  }
  return 1.0;
}

struct MlpWork {
  std::vector<std::vector<double>> act;    // per layer output, act[0] is the input
  std::vector<std::vector<double>> delta;  // per layer

  explicit MlpWork(const std::vector<int>& sizes) {
    act.resize(sizes.size());
    delta.resize(sizes.size());
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      act[l].resize(static_cast<std::size_t>(sizes[l]));
      delta[l].resize(static_cast<std::size_t>(sizes[l]));
    }
  }
};

// forward pass; returns the sigmoid output
double forward_sample(const MlpParams& p, const double* x, MlpWork& work) {
  const std::size_t n_layers = p.weights.size();
  std::copy(x, x + work.act[0].size(), work.act[0].begin());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto in_n = work.act[l].size();
    const auto out_n = work.act[l + 1].size();
    const double* w = p.weights[l].data();
    const double* in = work.act[l].data();
    double* out = work.act[l + 1].data();
    const bool last = l + 1 == n_layers;
    for (std::size_t o = 0; o < out_n; ++o) {
      const double* row = w + o * in_n;
      double z = p.biases[l][o];
      for (std::size_t i = 0; i < in_n; ++i) z += row[i] * in[i];
      out[o] = last ? stable_sigmoid(z) : activate(p.spec.hidden_activation, z);
    }
  }
  return work.act[n_layers][0];
}

// accumulates dLoss/dparam into grads, given scale = weight of this sample
// in the batch mean. Output delta is (p - y), the BCE-through-sigmoid form.
void backward_sample(const MlpParams& p, MlpWork& work, double prediction, double target,
                     double scale, std::vector<std::vector<double>>& grad_w,
                     std::vector<std::vector<double>>& grad_b) {
  const std::size_t n_layers = p.weights.size();
  work.delta[n_layers][0] = (prediction - target) * scale;

  for (std::size_t l = n_layers; l-- > 0;) {
    const auto in_n = work.act[l].size();
    const auto out_n = work.act[l + 1].size();
    const double* in = work.act[l].data();
    const double* d = work.delta[l + 1].data();
    double* gw = grad_w[l].data();
    double* gb = grad_b[l].data();
    for (std::size_t o = 0; o < out_n; ++o) {
      const double dv = d[o];
      gb[o] += dv;
      double* row = gw + o * in_n;
      for (std::size_t i = 0; i < in_n; ++i) row[i] += dv * in[i];
    }
    if (l > 0) {
      double* dprev = work.delta[l].data();
      std::fill(dprev, dprev + in_n, 0.0);
      const double* w = p.weights[l].data();
      for (std::size_t o = 0; o < out_n; ++o) {
        const double dv = d[o];
        const double* row = w + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) dprev[i] += row[i] * dv;
      }
      for (std::size_t i = 0; i < in_n; ++i)
        dprev[i] *= activate_grad(p.spec.hidden_activation, in[i]);
    }
  }
}

double bce(double prediction, double target) {
  const double p = std::min(std::max(prediction, 1e-12), 1.0 - 1e-12);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

MlpParams init_params(const MlpSpec& spec, int n_features) {
  MlpParams p;
  p.spec = spec;
  p.layer_sizes.push_back(n_features);
  for (int h : spec.hidden_layers) {
    if (h < 1) throw std::invalid_argument("train_mlp: layer sizes must be >= 1");
    p.layer_sizes.push_back(h);
  }
  p.layer_sizes.push_back(1);

  Rng rng(derive_seed(spec.seed, 0));
  for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    const auto in_n = static_cast<std::size_t>(p.layer_sizes[l]);
    const auto out_n = static_cast<std::size_t>(p.layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in_n + out_n));
    std::vector<double> w(in_n * out_n);
    for (double& v : w) v = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(out_n, 0.0);
  }
  return p;
}

}  // namespace

TrainedModel train_mlp(const FeatureTable& table, const MlpSpec& spec) {
  if (table.rows.size() < 2) throw std::runtime_error("train_mlp: need at least two rows");
  detail::require_both_classes(table, "train_mlp");
  if (spec.epochs < 1 || spec.batch_size < 1)
    throw std::invalid_argument("train_mlp: epochs and batch size must be >= 1");

  TrainedModel model;
  model.feature_names = table.feature_names;
  model.norm = detail::fit_standardizer(table);

  const std::size_t n = table.rows.size();
  const std::size_t n_features = table.feature_names.size();
  std::vector<std::vector<double>> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = detail::apply_standardizer(model.norm, table.rows[i].values);
  const std::vector<double> y = detail::binary_targets(table);

  MlpParams params = init_params(spec, static_cast<int>(n_features));
  MlpWork work(params.layer_sizes);

  const std::size_t n_layers = params.weights.size();
  std::vector<std::vector<double>> grad_w(n_layers), grad_b(n_layers);
  std::vector<Optimizer> opt_w, opt_b;
  for (std::size_t l = 0; l < n_layers; ++l) {
    grad_w[l].assign(params.weights[l].size(), 0.0);
    grad_b[l].assign(params.biases[l].size(), 0.0);
    opt_w.emplace_back(spec.optimizer, params.weights[l].size());
    opt_b.emplace_back(spec.optimizer, params.biases[l].size());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(spec.seed, 1));

  long global_step = 0;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(spec.batch_size)) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(spec.batch_size));
      const double scale = 1.0 / static_cast<double>(end - begin);
      for (std::size_t l = 0; l < n_layers; ++l) {
        std::fill(grad_w[l].begin(), grad_w[l].end(), 0.0);
        std::fill(grad_b[l].begin(), grad_b[l].end(), 0.0);
      }
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t row = order[i];
        const double p = forward_sample(params, x[row].data(), work);
        epoch_loss += bce(p, y[row]);
        backward_sample(params, work, p, y[row], scale, grad_w, grad_b);
      }
      const double lr = spec.learning_rate / (1.0 + spec.decay * static_cast<double>(global_step));
      for (std::size_t l = 0; l < n_layers; ++l) {
        opt_w[l].step(params.weights[l], grad_w[l], lr);
        opt_b[l].step(params.biases[l], grad_b[l], lr);
      }
      ++global_step;
    }
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("train_mlp: loss diverged at epoch " + std::to_string(epoch + 1));
  }

  model.params = std::move(params);
  return model;
}

double mlp_loss(const MlpParams& params, const std::vector<std::vector<double>>& rows,
                const std::vector<double>& targets) {
  if (rows.size() != targets.size() || rows.empty())
    throw std::invalid_argument("mlp_loss: bad batch");
  MlpWork work(params.layer_sizes);
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    total += bce(forward_sample(params, rows[i].data(), work), targets[i]);
  return total / static_cast<double>(rows.size());
}

std::vector<double> mlp_loss_gradients(const MlpParams& params,
                                       const std::vector<std::vector<double>>& rows,
                                       const std::vector<double>& targets) {
  if (rows.size() != targets.size() || rows.empty())
    throw std::invalid_argument("mlp_loss_gradients: bad batch");
  MlpWork work(params.layer_sizes);
  const std::size_t n_layers = params.weights.size();
  std::vector<std::vector<double>> grad_w(n_layers), grad_b(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    grad_w[l].assign(params.weights[l].size(), 0.0);
    grad_b[l].assign(params.biases[l].size(), 0.0);
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double p = forward_sample(params, rows[i].data(), work);
    backward_sample(params, work, p, targets[i], scale, grad_w, grad_b);
  }
  std::vector<double> flat;
  for (std::size_t l = 0; l < n_layers; ++l) {
    flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
    flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
  }
  return flat;
}

std::vector<double> mlp_flatten(const MlpParams& params) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    flat.insert(flat.end(), params.weights[l].begin(), params.weights[l].end());
    flat.insert(flat.end(), params.biases[l].begin(), params.biases[l].end());
  }
  return flat;
}

void mlp_unflatten(MlpParams& params, const std::vector<double>& flat) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (double& v : params.weights[l]) v = flat.at(pos++);
    for (double& v : params.biases[l]) v = flat.at(pos++);
  }
  if (pos != flat.size()) throw std::invalid_argument("mlp_unflatten: size mismatch");
}

double mlp_score(const MlpParams& params, const std::vector<double>& standardized) {
  MlpWork work(params.layer_sizes);
  return forward_sample(params, standardized.data(), work);
}

}  // namespace hivesound
