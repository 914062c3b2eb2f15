#include "hivesound/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace hivesound {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
constexpr double kRmsRho = 0.9;
constexpr double kAdaDeltaRho = 0.95;
constexpr double kAdaDeltaEps = 1e-6;
constexpr double kFtrlBeta = 1.0;
constexpr double kFtrlInitAcc = 0.1;
}  // namespace

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::AdaMax: return "adamax";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::AdaGrad: return "adagrad";
    case OptimizerKind::AdaDelta: return "adadelta";
    case OptimizerKind::Nadam: return "nadam";
    case OptimizerKind::Ftrl: return "ftrl";
  }
  return "sgd";
}

OptimizerKind parse_optimizer(const std::string& text) {
  for (OptimizerKind k : all_optimizers())
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown optimizer: " + text);
}

const std::vector<OptimizerKind>& all_optimizers() {
  static const std::vector<OptimizerKind> kinds = {
      OptimizerKind::Adam,    OptimizerKind::AdaDelta, OptimizerKind::AdaGrad,
      OptimizerKind::AdaMax,  OptimizerKind::Ftrl,     OptimizerKind::Nadam,
      OptimizerKind::RmsProp, OptimizerKind::Sgd};
  return kinds;
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t size) : kind_(kind) {
  switch (kind_) {
    case OptimizerKind::Sgd:
      break;
    case OptimizerKind::AdaGrad:
    case OptimizerKind::RmsProp:
      slot1_.assign(size, 0.0);
      break;
    default:
      slot1_.assign(size, 0.0);
      slot2_.assign(size, 0.0);
      break;
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("optimizer: size mismatch");
  if (!slot1_.empty() && slot1_.size() != params.size())
    throw std::invalid_argument("optimizer: state size mismatch");
  ++t_;
  const auto n = params.size();

  switch (kind_) {
    case OptimizerKind::Sgd:
      for (std::size_t i = 0; i < n; ++i) params[i] -= lr * grads[i];
      break;

    case OptimizerKind::Adam: {
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
      const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] = kBeta1 * slot1_[i] + (1.0 - kBeta1) * grads[i];
        slot2_[i] = kBeta2 * slot2_[i] + (1.0 - kBeta2) * grads[i] * grads[i];
        params[i] -= lr * (slot1_[i] / bc1) / (std::sqrt(slot2_[i] / bc2) + kEps);
      }
      break;
    }

    case OptimizerKind::AdaMax: {
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] = kBeta1 * slot1_[i] + (1.0 - kBeta1) * grads[i];
        slot2_[i] = std::max(kBeta2 * slot2_[i], std::abs(grads[i]));
        params[i] -= (lr / bc1) * slot1_[i] / (slot2_[i] + kEps);
      }
      break;
    }

    case OptimizerKind::RmsProp:
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] = kRmsRho * slot1_[i] + (1.0 - kRmsRho) * grads[i] * grads[i];
        params[i] -= lr * grads[i] / (std::sqrt(slot1_[i]) + kEps);
      }
      break;

    case OptimizerKind::AdaGrad:
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] += grads[i] * grads[i];
        params[i] -= lr * grads[i] / (std::sqrt(slot1_[i]) + kEps);
      }
      break;

    case OptimizerKind::AdaDelta:
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] = kAdaDeltaRho * slot1_[i] + (1.0 - kAdaDeltaRho) * grads[i] * grads[i];
        const double delta =
            -std::sqrt(slot2_[i] + kAdaDeltaEps) / std::sqrt(slot1_[i] + kAdaDeltaEps) * grads[i];
        slot2_[i] = kAdaDeltaRho * slot2_[i] + (1.0 - kAdaDeltaRho) * delta * delta;
        params[i] += lr * delta;
      }
      break;

    case OptimizerKind::Nadam: {
      const double bc1_next = 1.0 - std::pow(kBeta1, static_cast<double>(t_ + 1));
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
      const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
      for (std::size_t i = 0; i < n; ++i) {
        slot1_[i] = kBeta1 * slot1_[i] + (1.0 - kBeta1) * grads[i];
        slot2_[i] = kBeta2 * slot2_[i] + (1.0 - kBeta2) * grads[i] * grads[i];
        const double lookahead =
            kBeta1 * slot1_[i] / bc1_next + (1.0 - kBeta1) * grads[i] / bc1;
        params[i] -= lr * lookahead / (std::sqrt(slot2_[i] / bc2) + kEps);
      }
      break;
    }

    case OptimizerKind::Ftrl: {
      // proximal accumulators with l1 = l2 = 0: theta = -z * alpha / (beta + sqrt(n))
      if (!initialized_) {
        initialized_ = true;
        for (std::size_t i = 0; i < n; ++i) {
          slot2_[i] = kFtrlInitAcc;
          slot1_[i] = -params[i] * (kFtrlBeta + std::sqrt(slot2_[i])) / lr;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        const double acc_new = slot2_[i] + g * g;
        const double sigma = (std::sqrt(acc_new) - std::sqrt(slot2_[i])) / lr;
        slot1_[i] += g - sigma * params[i];
        slot2_[i] = acc_new;
        params[i] = -slot1_[i] * lr / (kFtrlBeta + std::sqrt(slot2_[i]));
      }
      break;
    }
  }
}

}  // namespace hivesound
