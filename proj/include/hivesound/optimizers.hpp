#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hivesound {

enum class OptimizerKind { Sgd, Adam, AdaMax, RmsProp, AdaGrad, AdaDelta, Nadam, Ftrl };

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& text);
const std::vector<OptimizerKind>& all_optimizers();

// Element-wise first-order update rules, one instance per parameter tensor.
// All rules are deterministic; the step count t advances by one per call.
//
//   SGD      theta -= lr * g
//   Adam     m = b1*m + (1-b1)*g; v = b2*v + (1-b2)*g^2
//            theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
//   AdaMax   m = b1*m + (1-b1)*g; u = max(b2*u, |g|)
//            theta -= (lr / (1-b1^t)) * m / (u + eps)
//   RMSProp  v = rho*v + (1-rho)*g^2; theta -= lr * g / (sqrt(v) + eps)
//   AdaGrad  a += g^2; theta -= lr * g / (sqrt(a) + eps)
//   AdaDelta ag = rho*ag + (1-rho)*g^2
//            d = -sqrt(ad + eps) / sqrt(ag + eps) * g
//            ad = rho*ad + (1-rho)*d^2; theta += lr * d
//   Nadam    Adam accumulators with Nesterov lookahead on the m-hat term
//   FTRL     proximal accumulators (z, n) with l1 = l2 = 0; z is
//            initialized from the incoming parameters on the first step
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, std::size_t size);

  void step(std::span<double> params, std::span<const double> grads, double lr);

  OptimizerKind kind() const { return kind_; }
  long steps_taken() const { return t_; }

 private:
  OptimizerKind kind_;
  long t_ = 0;
  bool initialized_ = false;
  std::vector<double> slot1_, slot2_;
};

}  // namespace hivesound
