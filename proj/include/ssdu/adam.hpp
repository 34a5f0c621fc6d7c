#pragma once

#include <cstdint>
#include <vector>

#include "ssdu/resnet.hpp"

namespace ssdu {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators, one pair per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  int64_t t = 0;

  static AdamState init(const std::vector<ParamRef>& params);
};

// Standard Adam update with bias correction:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
//   p <- p - lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
// Throws NumericalError naming the parameter on a non-finite gradient.
void adam_step(std::vector<ParamRef>& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg);

}  // namespace ssdu
