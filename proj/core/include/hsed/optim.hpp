#pragma once

#include <vector>

#include "hsed/tensor.hpp"

namespace hsed {

struct AdamConfig {
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed set of leaf tensors.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void zero_grad();
  void step();  // reads each param's accumulated grad

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace hsed
