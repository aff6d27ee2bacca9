#pragma once

#include <vector>

#include "depsem/parameters.hpp"

namespace depsem {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are sized lazily on the first
// step against the store they are used with.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Updates every parameter from its accumulated gradient, then zeroes grads.
  void step(ParameterStore& store);

  long steps_taken() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<std::vector<Real>> m_;
  std::vector<std::vector<Real>> v_;
};

void adam_step(ParameterStore& store, Adam& state);

}  // namespace depsem
