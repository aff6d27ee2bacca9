#include "depsem/optim.hpp"

#include <cmath>

#include "depsem/error.hpp"

namespace depsem {

void Adam::step(ParameterStore& store) {
  if (!(config_.lr > 0)) throw ConfigError("Adam learning rate must be positive");
  if (m_.empty()) {
    for (const auto& p : store) {
      m_.emplace_back(p.value.size(), 0.0);
      v_.emplace_back(p.value.size(), 0.0);
    }
  } else if (m_.size() != store.size()) {
    throw ConfigError("Adam state was initialized for a different parameter store");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  std::size_t idx = 0;
  for (auto& p : store) {
    auto value = p.value.flat();
    auto grad = p.grad.flat();
    auto& m = m_[idx];
    auto& v = v_[idx];
    if (m.size() != value.size()) throw ConfigError("Adam state shape mismatch for " + p.name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      value[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
      grad[i] = 0.0;
    }
    ++idx;
  }
}

void adam_step(ParameterStore& store, Adam& state) { state.step(store); }

}  // namespace depsem
