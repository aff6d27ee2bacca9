#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "depsem/parameters.hpp"

namespace depsem {

// A scalar objective over the values held in one or more ParameterStores.
// `value` reads the current values; `gradient` accumulates the analytic
// gradient into the stores' gradient slots (zeroed before it is called).
struct Objective {
  std::function<double()> value;
  std::function<void()> gradient;
};

struct TensorCheck {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::vector<TensorCheck> tensors;

  // Name of the tensor holding the worst coordinate, empty if nothing checked.
  std::string worst_tensor() const;
};

struct GradcheckOptions {
  double eps = 1e-5;
  // 0 checks every coordinate; otherwise at most this many coordinates per
  // tensor, chosen with `seed`.
  std::size_t max_per_tensor = 0;
  std::uint64_t seed = 0;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Central differences (f(x + eps) - f(x - eps)) / (2 eps) for every checked
// coordinate, compared against the analytic gradient. Values are restored
// afterwards. Throws NumericalError on non-finite losses or gradients.
GradcheckReport fd_gradcheck(const std::vector<ParameterStore*>& stores, const Objective& f,
                             const GradcheckOptions& options = {});
GradcheckReport fd_gradcheck(ParameterStore& store, const Objective& f,
                             const GradcheckOptions& options = {});

}  // namespace depsem
