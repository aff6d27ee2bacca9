#include "depsem/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depsem/error.hpp"
#include "depsem/random.hpp"

namespace depsem {

std::string GradcheckReport::worst_tensor() const {
  const TensorCheck* worst = nullptr;
  for (const auto& t : tensors) {
    if (t.checked > 0 && (worst == nullptr || t.max_rel_error > worst->max_rel_error)) worst = &t;
  }
  return worst ? worst->name : std::string();
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradcheckReport fd_gradcheck(ParameterStore& store, const Objective& f,
                             const GradcheckOptions& options) {
  return fd_gradcheck(std::vector<ParameterStore*>{&store}, f, options);
}

GradcheckReport fd_gradcheck(const std::vector<ParameterStore*>& stores, const Objective& f,
                             const GradcheckOptions& options) {
  if (!(options.eps > 0)) throw ConfigError("gradcheck eps must be positive");

  for (auto* s : stores) s->zero_grad();
  const double base = f.value();
  if (!std::isfinite(base)) throw NumericalError("objective is not finite at the base point");
  f.gradient();

  Rng rng(options.seed);
  GradcheckReport report;
  std::vector<Parameter*> params;
  for (auto* s : stores) {
    for (auto& p : *s) params.push_back(&p);
  }
  for (Parameter* pp : params) {
    Parameter& param = *pp;
    TensorCheck tc;
    tc.name = param.name;
    if (!all_finite(param.grad.flat())) {
      throw NumericalError("analytic gradient of " + param.name + " is not finite");
    }

    std::vector<std::size_t> coords(param.value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_per_tensor != 0 && coords.size() > options.max_per_tensor) {
      for (std::size_t i = 0; i < options.max_per_tensor; ++i) {
        std::swap(coords[i], coords[i + rng.below(coords.size() - i)]);
      }
      coords.resize(options.max_per_tensor);
      std::sort(coords.begin(), coords.end());
    }

    for (std::size_t c : coords) {
      Real& x = param.value.flat()[c];
      const Real saved = x;
      x = saved + options.eps;
      const double up = f.value();
      x = saved - options.eps;
      const double down = f.value();
      x = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("objective is not finite when perturbing " + param.name);
      }
      const double numeric = (up - down) / (2.0 * options.eps);
      const double analytic = param.grad.flat()[c];
      tc.max_rel_error = std::max(tc.max_rel_error, relative_error(analytic, numeric));
      tc.max_abs_error = std::max(tc.max_abs_error, std::abs(analytic - numeric));
      ++tc.checked;
    }
    report.checked += tc.checked;
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.tensors.push_back(std::move(tc));
  }
  return report;
}

}  // namespace depsem
