#include "depsem/parameters.hpp"

#include "depsem/error.hpp"

namespace depsem {

std::string to_string(Dtype d) { return d == Dtype::F32 ? "f32" : "f64"; }

Dtype dtype_from_string(const std::string& s) {
  if (s == "f32" || s == "32") return Dtype::F32;
  if (s == "f64" || s == "64") return Dtype::F64;
  throw ConfigError("unknown dtype '" + s + "' (expected f32 or f64)");
}

ParamId ParameterStore::add(std::string name, int rank, Matrix value) {
  if (by_name_.count(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  if (value.empty()) throw DimensionError("parameter '" + name + "' has an empty shape");
  const std::size_t index = params_.size();
  Matrix grad(value.rows(), value.cols());
  by_name_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), rank, std::move(value), std::move(grad)});
  return ParamId{index};
}

ParamId ParameterStore::add_matrix(const std::string& name, Matrix value) {
  return add(name, 2, std::move(value));
}

ParamId ParameterStore::add_vector(const std::string& name, Vector value) {
  const std::size_t n = value.size();
  return add(name, 1, Matrix(n, 1, std::move(value)));
}

ParamId ParameterStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ConfigError("no parameter named '" + name + "'");
  return ParamId{it->second};
}

Parameter& ParameterStore::at(ParamId id) {
  if (id.index >= params_.size()) throw ConfigError("parameter id out of range");
  return params_[id.index];
}

const Parameter& ParameterStore::at(ParamId id) const {
  if (id.index >= params_.size()) throw ConfigError("parameter id out of range");
  return params_[id.index];
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

}  // namespace depsem
