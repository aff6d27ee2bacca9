#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "depsem/tensor.hpp"

namespace depsem {

// Storage precision for serialized parameters. Arithmetic is always 64-bit.
enum class Dtype { F32, F64 };

std::string to_string(Dtype d);
Dtype dtype_from_string(const std::string& s);

// Handle into a ParameterStore. Stable across copies of the store.
struct ParamId {
  std::size_t index = static_cast<std::size_t>(-1);
  friend bool operator==(ParamId, ParamId) = default;
};

struct Parameter {
  std::string name;
  int rank = 2;  // 1 for bias vectors (stored as dim x 1), 2 for matrices
  Matrix value;
  Matrix grad;
};

// Ordered collection of named parameters with same-shape gradient slots.
// Insertion order is the serialization order.
class ParameterStore {
 public:
  explicit ParameterStore(Dtype dtype = Dtype::F64) : dtype_(dtype) {}

  ParamId add_matrix(const std::string& name, Matrix value);
  ParamId add_vector(const std::string& name, Vector value);

  std::size_t size() const noexcept { return params_.size(); }
  ParamId find(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }

  Parameter& at(ParamId id);
  const Parameter& at(ParamId id) const;
  Parameter& at(std::size_t index) { return at(ParamId{index}); }
  const Parameter& at(std::size_t index) const { return at(ParamId{index}); }

  const Matrix& value(ParamId id) const { return at(id).value; }
  Matrix& value(ParamId id) { return at(id).value; }
  Matrix& grad(ParamId id) { return at(id).grad; }
  const Matrix& grad(ParamId id) const { return at(id).grad; }

  // Bias vectors are stored as dim x 1 matrices; these expose them flat.
  std::span<const Real> vec(ParamId id) const { return at(id).value.flat(); }
  std::span<Real> vec_grad(ParamId id) { return at(id).grad.flat(); }

  void zero_grad();
  std::size_t parameter_count() const;

  Dtype dtype() const noexcept { return dtype_; }
  void set_dtype(Dtype d) noexcept { dtype_ = d; }

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }

 private:
  ParamId add(std::string name, int rank, Matrix value);

  Dtype dtype_;
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> by_name_;
};

}  // namespace depsem
