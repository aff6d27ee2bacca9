#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace depsem {

using Real = double;
using Vector = std::vector<Real>;

// Dense row-major matrix. Rows are exposed as spans so per-node states and
// embedding rows can be passed around without copies.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Real fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<Real> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Real operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Real> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<Real> flat() noexcept { return data_; }
  std::span<const Real> flat() const noexcept { return data_; }
  const std::vector<Real>& data() const noexcept { return data_; }

  void fill(Real v);
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

std::string shape_string(std::span<const Real> v);

// y = W x, accumulated left to right over k.
Vector matvec(const Matrix& W, std::span<const Real> x);
// y += W x
void matvec_acc(const Matrix& W, std::span<const Real> x, std::span<Real> y);
// y += W^T x
void matvec_t_acc(const Matrix& W, std::span<const Real> x, std::span<Real> y);
// G += u v^T
void outer_acc(std::span<const Real> u, std::span<const Real> v, Matrix& G);

void axpy(Real alpha, std::span<const Real> x, std::span<Real> y);
bool all_finite(std::span<const Real> v);

}  // namespace depsem
