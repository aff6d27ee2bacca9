#include "depsem/tensor.hpp"

#include <cmath>

#include "depsem/error.hpp"

namespace depsem {

Matrix::Matrix(std::size_t rows, std::size_t cols, Real fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(Real v) {
  for (auto& x : data_) x = v;
}

std::string Matrix::shape_string() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

std::string shape_string(std::span<const Real> v) { return "[" + std::to_string(v.size()) + "]"; }

Vector matvec(const Matrix& W, std::span<const Real> x) {
  Vector y(W.rows(), 0.0);
  matvec_acc(W, x, y);
  return y;
}

void matvec_acc(const Matrix& W, std::span<const Real> x, std::span<Real> y) {
  if (W.cols() != x.size() || W.rows() != y.size()) {
    throw DimensionError("matvec: matrix " + W.shape_string() + " vs vector " + shape_string(x) +
                         " -> " + shape_string(y));
  }
  for (std::size_t i = 0; i < W.rows(); ++i) {
    const auto w = W.row(i);
    Real acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * x[k];
    y[i] += acc;
  }
}

void matvec_t_acc(const Matrix& W, std::span<const Real> x, std::span<Real> y) {
  if (W.rows() != x.size() || W.cols() != y.size()) {
    throw DimensionError("matvec_t: matrix " + W.shape_string() + " vs vector " + shape_string(x) +
                         " -> " + shape_string(y));
  }
  for (std::size_t i = 0; i < W.rows(); ++i) {
    const auto w = W.row(i);
    const Real xi = x[i];
    for (std::size_t k = 0; k < w.size(); ++k) y[k] += w[k] * xi;
  }
}

void outer_acc(std::span<const Real> u, std::span<const Real> v, Matrix& G) {
  if (G.rows() != u.size() || G.cols() != v.size()) {
    throw DimensionError("outer: " + shape_string(u) + " x " + shape_string(v) + " into " +
                         G.shape_string());
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto g = G.row(i);
    for (std::size_t k = 0; k < v.size(); ++k) g[k] += u[i] * v[k];
  }
}

void axpy(Real alpha, std::span<const Real> x, std::span<Real> y) {
  if (x.size() != y.size()) {
    throw DimensionError("axpy: " + shape_string(x) + " vs " + shape_string(y));
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const Real> v) {
  for (Real x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace depsem
