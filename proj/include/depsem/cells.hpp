#pragma once

#include <cstdint>
#include <string>

#include "depsem/parameters.hpp"
#include "depsem/tensor.hpp"

namespace depsem {

Real sigmoid(Real x);

// Affine map y = W x + b.
struct Linear {
  ParamId W;
  ParamId b;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;

  // Glorot weights, zero bias.
  static Linear create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                       std::size_t out_dim, std::uint64_t seed);
  static Linear bind(const ParameterStore& store, const std::string& prefix);
};

Vector linear_forward(const ParameterStore& store, const Linear& lin, std::span<const Real> x);
// Accumulates dW, db into the store and returns dx.
Vector linear_backward(ParameterStore& store, const Linear& lin, std::span<const Real> x,
                       std::span<const Real> grad_out);

// GRU cell over a d-dimensional state with d-dimensional input:
//   z  = sigmoid(Wz a + Uz h + bz)
//   r  = sigmoid(Wr a + Ur h + br)
//   c  = tanh(Wh a + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * c
struct GruCell {
  ParamId Wz, Wr, Wh;
  ParamId Uz, Ur, Uh;
  ParamId bz, br, bh;
  std::size_t dim = 0;

  static GruCell create(ParameterStore& store, const std::string& prefix, std::size_t dim,
                        std::uint64_t seed);
  static GruCell bind(const ParameterStore& store, const std::string& prefix);
};

Vector gru_forward(const ParameterStore& store, const GruCell& cell, std::span<const Real> a,
                   std::span<const Real> h);

struct GruInputGrads {
  Vector grad_a;
  Vector grad_h;
};

// Recomputes the forward pass, accumulates parameter gradients into the store
// and returns the gradients with respect to both inputs.
GruInputGrads gru_backward(ParameterStore& store, const GruCell& cell, std::span<const Real> a,
                           std::span<const Real> h, std::span<const Real> grad_out);

// LSTM cell with stacked gate weights in the order input, forget, candidate,
// output. W is (4h x in), U is (4h x h), b is 4h.
struct LstmCell {
  ParamId W, U, b;
  std::size_t in_dim = 0;
  std::size_t hidden_dim = 0;

  static LstmCell create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                         std::size_t hidden_dim, std::uint64_t seed);
  static LstmCell bind(const ParameterStore& store, const std::string& prefix);
};

// Runs the cell over the rows of `inputs` (in row order) from zero state and
// returns the hidden state after each step, one row per step.
Matrix lstm_forward(const ParameterStore& store, const LstmCell& cell, const Matrix& inputs);
// Backpropagation through time. `grad_hidden` has one row per step.
Matrix lstm_backward(ParameterStore& store, const LstmCell& cell, const Matrix& inputs,
                     const Matrix& grad_hidden);

// Two independent LSTMs, left-to-right and right-to-left. Output row t is
// [forward_h(t), backward_h(t)], so the output width is 2 * hidden_dim.
struct Blstm {
  LstmCell forward;
  LstmCell backward;

  std::size_t in_dim() const { return forward.in_dim; }
  std::size_t hidden_dim() const { return forward.hidden_dim; }
  std::size_t out_dim() const { return 2 * forward.hidden_dim; }

  static Blstm create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                      std::size_t hidden_dim, std::uint64_t seed);
  static Blstm bind(const ParameterStore& store, const std::string& prefix);
};

Matrix blstm_forward(const ParameterStore& store, const Blstm& net, const Matrix& inputs);
Matrix blstm_backward(ParameterStore& store, const Blstm& net, const Matrix& inputs,
                      const Matrix& grad_out);

Matrix reverse_rows(const Matrix& m);

}  // namespace depsem
