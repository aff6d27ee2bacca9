#include "depsem/cells.hpp"

#include <algorithm>
#include <cmath>

#include "depsem/error.hpp"
#include "depsem/random.hpp"

namespace depsem {

namespace {

void require_dim(std::span<const Real> v, std::size_t d, const char* what) {
  if (v.size() != d) {
    throw DimensionError(std::string(what) + ": expected dim " + std::to_string(d) + ", got " +
                         shape_string(v));
  }
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(what + ": expected [" + std::to_string(rows) + "x" +
                         std::to_string(cols) + "], got " + m.shape_string());
  }
}

void add_into(std::span<const Real> src, std::span<Real> dst) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace

Real sigmoid(Real x) {
  if (x >= 0) {
    const Real e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Linear

Linear Linear::create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                      std::size_t out_dim, std::uint64_t seed) {
  Linear lin;
  lin.W = store.add_matrix(prefix + ".W", glorot_init(out_dim, in_dim, seed));
  lin.b = store.add_vector(prefix + ".b", Vector(out_dim, 0.0));
  lin.in_dim = in_dim;
  lin.out_dim = out_dim;
  return lin;
}

Linear Linear::bind(const ParameterStore& store, const std::string& prefix) {
  Linear lin;
  lin.W = store.find(prefix + ".W");
  lin.b = store.find(prefix + ".b");
  lin.out_dim = store.value(lin.W).rows();
  lin.in_dim = store.value(lin.W).cols();
  require_shape(store.value(lin.b), lin.out_dim, 1, prefix + ".b");
  return lin;
}

Vector linear_forward(const ParameterStore& store, const Linear& lin, std::span<const Real> x) {
  require_dim(x, lin.in_dim, "linear_forward");
  Vector y(store.vec(lin.b).begin(), store.vec(lin.b).end());
  matvec_acc(store.value(lin.W), x, y);
  return y;
}

Vector linear_backward(ParameterStore& store, const Linear& lin, std::span<const Real> x,
                       std::span<const Real> grad_out) {
  require_dim(x, lin.in_dim, "linear_backward input");
  require_dim(grad_out, lin.out_dim, "linear_backward grad_out");
  outer_acc(grad_out, x, store.grad(lin.W));
  add_into(grad_out, store.vec_grad(lin.b));
  Vector dx(lin.in_dim, 0.0);
  matvec_t_acc(store.value(lin.W), grad_out, dx);
  return dx;
}

// ---------------------------------------------------------------------------
// GRU

GruCell GruCell::create(ParameterStore& store, const std::string& prefix, std::size_t dim,
                        std::uint64_t seed) {
  if (dim == 0) throw DimensionError("GRU dim must be positive");
  GruCell c;
  c.dim = dim;
  c.Wz = store.add_matrix(prefix + ".Wz", glorot_init(dim, dim, derive_seed(seed, 1)));
  c.Wr = store.add_matrix(prefix + ".Wr", glorot_init(dim, dim, derive_seed(seed, 2)));
  c.Wh = store.add_matrix(prefix + ".Wh", glorot_init(dim, dim, derive_seed(seed, 3)));
  c.Uz = store.add_matrix(prefix + ".Uz", glorot_init(dim, dim, derive_seed(seed, 4)));
  c.Ur = store.add_matrix(prefix + ".Ur", glorot_init(dim, dim, derive_seed(seed, 5)));
  c.Uh = store.add_matrix(prefix + ".Uh", glorot_init(dim, dim, derive_seed(seed, 6)));
  c.bz = store.add_vector(prefix + ".bz", Vector(dim, 0.0));
  c.br = store.add_vector(prefix + ".br", Vector(dim, 0.0));
  c.bh = store.add_vector(prefix + ".bh", Vector(dim, 0.0));
  return c;
}

GruCell GruCell::bind(const ParameterStore& store, const std::string& prefix) {
  GruCell c;
  c.Wz = store.find(prefix + ".Wz");
  c.Wr = store.find(prefix + ".Wr");
  c.Wh = store.find(prefix + ".Wh");
  c.Uz = store.find(prefix + ".Uz");
  c.Ur = store.find(prefix + ".Ur");
  c.Uh = store.find(prefix + ".Uh");
  c.bz = store.find(prefix + ".bz");
  c.br = store.find(prefix + ".br");
  c.bh = store.find(prefix + ".bh");
  c.dim = store.value(c.Wz).rows();
  for (ParamId m : {c.Wz, c.Wr, c.Wh, c.Uz, c.Ur, c.Uh}) {
    require_shape(store.value(m), c.dim, c.dim, store.at(m).name);
  }
  for (ParamId b : {c.bz, c.br, c.bh}) require_shape(store.value(b), c.dim, 1, store.at(b).name);
  return c;
}

namespace {

struct GruActivations {
  Vector z, r, rh, c, out;
};

GruActivations gru_activations(const ParameterStore& s, const GruCell& cell,
                               std::span<const Real> a, std::span<const Real> h) {
  require_dim(a, cell.dim, "gru input");
  require_dim(h, cell.dim, "gru state");
  const std::size_t d = cell.dim;
  GruActivations act;
  act.z.assign(s.vec(cell.bz).begin(), s.vec(cell.bz).end());
  matvec_acc(s.value(cell.Wz), a, act.z);
  matvec_acc(s.value(cell.Uz), h, act.z);
  act.r.assign(s.vec(cell.br).begin(), s.vec(cell.br).end());
  matvec_acc(s.value(cell.Wr), a, act.r);
  matvec_acc(s.value(cell.Ur), h, act.r);
  for (std::size_t i = 0; i < d; ++i) {
    act.z[i] = sigmoid(act.z[i]);
    act.r[i] = sigmoid(act.r[i]);
  }
  act.rh.resize(d);
  for (std::size_t i = 0; i < d; ++i) act.rh[i] = act.r[i] * h[i];
  act.c.assign(s.vec(cell.bh).begin(), s.vec(cell.bh).end());
  matvec_acc(s.value(cell.Wh), a, act.c);
  matvec_acc(s.value(cell.Uh), act.rh, act.c);
  act.out.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    act.c[i] = std::tanh(act.c[i]);
    act.out[i] = (1.0 - act.z[i]) * h[i] + act.z[i] * act.c[i];
  }
  return act;
}

}  // namespace

Vector gru_forward(const ParameterStore& store, const GruCell& cell, std::span<const Real> a,
                   std::span<const Real> h) {
  return gru_activations(store, cell, a, h).out;
}

GruInputGrads gru_backward(ParameterStore& store, const GruCell& cell, std::span<const Real> a,
                           std::span<const Real> h, std::span<const Real> grad_out) {
  require_dim(grad_out, cell.dim, "gru grad_out");
  const GruActivations act = gru_activations(store, cell, a, h);
  const std::size_t d = cell.dim;

  GruInputGrads g{Vector(d, 0.0), Vector(d, 0.0)};
  Vector dz_pre(d), dc_pre(d), dr_pre(d), drh(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const Real go = grad_out[i];
    g.grad_h[i] = go * (1.0 - act.z[i]);
    dz_pre[i] = go * (act.c[i] - h[i]) * act.z[i] * (1.0 - act.z[i]);
    dc_pre[i] = go * act.z[i] * (1.0 - act.c[i] * act.c[i]);
  }

  // candidate path
  outer_acc(dc_pre, a, store.grad(cell.Wh));
  outer_acc(dc_pre, act.rh, store.grad(cell.Uh));
  add_into(dc_pre, store.vec_grad(cell.bh));
  matvec_t_acc(store.value(cell.Wh), dc_pre, g.grad_a);
  matvec_t_acc(store.value(cell.Uh), dc_pre, drh);

  for (std::size_t i = 0; i < d; ++i) {
    g.grad_h[i] += drh[i] * act.r[i];
    dr_pre[i] = drh[i] * h[i] * act.r[i] * (1.0 - act.r[i]);
  }

  // reset gate
  outer_acc(dr_pre, a, store.grad(cell.Wr));
  outer_acc(dr_pre, h, store.grad(cell.Ur));
  add_into(dr_pre, store.vec_grad(cell.br));
  matvec_t_acc(store.value(cell.Wr), dr_pre, g.grad_a);
  matvec_t_acc(store.value(cell.Ur), dr_pre, g.grad_h);

  // update gate
  outer_acc(dz_pre, a, store.grad(cell.Wz));
  outer_acc(dz_pre, h, store.grad(cell.Uz));
  add_into(dz_pre, store.vec_grad(cell.bz));
  matvec_t_acc(store.value(cell.Wz), dz_pre, g.grad_a);
  matvec_t_acc(store.value(cell.Uz), dz_pre, g.grad_h);
  return g;
}

// ---------------------------------------------------------------------------
// LSTM / BLSTM

LstmCell LstmCell::create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                          std::size_t hidden_dim, std::uint64_t seed) {
  if (in_dim == 0 || hidden_dim == 0) throw DimensionError("LSTM dims must be positive");
  LstmCell c;
  c.in_dim = in_dim;
  c.hidden_dim = hidden_dim;
  c.W = store.add_matrix(prefix + ".W", glorot_init(4 * hidden_dim, in_dim, derive_seed(seed, 1)));
  c.U = store.add_matrix(prefix + ".U",
                         glorot_init(4 * hidden_dim, hidden_dim, derive_seed(seed, 2)));
  c.b = store.add_vector(prefix + ".b", Vector(4 * hidden_dim, 0.0));
  return c;
}

LstmCell LstmCell::bind(const ParameterStore& store, const std::string& prefix) {
  LstmCell c;
  c.W = store.find(prefix + ".W");
  c.U = store.find(prefix + ".U");
  c.b = store.find(prefix + ".b");
  c.in_dim = store.value(c.W).cols();
  c.hidden_dim = store.value(c.U).cols();
  require_shape(store.value(c.W), 4 * c.hidden_dim, c.in_dim, prefix + ".W");
  require_shape(store.value(c.U), 4 * c.hidden_dim, c.hidden_dim, prefix + ".U");
  require_shape(store.value(c.b), 4 * c.hidden_dim, 1, prefix + ".b");
  return c;
}

namespace {

// Per-step activations kept for backpropagation through time.
struct LstmTrace {
  Matrix gates;  // post-activation i, f, g, o stacked per step (n x 4h)
  Matrix cells;  // c_t (n x h)
  Matrix hidden; // h_t (n x h)
};

LstmTrace lstm_trace(const ParameterStore& s, const LstmCell& cell, const Matrix& inputs) {
  if (inputs.rows() == 0) throw DimensionError("lstm: empty input sequence");
  if (inputs.cols() != cell.in_dim) {
    throw DimensionError("lstm: input width " + std::to_string(inputs.cols()) +
                         " does not match cell input dim " + std::to_string(cell.in_dim));
  }
  const std::size_t n = inputs.rows();
  const std::size_t hd = cell.hidden_dim;
  LstmTrace t{Matrix(n, 4 * hd), Matrix(n, hd), Matrix(n, hd)};
  Vector h_prev(hd, 0.0), c_prev(hd, 0.0);
  for (std::size_t step = 0; step < n; ++step) {
    Vector pre(s.vec(cell.b).begin(), s.vec(cell.b).end());
    matvec_acc(s.value(cell.W), inputs.row(step), pre);
    matvec_acc(s.value(cell.U), h_prev, pre);
    auto gates = t.gates.row(step);
    auto c = t.cells.row(step);
    auto h = t.hidden.row(step);
    for (std::size_t k = 0; k < hd; ++k) {
      const Real i = sigmoid(pre[k]);
      const Real f = sigmoid(pre[hd + k]);
      const Real g = std::tanh(pre[2 * hd + k]);
      const Real o = sigmoid(pre[3 * hd + k]);
      gates[k] = i;
      gates[hd + k] = f;
      gates[2 * hd + k] = g;
      gates[3 * hd + k] = o;
      c[k] = f * c_prev[k] + i * g;
      h[k] = o * std::tanh(c[k]);
    }
    h_prev.assign(h.begin(), h.end());
    c_prev.assign(c.begin(), c.end());
  }
  return t;
}

}  // namespace

Matrix lstm_forward(const ParameterStore& store, const LstmCell& cell, const Matrix& inputs) {
  return lstm_trace(store, cell, inputs).hidden;
}

Matrix lstm_backward(ParameterStore& store, const LstmCell& cell, const Matrix& inputs,
                     const Matrix& grad_hidden) {
  const LstmTrace t = lstm_trace(store, cell, inputs);
  const std::size_t n = inputs.rows();
  const std::size_t hd = cell.hidden_dim;
  require_shape(grad_hidden, n, hd, "lstm grad_hidden");

  Matrix grad_inputs(n, cell.in_dim);
  Vector dh_next(hd, 0.0), dc_next(hd, 0.0);
  Vector dpre(4 * hd);
  const Vector zeros(hd, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    const auto gates = t.gates.row(s);
    const auto c = t.cells.row(s);
    const auto c_prev = s > 0 ? t.cells.row(s - 1) : std::span<const Real>(zeros);
    const auto h_prev = s > 0 ? t.hidden.row(s - 1) : std::span<const Real>(zeros);
    for (std::size_t k = 0; k < hd; ++k) {
      const Real i = gates[k], f = gates[hd + k], g = gates[2 * hd + k], o = gates[3 * hd + k];
      const Real dh = grad_hidden(s, k) + dh_next[k];
      const Real tc = std::tanh(c[k]);
      const Real dc = dc_next[k] + dh * o * (1.0 - tc * tc);
      dpre[k] = dc * g * i * (1.0 - i);
      dpre[hd + k] = dc * c_prev[k] * f * (1.0 - f);
      dpre[2 * hd + k] = dc * i * (1.0 - g * g);
      dpre[3 * hd + k] = dh * tc * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    outer_acc(dpre, inputs.row(s), store.grad(cell.W));
    outer_acc(dpre, h_prev, store.grad(cell.U));
    add_into(dpre, store.vec_grad(cell.b));
    matvec_t_acc(store.value(cell.W), dpre, grad_inputs.row(s));
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    matvec_t_acc(store.value(cell.U), dpre, dh_next);
  }
  return grad_inputs;
}

Blstm Blstm::create(ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                    std::size_t hidden_dim, std::uint64_t seed) {
  Blstm net;
  net.forward = LstmCell::create(store, prefix + ".fwd", in_dim, hidden_dim, derive_seed(seed, 1));
  net.backward = LstmCell::create(store, prefix + ".bwd", in_dim, hidden_dim, derive_seed(seed, 2));
  return net;
}

Blstm Blstm::bind(const ParameterStore& store, const std::string& prefix) {
  Blstm net;
  net.forward = LstmCell::bind(store, prefix + ".fwd");
  net.backward = LstmCell::bind(store, prefix + ".bwd");
  if (net.forward.in_dim != net.backward.in_dim ||
      net.forward.hidden_dim != net.backward.hidden_dim) {
    throw DimensionError("blstm: forward and backward cells disagree on shape");
  }
  return net;
}

Matrix reverse_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.row(m.rows() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Matrix blstm_forward(const ParameterStore& store, const Blstm& net, const Matrix& inputs) {
  if (inputs.rows() == 0) throw DimensionError("blstm: empty input sequence");
  const Matrix fw = lstm_forward(store, net.forward, inputs);
  const Matrix bw = reverse_rows(lstm_forward(store, net.backward, reverse_rows(inputs)));
  const std::size_t hd = net.hidden_dim();
  Matrix out(inputs.rows(), 2 * hd);
  for (std::size_t t = 0; t < inputs.rows(); ++t) {
    std::copy(fw.row(t).begin(), fw.row(t).end(), out.row(t).begin());
    std::copy(bw.row(t).begin(), bw.row(t).end(), out.row(t).begin() + hd);
  }
  return out;
}

Matrix blstm_backward(ParameterStore& store, const Blstm& net, const Matrix& inputs,
                      const Matrix& grad_out) {
  if (inputs.rows() == 0) throw DimensionError("blstm: empty input sequence");
  const std::size_t n = inputs.rows();
  const std::size_t hd = net.hidden_dim();
  require_shape(grad_out, n, 2 * hd, "blstm grad_out");
  Matrix g_fw(n, hd), g_bw(n, hd);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < hd; ++k) {
      g_fw(t, k) = grad_out(t, k);
      g_bw(t, k) = grad_out(t, hd + k);
    }
  }
  Matrix dx = lstm_backward(store, net.forward, inputs, g_fw);
  const Matrix dx_bw =
      reverse_rows(lstm_backward(store, net.backward, reverse_rows(inputs), reverse_rows(g_bw)));
  add_into(dx_bw.flat(), dx.flat());
  return dx;
}

}  // namespace depsem
