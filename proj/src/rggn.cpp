#include "depsem/rggn.hpp"

#include <algorithm>

#include "depsem/error.hpp"
#include "depsem/random.hpp"

namespace depsem {

namespace {

std::string edge_name(const std::string& dir, std::size_t rel) {
  return dir + ".edge." + std::to_string(rel);
}

void add_direction(ParameterStore& store, const std::string& dir, std::size_t dim,
                   std::size_t relations, std::uint64_t seed) {
  for (std::size_t r = 0; r < relations; ++r) {
    store.add_matrix(edge_name(dir, r), glorot_init(dim, dim, derive_seed(seed, r)));
  }
  GruCell::create(store, dir + ".gru", dim, derive_seed(seed, relations + 1));
  Linear::create(store, dir + ".fc", dim, dim, derive_seed(seed, relations + 2));
}

RggnDirectionParams bind_direction(const ParameterStore& store, const std::string& dir,
                                   std::size_t dim, std::size_t relations) {
  RggnDirectionParams p;
  for (std::size_t r = 0; r < relations; ++r) {
    const ParamId id = store.find(edge_name(dir, r));
    const Matrix& W = store.value(id);
    if (W.rows() != dim || W.cols() != dim) {
      throw DimensionError(store.at(id).name + " has shape " + W.shape_string() +
                           " but the model dim is " + std::to_string(dim));
    }
    p.edge_weights.push_back(id);
  }
  p.gru = GruCell::bind(store, dir + ".gru");
  p.fc = Linear::bind(store, dir + ".fc");
  if (p.gru.dim != dim || p.fc.in_dim != dim || p.fc.out_dim != dim) {
    throw DimensionError(dir + ": GRU/FC dims disagree with model dim " + std::to_string(dim));
  }
  return p;
}

void check_states(const RelationalGraph& graph, const RggnDirectionParams& params,
                  const Matrix& states) {
  if (states.rows() != graph.node_count()) {
    throw DimensionError("state matrix has " + std::to_string(states.rows()) + " rows for " +
                         std::to_string(graph.node_count()) + " nodes");
  }
  if (states.cols() != params.dim()) {
    throw DimensionError("state width " + std::to_string(states.cols()) +
                         " does not match hidden dim " + std::to_string(params.dim()));
  }
  if (graph.relation_count() > params.edge_weights.size()) {
    throw DimensionError("graph uses " + std::to_string(graph.relation_count()) +
                         " relation ids but the model has " +
                         std::to_string(params.edge_weights.size()) + " edge matrices");
  }
}

struct DirectionTrace {
  std::vector<Matrix> states;    // h^0 .. h^K
  std::vector<Matrix> messages;  // a^0 .. a^{K-1}
};

DirectionTrace trace_direction(const RelationalGraph& graph, const ParameterStore& store,
                               const RggnDirectionParams& params, const Matrix& init,
                               std::size_t iterations) {
  check_states(graph, params, init);
  DirectionTrace t;
  t.states.reserve(iterations + 1);
  t.states.push_back(init);
  for (std::size_t k = 0; k < iterations; ++k) {
    const Matrix& h = t.states.back();
    Matrix a = aggregate_messages(graph, store, params, h);
    Matrix next(h.rows(), h.cols());
    for (std::size_t i = 0; i < h.rows(); ++i) {
      const Vector hi = gru_forward(store, params.gru, a.row(i), h.row(i));
      std::copy(hi.begin(), hi.end(), next.row(i).begin());
    }
    t.messages.push_back(std::move(a));
    t.states.push_back(std::move(next));
  }
  return t;
}

Matrix apply_fc(const ParameterStore& store, const Linear& fc, const Matrix& states) {
  Matrix out(states.rows(), fc.out_dim);
  for (std::size_t i = 0; i < states.rows(); ++i) {
    const Vector y = linear_forward(store, fc, states.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

RelationalGraph effective_graph(const RelationalGraph& g, const RggnConfig& cfg) {
  return cfg.use_edge_labels ? g : g.with_uniform_relation(kSharedRelation);
}

void check_enhance_inputs(const DependencyGraphPair& pair, const RggnModel& model,
                          const Matrix& emb) {
  const RggnConfig& cfg = model.config();
  if (!cfg.use_fwd && !cfg.use_rev) throw ConfigError("both RGGN directions are disabled");
  if (pair.fwd.node_count() != pair.rev.node_count()) {
    throw DimensionError("forward and reverse graphs disagree on node count");
  }
  if (emb.rows() != pair.node_count()) {
    throw DimensionError("node embeddings have " + std::to_string(emb.rows()) + " rows for " +
                         std::to_string(pair.node_count()) + " nodes");
  }
  if (emb.cols() != model.dim()) {
    throw DimensionError("embedding dim " + std::to_string(emb.cols()) +
                         " does not match model dim " + std::to_string(model.dim()));
  }
}

}  // namespace

RggnModel::RggnModel(const RggnConfig& config, RelationVocab vocab, ParameterStore store)
    : config_(config), vocab_(std::move(vocab)), store_(std::move(store)) {}

void RggnModel::bind() {
  if (config_.dim == 0) throw ConfigError("model dim must be positive");
  if (!config_.use_fwd && !config_.use_rev) throw ConfigError("both RGGN directions are disabled");
  fwd_ = bind_direction(store_, "fwd", config_.dim, vocab_.size());
  rev_ = bind_direction(store_, "rev", config_.dim, vocab_.size());
  const std::size_t expected = 2 * (vocab_.size() + 9 + 2);
  if (store_.size() != expected) {
    throw ConfigError("model store holds " + std::to_string(store_.size()) +
                      " tensors, expected " + std::to_string(expected));
  }
}

RggnModel RggnModel::create(const RggnConfig& config, RelationVocab vocab, std::uint64_t seed,
                            Dtype dtype) {
  if (config.dim == 0) throw ConfigError("model dim must be positive");
  ParameterStore store(dtype);
  add_direction(store, "fwd", config.dim, vocab.size(), derive_seed(seed, 1));
  add_direction(store, "rev", config.dim, vocab.size(), derive_seed(seed, 2));
  RggnModel m(config, std::move(vocab), std::move(store));
  m.bind();
  return m;
}

RggnModel RggnModel::from_store(const RggnConfig& config, RelationVocab vocab,
                                ParameterStore store) {
  RggnModel m(config, std::move(vocab), std::move(store));
  m.bind();
  return m;
}

void RggnModel::set_flags(bool use_fwd, bool use_rev, bool use_edge_labels) {
  if (!use_fwd && !use_rev) throw ConfigError("ablation flags cannot disable both directions");
  config_.use_fwd = use_fwd;
  config_.use_rev = use_rev;
  config_.use_edge_labels = use_edge_labels;
}

void RggnModel::set_identity_fc() {
  for (const RggnDirectionParams* p : {&fwd_, &rev_}) {
    store_.value(p->fc.W) = Matrix::identity(config_.dim);
    store_.value(p->fc.b).fill(0.0);
  }
}

Matrix aggregate_messages(const RelationalGraph& graph, const ParameterStore& store,
                          const RggnDirectionParams& params, const Matrix& states) {
  check_states(graph, params, states);
  Matrix a(states.rows(), states.cols());
  for (const Edge& e : graph.edges()) {
    matvec_acc(store.value(params.edge_weights[e.rel]), states.row(e.src), a.row(e.dst));
  }
  return a;
}

Matrix propagate_once(const RelationalGraph& graph, const ParameterStore& store,
                      const RggnDirectionParams& params, const Matrix& states) {
  return trace_direction(graph, store, params, states, 1).states.back();
}

Matrix propagate(const RelationalGraph& graph, const ParameterStore& store,
                 const RggnDirectionParams& params, const Matrix& init, std::size_t iterations) {
  return trace_direction(graph, store, params, init, iterations).states.back();
}

Matrix run_direction(const RelationalGraph& graph, const ParameterStore& store,
                     const RggnDirectionParams& params, const Matrix& init,
                     std::size_t iterations) {
  return apply_fc(store, params.fc, propagate(graph, store, params, init, iterations));
}

EnhancedReps enhance(const DependencyGraphPair& pair, const RggnModel& model,
                     const Matrix& node_embeddings) {
  check_enhance_inputs(pair, model, node_embeddings);
  const RggnConfig& cfg = model.config();
  EnhancedReps out;
  out.word_reps = Matrix(node_embeddings.rows(), model.dim());
  if (cfg.use_fwd) {
    const Matrix r = run_direction(effective_graph(pair.fwd, cfg), model.store(), model.fwd(),
                                   node_embeddings, cfg.iterations);
    axpy(1.0, r.flat(), out.word_reps.flat());
  }
  if (cfg.use_rev) {
    const Matrix r = run_direction(effective_graph(pair.rev, cfg), model.store(), model.rev(),
                                   node_embeddings, cfg.iterations);
    axpy(1.0, r.flat(), out.word_reps.flat());
  }
  return out;
}

Matrix upsample_to_phonemes(const Matrix& word_reps, const std::vector<std::size_t>& counts) {
  if (counts.size() != word_reps.rows()) {
    throw DimensionError("phoneme counts have " + std::to_string(counts.size()) + " entries for " +
                         std::to_string(word_reps.rows()) + " words");
  }
  std::size_t total = 0;
  for (auto c : counts) total += c;
  Matrix out(total, word_reps.cols());
  std::size_t row = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k, ++row) {
      std::copy(word_reps.row(i).begin(), word_reps.row(i).end(), out.row(row).begin());
    }
  }
  return out;
}

void upsample_to_phonemes(EnhancedReps& reps, const std::vector<std::size_t>& counts) {
  reps.phoneme_reps = upsample_to_phonemes(reps.word_reps, counts);
}

Matrix run_direction_backward(const RelationalGraph& graph, ParameterStore& store,
                              const RggnDirectionParams& params, const Matrix& init,
                              std::size_t iterations, const Matrix& grad_out) {
  const DirectionTrace t = trace_direction(graph, store, params, init, iterations);
  const std::size_t n = init.rows();
  const std::size_t d = init.cols();
  if (grad_out.rows() != n || grad_out.cols() != params.fc.out_dim) {
    throw DimensionError("grad_out shape " + grad_out.shape_string() + " does not match output");
  }

  Matrix dh(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector g = linear_backward(store, params.fc, t.states.back().row(i), grad_out.row(i));
    std::copy(g.begin(), g.end(), dh.row(i).begin());
  }
  for (std::size_t k = iterations; k-- > 0;) {
    const Matrix& h = t.states[k];
    const Matrix& a = t.messages[k];
    Matrix dprev(n, d);
    Matrix da(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const GruInputGrads g = gru_backward(store, params.gru, a.row(i), h.row(i), dh.row(i));
      std::copy(g.grad_h.begin(), g.grad_h.end(), dprev.row(i).begin());
      std::copy(g.grad_a.begin(), g.grad_a.end(), da.row(i).begin());
    }
    for (const Edge& e : graph.edges()) {
      const ParamId W = params.edge_weights[e.rel];
      outer_acc(da.row(e.dst), h.row(e.src), store.grad(W));
      matvec_t_acc(store.value(W), da.row(e.dst), dprev.row(e.src));
    }
    dh = std::move(dprev);
  }
  return dh;
}

Matrix rggn_backward(const DependencyGraphPair& pair, RggnModel& model,
                     const Matrix& node_embeddings, const Matrix& grad_word_reps) {
  check_enhance_inputs(pair, model, node_embeddings);
  if (grad_word_reps.rows() != node_embeddings.rows() || grad_word_reps.cols() != model.dim()) {
    throw DimensionError("grad_word_reps shape " + grad_word_reps.shape_string() +
                         " does not match word_reps");
  }
  const RggnConfig& cfg = model.config();
  Matrix grad_emb(node_embeddings.rows(), node_embeddings.cols());
  if (cfg.use_fwd) {
    const Matrix g = run_direction_backward(effective_graph(pair.fwd, cfg), model.store(),
                                            model.fwd(), node_embeddings, cfg.iterations,
                                            grad_word_reps);
    axpy(1.0, g.flat(), grad_emb.flat());
  }
  if (cfg.use_rev) {
    const Matrix g = run_direction_backward(effective_graph(pair.rev, cfg), model.store(),
                                            model.rev(), node_embeddings, cfg.iterations,
                                            grad_word_reps);
    axpy(1.0, g.flat(), grad_emb.flat());
  }
  return grad_emb;
}

}  // namespace depsem
