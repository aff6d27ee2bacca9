#include "depsem/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depsem/error.hpp"
#include "depsem/optim.hpp"

namespace depsem {

std::string to_string(ToyKind k) { return k == ToyKind::NodeDepth ? "node-depth" : "subtree-size"; }

ToyKind toy_kind_from_string(const std::string& s) {
  if (s == "node-depth" || s == "depth") return ToyKind::NodeDepth;
  if (s == "subtree-size" || s == "subtree") return ToyKind::SubtreeSize;
  throw ConfigError("unknown toy task '" + s + "' (expected node-depth or subtree-size)");
}

std::size_t ToyTask::node_count() const {
  std::size_t n = 0;
  for (const auto& inst : instances) n += inst.parse.size();
  return n;
}

SentenceParse random_tree(std::size_t n, const RelationVocab& vocab, Rng& rng) {
  if (n == 0) throw ConfigError("random_tree needs at least one word");
  if (vocab.labels().empty()) throw ConfigError("random_tree needs a vocabulary with labels");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  SentenceParse s;
  s.words.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    WordToken& w = s.words[order[k]];
    w.index = order[k] + 1;
    w.form = "w" + std::to_string(w.index);
    if (k == 0) {
      w.head = 0;
      w.deprel = "root";
    } else {
      w.head = order[rng.below(k)] + 1;
      w.deprel = vocab.labels()[rng.below(vocab.labels().size())];
    }
  }
  validate_tree(s);
  return s;
}

std::vector<std::size_t> tree_depths(const SentenceParse& parse) {
  const std::size_t n = parse.size();
  std::vector<std::size_t> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = 0;
    for (std::size_t cur = parse.words[i].head; cur != 0; cur = parse.words[cur - 1].head) {
      if (++d > n) throw ConfigError("cycle while computing depths");
    }
    depth[i] = d;
  }
  return depth;
}

std::vector<std::size_t> subtree_sizes(const SentenceParse& parse) {
  const std::size_t n = parse.size();
  std::vector<std::size_t> size(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t steps = 0;
    for (std::size_t cur = parse.words[i].head; cur != 0; cur = parse.words[cur - 1].head) {
      ++size[cur - 1];
      if (++steps > n) throw ConfigError("cycle while computing subtree sizes");
    }
  }
  return size;
}

ToyTask make_toy_dataset(ToyKind kind, std::size_t n_sentences, std::size_t max_words,
                         std::size_t dim, std::uint64_t seed, const RelationVocab& vocab) {
  if (max_words < 2) throw ConfigError("max_words must be at least 2");
  if (dim < 2) throw ConfigError("dim must be at least 2");
  ToyTask task;
  task.kind = kind;
  task.dim = dim;
  Rng rng(seed);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    ToyInstance inst;
    const std::size_t n = 2 + rng.below(max_words - 1);
    inst.parse = random_tree(n, vocab, rng);
    inst.graphs = build_graph_pair(inst.parse, vocab);
    inst.embeddings = glorot_init(n, dim, derive_seed(seed, 1000 + s));
    const auto t = kind == ToyKind::NodeDepth ? tree_depths(inst.parse) : subtree_sizes(inst.parse);
    inst.targets.assign(t.begin(), t.end());
    task.instances.push_back(std::move(inst));
  }
  return task;
}

ScalarHead ScalarHead::create(std::size_t dim, std::uint64_t seed) {
  ScalarHead h;
  h.lin = Linear::create(h.store, "head", dim, 1, seed);
  return h;
}

ScalarHead ScalarHead::zeros(std::size_t dim) {
  ScalarHead h = create(dim, 0);
  h.store.value(h.lin.W).fill(0.0);
  return h;
}

namespace {

void check_task(const RggnModel& model, const ScalarHead& head, const ToyTask& task) {
  if (task.dim != model.dim()) {
    throw DimensionError("toy task dim " + std::to_string(task.dim) + " does not match model dim " +
                         std::to_string(model.dim()));
  }
  if (head.lin.in_dim != model.dim() || head.lin.out_dim != 1) {
    throw DimensionError("scalar head must map model dim to 1");
  }
  if (task.node_count() == 0) throw ConfigError("toy task has no nodes");
}

}  // namespace

Vector predict(const RggnModel& model, const ScalarHead& head, const ToyInstance& inst) {
  const EnhancedReps reps = enhance(inst.graphs, model, inst.embeddings);
  Vector out(reps.word_reps.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = linear_forward(head.store, head.lin, reps.word_reps.row(i))[0];
  }
  return out;
}

double toy_loss(const RggnModel& model, const ScalarHead& head, const ToyTask& task) {
  check_task(model, head, task);
  double sum = 0.0;
  for (const auto& inst : task.instances) {
    const Vector pred = predict(model, head, inst);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double e = pred[i] - inst.targets[i];
      sum += e * e;
    }
  }
  return sum / static_cast<double>(task.node_count());
}

double toy_loss_and_grad(RggnModel& model, ScalarHead& head, const ToyTask& task) {
  check_task(model, head, task);
  const double scale = 1.0 / static_cast<double>(task.node_count());
  double sum = 0.0;
  for (const auto& inst : task.instances) {
    const EnhancedReps reps = enhance(inst.graphs, model, inst.embeddings);
    Matrix grad_reps(reps.word_reps.rows(), reps.word_reps.cols());
    for (std::size_t i = 0; i < reps.word_reps.rows(); ++i) {
      const double pred = linear_forward(head.store, head.lin, reps.word_reps.row(i))[0];
      const double e = pred - inst.targets[i];
      sum += e * e;
      const Real g = 2.0 * e * scale;
      const Vector gx = linear_backward(head.store, head.lin, reps.word_reps.row(i), {&g, 1});
      std::copy(gx.begin(), gx.end(), grad_reps.row(i).begin());
    }
    rggn_backward(inst.graphs, model, inst.embeddings, grad_reps);
  }
  return sum * scale;
}

std::vector<double> train_toy(RggnModel& model, ScalarHead& head, const ToyTask& task,
                              std::size_t steps, double lr) {
  AdamConfig cfg;
  cfg.lr = lr;
  Adam model_opt(cfg), head_opt(cfg);
  std::vector<double> history;
  history.reserve(steps + 1);
  model.store().zero_grad();
  head.store.zero_grad();
  for (std::size_t s = 0; s < steps; ++s) {
    const double loss = toy_loss_and_grad(model, head, task);
    if (!std::isfinite(loss)) throw NumericalError("toy loss diverged at step " + std::to_string(s));
    history.push_back(loss);
    model_opt.step(model.store());
    head_opt.step(head.store);
  }
  const double final_loss = toy_loss(model, head, task);
  if (!std::isfinite(final_loss)) throw NumericalError("toy loss diverged after training");
  history.push_back(final_loss);
  return history;
}

double diversity_metric(const Matrix& reps) {
  if (reps.rows() < 2) throw ConfigError("diversity metric needs at least 2 rows");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < reps.rows(); ++i) {
    for (std::size_t j = i + 1; j < reps.rows(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < reps.cols(); ++k) {
        const double diff = reps(i, k) - reps(j, k);
        d2 += diff * diff;
      }
      sum += std::sqrt(d2);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("spearman needs two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

GradcheckReport gradcheck_enhance(RggnModel& model, const DependencyGraphPair& pair,
                                  const Matrix& embeddings, const Matrix& target,
                                  const GradcheckOptions& options) {
  ParameterStore inputs(Dtype::F64);
  const ParamId emb = inputs.add_matrix("input.embeddings", embeddings);
  // The loss is reported as its increment over the base point,
  // 0.5 (r - r0)(r + r0 - 2t) per entry, so the central difference is not
  // swamped by rounding the full loss value.
  const Matrix r0 = enhance(pair, model, embeddings).word_reps;
  Objective f;
  f.value = [&]() {
    const Matrix r = enhance(pair, model, inputs.value(emb)).word_reps;
    double delta = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double a = r.flat()[i], b = r0.flat()[i];
      delta += 0.5 * (a - b) * (a + b - 2.0 * target.flat()[i]);
    }
    return delta;
  };
  f.gradient = [&]() {
    const Matrix r = enhance(pair, model, inputs.value(emb)).word_reps;
    Matrix g(r.rows(), r.cols());
    for (std::size_t i = 0; i < r.size(); ++i) g.flat()[i] = r.flat()[i] - target.flat()[i];
    const Matrix ge = rggn_backward(pair, model, inputs.value(emb), g);
    axpy(1.0, ge.flat(), inputs.grad(emb).flat());
  };
  return fd_gradcheck({&model.store(), &inputs}, f, options);
}

GradcheckReport run_seeded_gradcheck(const GradcheckSetup& setup, const GradcheckOptions& options) {
  if (setup.nodes == 0 || setup.dim == 0 || setup.labels == 0) {
    throw ConfigError("gradcheck needs positive dim, nodes and labels");
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < setup.labels; ++i) labels.push_back("rel" + std::to_string(i));
  RelationVocab vocab(labels);
  Rng rng(setup.seed);
  const SentenceParse parse = random_tree(setup.nodes, vocab, rng);
  const DependencyGraphPair pair = build_graph_pair(parse, vocab);

  RggnConfig cfg;
  cfg.dim = setup.dim;
  cfg.iterations = setup.iterations;
  RggnModel model = RggnModel::create(cfg, vocab, derive_seed(setup.seed, 7), Dtype::F64);
  // Nonzero biases so every bias gradient is exercised away from zero.
  for (auto& p : model.store()) {
    if (p.rank == 1) {
      for (auto& v : p.value.flat()) v = rng.uniform(-0.5, 0.5);
    }
  }
  const Matrix emb = random_matrix(setup.nodes, setup.dim, -1.0, 1.0, rng);
  const Matrix target = random_matrix(setup.nodes, setup.dim, -1.0, 1.0, rng);
  return gradcheck_enhance(model, pair, emb, target, options);
}

}  // namespace depsem
