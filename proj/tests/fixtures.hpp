#pragma once

#include <string>
#include <vector>

#include "depsem/graph.hpp"
#include "depsem/random.hpp"
#include "depsem/rggn.hpp"
#include "depsem/training.hpp"

namespace fixture {

using namespace depsem;

inline RelationVocab small_vocab(std::size_t labels) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < labels; ++i) names.push_back("rel" + std::to_string(i));
  return RelationVocab(names);
}

// 64-bit model with Glorot weights and biases drawn from (-0.5, 0.5) so that
// bias paths are exercised too.
inline RggnModel random_model(std::size_t dim, std::size_t iterations, std::size_t labels,
                              std::uint64_t seed) {
  RggnConfig cfg;
  cfg.dim = dim;
  cfg.iterations = iterations;
  RggnModel m = RggnModel::create(cfg, small_vocab(labels), seed, Dtype::F64);
  Rng rng(derive_seed(seed, 99));
  for (auto& p : m.store()) {
    if (p.rank == 1) {
      for (auto& v : p.value.flat()) v = rng.uniform(-0.5, 0.5);
    }
  }
  return m;
}

struct Instance {
  SentenceParse parse;
  DependencyGraphPair pair;
  Matrix emb;
};

inline Instance random_instance(std::size_t n, std::size_t dim, const RelationVocab& vocab, Rng& rng) {
  Instance inst;
  inst.parse = random_tree(n, vocab, rng);
  inst.pair = build_graph_pair(inst.parse, vocab);
  inst.emb = random_matrix(n, dim, -1, 1, rng);
  return inst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat()[i] - b.flat()[i]));
  return m;
}

}  // namespace fixture

#include "depsem/baseline.hpp"
#include "depsem/gradcheck.hpp"

namespace fixture {

// Central-difference check of the linear probe sum(c * blstm_enhance(emb)),
// reported as its increment over the base point.
inline GradcheckReport baseline_gradcheck(BaselineModel& model, const SentenceParse& parse,
                                          const Matrix& emb, const Matrix& probe,
                                          const GradcheckOptions& options = {}) {
  ParameterStore inputs(Dtype::F64);
  const ParamId x = inputs.add_matrix("input.embeddings", emb);
  const Matrix y0 = blstm_enhance(parse, emb, model);
  Objective f;
  f.value = [&]() {
    const Matrix y = blstm_enhance(parse, inputs.value(x), model);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += probe.flat()[i] * (y.flat()[i] - y0.flat()[i]);
    return s;
  };
  f.gradient = [&]() {
    const Matrix g = blstm_enhance_backward(parse, inputs.value(x), model, probe);
    axpy(1.0, g.flat(), inputs.grad(x).flat());
  };
  return fd_gradcheck({&model.store(), &inputs}, f, options);
}

}  // namespace fixture
