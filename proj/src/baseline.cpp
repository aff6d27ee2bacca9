#include "depsem/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "depsem/error.hpp"
#include "depsem/random.hpp"

namespace depsem {

BaselineModel BaselineModel::create(const BaselineConfig& config, RelationVocab vocab,
                                    std::uint64_t seed) {
  if (config.word_dim == 0) throw ConfigError("baseline word_dim must be positive");
  BaselineModel m(config, std::move(vocab));
  if (config.label_dim > 0) {
    m.label_table_ = m.store_.add_matrix(
        "baseline.labels", glorot_init(m.vocab_.size(), config.label_dim, derive_seed(seed, 1)));
  }
  m.blstm_ = Blstm::create(m.store_, "baseline.blstm", config.feature_dim(),
                           config.resolved_hidden(), derive_seed(seed, 2));
  m.proj_ = Linear::create(m.store_, "baseline.proj", 2 * config.resolved_hidden(),
                           config.resolved_out(), derive_seed(seed, 3));
  return m;
}

Vector position_encoding(std::size_t position, std::size_t channels) {
  Vector out(channels);
  const double p = static_cast<double>(position);
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t pair = c / 2;
    const double freq =
        std::pow(10000.0, -2.0 * static_cast<double>(pair) / static_cast<double>(channels));
    out[c] = (c % 2 == 0) ? std::sin(p * freq) : std::cos(p * freq);
  }
  return out;
}

Matrix encode_features(const SentenceParse& parse, const Matrix& word_embs,
                       const BaselineModel& model) {
  const BaselineConfig& cfg = model.config();
  if (word_embs.rows() != parse.size()) {
    throw DimensionError("baseline: " + std::to_string(word_embs.rows()) + " embedding rows for " +
                         std::to_string(parse.size()) + " words");
  }
  if (word_embs.cols() != cfg.word_dim) {
    throw DimensionError("baseline: embedding dim " + std::to_string(word_embs.cols()) +
                         " does not match word_dim " + std::to_string(cfg.word_dim));
  }
  Matrix feats(parse.size(), cfg.feature_dim());
  for (std::size_t i = 0; i < parse.size(); ++i) {
    auto row = feats.row(i);
    auto it = std::copy(word_embs.row(i).begin(), word_embs.row(i).end(), row.begin());
    if (model.label_table()) {
      const RelationId rel = model.vocab().lookup(parse.words[i].deprel);
      const auto lab = model.store().value(*model.label_table()).row(rel);
      it = std::copy(lab.begin(), lab.end(), it);
    }
    const Vector pe = position_encoding(parse.words[i].head, cfg.pos_enc_dim);
    std::copy(pe.begin(), pe.end(), it);
  }
  return feats;
}

Matrix blstm_states(const SentenceParse& parse, const Matrix& word_embs,
                    const BaselineModel& model) {
  return blstm_forward(model.store(), model.blstm(), encode_features(parse, word_embs, model));
}

Matrix blstm_enhance(const SentenceParse& parse, const Matrix& word_embs,
                     const BaselineModel& model) {
  const Matrix states = blstm_states(parse, word_embs, model);
  Matrix out(states.rows(), model.config().resolved_out());
  for (std::size_t i = 0; i < states.rows(); ++i) {
    const Vector y = linear_forward(model.store(), model.projection(), states.row(i));
    std::copy(y.begin(), y.end(), out.row(i).begin());
  }
  return out;
}

Matrix blstm_enhance_backward(const SentenceParse& parse, const Matrix& word_embs,
                              BaselineModel& model, const Matrix& grad_out) {
  const BaselineConfig& cfg = model.config();
  const Matrix feats = encode_features(parse, word_embs, model);
  const Matrix states = blstm_forward(model.store(), model.blstm(), feats);
  if (grad_out.rows() != states.rows() || grad_out.cols() != cfg.resolved_out()) {
    throw DimensionError("baseline grad_out shape " + grad_out.shape_string() +
                         " does not match output");
  }
  ParameterStore& store = model.store();
  Matrix grad_states(states.rows(), states.cols());
  for (std::size_t i = 0; i < states.rows(); ++i) {
    const Vector g = linear_backward(store, model.projection(), states.row(i), grad_out.row(i));
    std::copy(g.begin(), g.end(), grad_states.row(i).begin());
  }
  const Matrix grad_feats = blstm_backward(store, model.blstm(), feats, grad_states);

  Matrix grad_embs(word_embs.rows(), cfg.word_dim);
  for (std::size_t i = 0; i < parse.size(); ++i) {
    const auto g = grad_feats.row(i);
    std::copy(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(cfg.word_dim),
              grad_embs.row(i).begin());
    if (model.label_table()) {
      const RelationId rel = model.vocab().lookup(parse.words[i].deprel);
      auto dst = store.grad(*model.label_table()).row(rel);
      for (std::size_t k = 0; k < cfg.label_dim; ++k) dst[k] += g[cfg.word_dim + k];
    }
  }
  return grad_embs;
}

}  // namespace depsem
