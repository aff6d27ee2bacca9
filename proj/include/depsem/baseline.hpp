#pragma once

#include <cstdint>
#include <optional>

#include "depsem/cells.hpp"
#include "depsem/conllu.hpp"
#include "depsem/parameters.hpp"
#include "depsem/vocab.hpp"

namespace depsem {

// Comparison enhancer: each word embedding is concatenated with a learned
// vector for its own deprel and a sinusoidal encoding of its head position,
// run through a BLSTM in surface order and projected back to out_dim.
struct BaselineConfig {
  std::size_t word_dim = 768;
  std::size_t label_dim = 16;
  std::size_t pos_enc_dim = 16;
  std::size_t hidden_dim = 0;  // 0 means word_dim
  std::size_t out_dim = 0;     // 0 means word_dim

  std::size_t feature_dim() const { return word_dim + label_dim + pos_enc_dim; }
  std::size_t resolved_hidden() const { return hidden_dim ? hidden_dim : word_dim; }
  std::size_t resolved_out() const { return out_dim ? out_dim : word_dim; }
};

class BaselineModel {
 public:
  static BaselineModel create(const BaselineConfig& config, RelationVocab vocab,
                              std::uint64_t seed);

  const BaselineConfig& config() const noexcept { return config_; }
  const RelationVocab& vocab() const noexcept { return vocab_; }
  ParameterStore& store() noexcept { return store_; }
  const ParameterStore& store() const noexcept { return store_; }

  // vocab.size() x label_dim lookup table; absent when label_dim == 0.
  const std::optional<ParamId>& label_table() const noexcept { return label_table_; }
  const Blstm& blstm() const noexcept { return blstm_; }
  const Linear& projection() const noexcept { return proj_; }

 private:
  BaselineModel(const BaselineConfig& config, RelationVocab vocab)
      : config_(config), vocab_(std::move(vocab)) {}

  BaselineConfig config_;
  RelationVocab vocab_;
  ParameterStore store_;
  std::optional<ParamId> label_table_;
  Blstm blstm_;
  Linear proj_;
};

// Channel 2k is sin(p / 10000^(2k/D)), channel 2k+1 the matching cos.
Vector position_encoding(std::size_t position, std::size_t channels);

Matrix encode_features(const SentenceParse& parse, const Matrix& word_embs,
                       const BaselineModel& model);
// BLSTM outputs before the projection (n x 2*hidden).
Matrix blstm_states(const SentenceParse& parse, const Matrix& word_embs,
                    const BaselineModel& model);
Matrix blstm_enhance(const SentenceParse& parse, const Matrix& word_embs,
                     const BaselineModel& model);
// Accumulates parameter gradients into model.store(); returns d/d word_embs.
Matrix blstm_enhance_backward(const SentenceParse& parse, const Matrix& word_embs,
                              BaselineModel& model, const Matrix& grad_out);

}  // namespace depsem
