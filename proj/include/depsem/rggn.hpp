#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "depsem/cells.hpp"
#include "depsem/graph.hpp"
#include "depsem/parameters.hpp"
#include "depsem/vocab.hpp"

namespace depsem {

struct RggnConfig {
  std::size_t dim = 768;
  std::size_t iterations = 5;
  bool use_fwd = true;
  bool use_rev = true;
  bool use_edge_labels = true;
};

// Relation used for every edge when edge labels are ablated.
inline constexpr RelationId kSharedRelation = 0;

// Parameters of one relational gated graph network: a d x d message matrix
// per relation (including the unknown bucket), the GRU aggregator and the
// output affine layer.
struct RggnDirectionParams {
  std::vector<ParamId> edge_weights;
  GruCell gru;
  Linear fc;

  std::size_t dim() const noexcept { return gru.dim; }
};

// Forward and reverse networks with disjoint parameters, all held in one
// ParameterStore (forward tensors first).
class RggnModel {
 public:
  static RggnModel create(const RggnConfig& config, RelationVocab vocab, std::uint64_t seed,
                          Dtype dtype = Dtype::F32);
  // Binds to a store laid out by `create` (e.g. one read from a model file).
  static RggnModel from_store(const RggnConfig& config, RelationVocab vocab, ParameterStore store);

  const RggnConfig& config() const noexcept { return config_; }
  void set_flags(bool use_fwd, bool use_rev, bool use_edge_labels);
  void set_iterations(std::size_t k) noexcept { config_.iterations = k; }

  std::size_t dim() const noexcept { return config_.dim; }
  std::size_t iterations() const noexcept { return config_.iterations; }
  const RelationVocab& vocab() const noexcept { return vocab_; }

  ParameterStore& store() noexcept { return store_; }
  const ParameterStore& store() const noexcept { return store_; }
  const RggnDirectionParams& fwd() const noexcept { return fwd_; }
  const RggnDirectionParams& rev() const noexcept { return rev_; }

  // Both output layers become identity with zero bias.
  void set_identity_fc();

 private:
  RggnModel(const RggnConfig& config, RelationVocab vocab, ParameterStore store);
  void bind();

  RggnConfig config_;
  RelationVocab vocab_;
  ParameterStore store_;
  RggnDirectionParams fwd_;
  RggnDirectionParams rev_;
};

struct EnhancedReps {
  Matrix word_reps;                    // n x d, word order
  std::optional<Matrix> phoneme_reps;  // sum(phoneme_counts) x d
};

// Messages a_i = sum over in-edges (j -> i, r) of W_r h_j, in canonical edge
// order. Nodes without in-edges get a zero vector.
Matrix aggregate_messages(const RelationalGraph& graph, const ParameterStore& store,
                          const RggnDirectionParams& params, const Matrix& states);

// One synchronous step: h_i' = GRU(a_i, h_i) with every a_i computed from the
// old states.
Matrix propagate_once(const RelationalGraph& graph, const ParameterStore& store,
                      const RggnDirectionParams& params, const Matrix& states);

// K propagation steps from `init`, without the output layer.
Matrix propagate(const RelationalGraph& graph, const ParameterStore& store,
                 const RggnDirectionParams& params, const Matrix& init, std::size_t iterations);

// K propagation steps followed by the per-node affine output layer.
Matrix run_direction(const RelationalGraph& graph, const ParameterStore& store,
                     const RggnDirectionParams& params, const Matrix& init,
                     std::size_t iterations);

// r_bi = r_fwd + r_rev per word, honoring the model's ablation flags.
EnhancedReps enhance(const DependencyGraphPair& pair, const RggnModel& model,
                     const Matrix& node_embeddings);

// Repeats word row i counts[i] times, in word order.
Matrix upsample_to_phonemes(const Matrix& word_reps, const std::vector<std::size_t>& counts);
void upsample_to_phonemes(EnhancedReps& reps, const std::vector<std::size_t>& counts);

// Reverse-mode pass through `run_direction`. Accumulates parameter gradients
// into `store` and returns the gradient with respect to `init`.
Matrix run_direction_backward(const RelationalGraph& graph, ParameterStore& store,
                              const RggnDirectionParams& params, const Matrix& init,
                              std::size_t iterations, const Matrix& grad_out);

// Reverse-mode pass through `enhance` for a cotangent on word_reps.
// Accumulates into model.store() gradients; returns d loss / d embeddings.
Matrix rggn_backward(const DependencyGraphPair& pair, RggnModel& model,
                     const Matrix& node_embeddings, const Matrix& grad_word_reps);

}  // namespace depsem
