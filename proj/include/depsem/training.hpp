#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depsem/cells.hpp"
#include "depsem/conllu.hpp"
#include "depsem/gradcheck.hpp"
#include "depsem/graph.hpp"
#include "depsem/random.hpp"
#include "depsem/rggn.hpp"

namespace depsem {

enum class ToyKind { NodeDepth, SubtreeSize };

std::string to_string(ToyKind k);
ToyKind toy_kind_from_string(const std::string& s);

struct ToyInstance {
  SentenceParse parse;
  DependencyGraphPair graphs;
  Matrix embeddings;  // n x dim
  Vector targets;     // one per word
};

struct ToyTask {
  ToyKind kind = ToyKind::NodeDepth;
  std::size_t dim = 0;
  std::vector<ToyInstance> instances;

  std::size_t node_count() const;
};

// Random tree over n words: words are visited in a random order, the first
// becomes the root and each later word attaches to a uniformly chosen
// earlier one. Labels are drawn uniformly from the vocab's named labels.
SentenceParse random_tree(std::size_t n, const RelationVocab& vocab, Rng& rng);

std::vector<std::size_t> tree_depths(const SentenceParse& parse);
std::vector<std::size_t> subtree_sizes(const SentenceParse& parse);

// Sentences have 2..max_words words; embeddings are Glorot-uniform.
ToyTask make_toy_dataset(ToyKind kind, std::size_t n_sentences, std::size_t max_words,
                         std::size_t dim, std::uint64_t seed, const RelationVocab& vocab);

// Affine d -> 1 scalar head on top of r_bi, kept outside the model's store.
struct ScalarHead {
  ParameterStore store;
  Linear lin;

  static ScalarHead create(std::size_t dim, std::uint64_t seed);
  static ScalarHead zeros(std::size_t dim);
};

Vector predict(const RggnModel& model, const ScalarHead& head, const ToyInstance& inst);

// Mean squared error over every node of every instance.
double toy_loss(const RggnModel& model, const ScalarHead& head, const ToyTask& task);
// Same loss; accumulates gradients into both stores.
double toy_loss_and_grad(RggnModel& model, ScalarHead& head, const ToyTask& task);

// Full-batch Adam. Entry 0 is the initial loss, entry s the loss after s steps.
std::vector<double> train_toy(RggnModel& model, ScalarHead& head, const ToyTask& task,
                              std::size_t steps, double lr);

// Mean pairwise Euclidean distance over unordered row pairs.
double diversity_metric(const Matrix& reps);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Central-difference check of 0.5 * ||enhance(emb) - target||^2 with respect
// to every model tensor and the input embeddings.
GradcheckReport gradcheck_enhance(RggnModel& model, const DependencyGraphPair& pair,
                                  const Matrix& embeddings, const Matrix& target,
                                  const GradcheckOptions& options = {});

struct GradcheckSetup {
  std::size_t dim = 8;
  std::size_t nodes = 6;
  std::size_t iterations = 2;
  std::size_t labels = 5;
  std::uint64_t seed = 1;
};

// Random tree, labels, model and embeddings for a seeded gradient check.
GradcheckReport run_seeded_gradcheck(const GradcheckSetup& setup,
                                     const GradcheckOptions& options = {});

}  // namespace depsem
