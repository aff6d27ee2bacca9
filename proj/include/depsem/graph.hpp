#pragma once

#include <string>
#include <vector>

#include "depsem/conllu.hpp"
#include "depsem/vocab.hpp"

namespace depsem {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  RelationId rel = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Typed directed graph over word nodes 0..n-1. Edges are kept sorted by
// (dst, src, rel), which fixes the message accumulation order.
class RelationalGraph {
 public:
  RelationalGraph() = default;
  RelationalGraph(std::size_t node_count, std::vector<Edge> edges, std::size_t relation_count);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t relation_count() const noexcept { return relation_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::vector<std::size_t> in_degrees() const;
  std::vector<std::size_t> out_degrees() const;

  // Same structure with every label replaced by `rel`.
  RelationalGraph with_uniform_relation(RelationId rel) const;

  friend bool operator==(const RelationalGraph&, const RelationalGraph&) = default;

 private:
  std::size_t node_count_ = 0;
  std::size_t relation_count_ = 0;
  std::vector<Edge> edges_;
};

struct DependencyGraphPair {
  RelationalGraph fwd;
  RelationalGraph rev;

  std::size_t node_count() const noexcept { return fwd.node_count(); }
};

// Head -> dependent edges labeled by deprel. The root's attachment to the
// virtual root produces no edge.
RelationalGraph build_forward(const SentenceParse& parse, const RelationVocab& vocab);
// Every edge flipped, labels kept.
RelationalGraph build_reverse(const RelationalGraph& fwd);
DependencyGraphPair build_graph_pair(const SentenceParse& parse, const RelationVocab& vocab);

// Graphviz digraph: forward edges solid, reverse edges dashed, each labeled
// with its relation. Nodes are named by word form, disambiguated with the
// 1-based word index when a form repeats.
std::string to_dot(const DependencyGraphPair& pair, const std::vector<std::string>& forms,
                   const RelationVocab& vocab, const std::string& graph_name = "dependencies");

}  // namespace depsem
