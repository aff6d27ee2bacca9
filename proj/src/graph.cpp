#include "depsem/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "depsem/error.hpp"

namespace depsem {

namespace {

bool canonical_less(const Edge& a, const Edge& b) {
  return std::tie(a.dst, a.src, a.rel) < std::tie(b.dst, b.src, b.rel);
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> node_names(const std::vector<std::string>& forms) {
  std::map<std::string, std::size_t> counts;
  for (const auto& f : forms) ++counts[f];
  std::set<std::string> taken;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    std::string name = forms[i];
    if (counts[name] > 1 || taken.count(name)) name = forms[i] + "-" + std::to_string(i + 1);
    while (taken.count(name)) name += "'";
    taken.insert(name);
    names.push_back(std::move(name));
  }
  return names;
}

}  // namespace

RelationalGraph::RelationalGraph(std::size_t node_count, std::vector<Edge> edges,
                                 std::size_t relation_count)
    : node_count_(node_count), relation_count_(relation_count), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.src >= node_count_ || e.dst >= node_count_) {
      throw DimensionError("edge (" + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                           ") outside node range " + std::to_string(node_count_));
    }
    if (e.src == e.dst) throw DimensionError("self-loop on node " + std::to_string(e.src));
    if (e.rel >= relation_count_) {
      throw DimensionError("relation id " + std::to_string(e.rel) + " >= vocabulary size " +
                           std::to_string(relation_count_));
    }
  }
  std::sort(edges_.begin(), edges_.end(), canonical_less);
}

std::vector<std::size_t> RelationalGraph::in_degrees() const {
  std::vector<std::size_t> d(node_count_, 0);
  for (const auto& e : edges_) ++d[e.dst];
  return d;
}

std::vector<std::size_t> RelationalGraph::out_degrees() const {
  std::vector<std::size_t> d(node_count_, 0);
  for (const auto& e : edges_) ++d[e.src];
  return d;
}

RelationalGraph RelationalGraph::with_uniform_relation(RelationId rel) const {
  std::vector<Edge> edges = edges_;
  for (auto& e : edges) e.rel = rel;
  return RelationalGraph(node_count_, std::move(edges), relation_count_);
}

RelationalGraph build_forward(const SentenceParse& parse, const RelationVocab& vocab) {
  std::vector<Edge> edges;
  edges.reserve(parse.words.size());
  for (const auto& w : parse.words) {
    if (w.head == 0) continue;
    edges.push_back(Edge{w.head - 1, w.index - 1, vocab.lookup(w.deprel)});
  }
  return RelationalGraph(parse.words.size(), std::move(edges), vocab.size());
}

RelationalGraph build_reverse(const RelationalGraph& fwd) {
  std::vector<Edge> edges;
  edges.reserve(fwd.edge_count());
  for (const auto& e : fwd.edges()) edges.push_back(Edge{e.dst, e.src, e.rel});
  return RelationalGraph(fwd.node_count(), std::move(edges), fwd.relation_count());
}

DependencyGraphPair build_graph_pair(const SentenceParse& parse, const RelationVocab& vocab) {
  DependencyGraphPair pair;
  pair.fwd = build_forward(parse, vocab);
  pair.rev = build_reverse(pair.fwd);
  return pair;
}

std::string to_dot(const DependencyGraphPair& pair, const std::vector<std::string>& forms,
                   const RelationVocab& vocab, const std::string& graph_name) {
  if (forms.size() != pair.node_count()) {
    throw DimensionError("to_dot: " + std::to_string(forms.size()) + " forms for " +
                         std::to_string(pair.node_count()) + " nodes");
  }
  const auto names = node_names(forms);
  std::ostringstream out;
  out << "digraph " << dot_quote(graph_name) << " {\n";
  out << "  node [shape=box];\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << "  " << dot_quote(names[i]) << " [label=" << dot_quote(forms[i]) << "];\n";
  }
  for (const auto& e : pair.fwd.edges()) {
    out << "  " << dot_quote(names[e.src]) << " -> " << dot_quote(names[e.dst])
        << " [label=" << dot_quote(vocab.label(e.rel)) << ", style=solid];\n";
  }
  for (const auto& e : pair.rev.edges()) {
    out << "  " << dot_quote(names[e.src]) << " -> " << dot_quote(names[e.dst])
        << " [label=" << dot_quote(vocab.label(e.rel)) << ", style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace depsem
