#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "depsem/conllu.hpp"
#include "depsem/error.hpp"
#include "depsem/graph.hpp"
#include "depsem/random.hpp"
#include "depsem/training.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace depsem;

namespace {

using EdgeSet = std::set<std::tuple<std::size_t, std::size_t, RelationId>>;

EdgeSet as_set(const RelationalGraph& g) {
  EdgeSet s;
  for (const auto& e : g.edges()) s.insert({e.src, e.dst, e.rel});
  return s;
}

bool canonical(const RelationalGraph& g) {
  return std::is_sorted(g.edges().begin(), g.edges().end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.dst, a.src, a.rel) < std::tie(b.dst, b.src, b.rel);
  });
}

SentenceParse fig2() { return read_conllu(testutil::data_path("fig2.conllu")).at(0); }

}  // namespace

TEST_SUITE("graph construction") {
  TEST_CASE("figure sentence has the nsubj edge jumped -> fox") {
    const auto vocab = RelationVocab::universal_dependencies();
    const auto s = fig2();
    const auto g = build_forward(s, vocab);
    const Edge expected{7, 2, vocab.lookup("nsubj")};
    CHECK(std::find(g.edges().begin(), g.edges().end(), expected) != g.edges().end());
    CHECK(g.edge_count() == 13);
    CHECK(g.in_degrees()[7] == 0);
  }

  TEST_CASE("single word gives no edges") {
    const auto s = parse_conllu_string("1\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n").at(0);
    const auto pair = build_graph_pair(s, RelationVocab::universal_dependencies());
    CHECK(pair.node_count() == 1);
    CHECK(pair.fwd.edge_count() == 0);
    CHECK(pair.rev.edge_count() == 0);
  }

  TEST_CASE("unknown labels map to the unknown bucket") {
    const auto s = parse_conllu_string("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t1\tobl:agent\t_\t_\n").at(0);
    const auto vocab = RelationVocab::universal_dependencies();
    CHECK(build_forward(s, vocab).edges().at(0).rel == vocab.unk_id());
  }

  TEST_CASE("reverse of a single edge and of the empty graph") {
    const RelationalGraph g(2, {{0, 1, 3}}, 5);
    CHECK(build_reverse(g).edges() == std::vector<Edge>{{1, 0, 3}});
    CHECK(build_reverse(RelationalGraph(3, {}, 5)).edge_count() == 0);
    CHECK(build_reverse(RelationalGraph(3, {}, 5)).node_count() == 3);
  }

  TEST_CASE("invalid edges are rejected") {
    CHECK_THROWS_AS(RelationalGraph(2, {{0, 2, 0}}, 1), DimensionError);
    CHECK_THROWS_AS(RelationalGraph(2, {{1, 1, 0}}, 1), DimensionError);
    CHECK_THROWS_AS(RelationalGraph(2, {{0, 1, 1}}, 1), DimensionError);
  }

  TEST_CASE("edges are sorted by destination then source") {
    const RelationalGraph g(4, {{3, 0, 0}, {1, 2, 0}, {0, 2, 1}, {2, 1, 0}}, 2);
    CHECK(canonical(g));
    CHECK(g.edges().front() == Edge{3, 0, 0});
    CHECK(g.edges()[1] == Edge{2, 1, 0});
    CHECK(g.edges()[2] == Edge{0, 2, 1});
  }
}

TEST_SUITE("graph laws") {
  TEST_CASE("random trees: in-degree, edge counts, involution, determinism") {
    Rng rng(2024);
    const auto vocab = RelationVocab::universal_dependencies();
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.below(15);
      const auto s = random_tree(n, vocab, rng);
      const auto pair = build_graph_pair(s, vocab);
      CHECK(pair.fwd.edge_count() == n - 1);
      CHECK(pair.rev.edge_count() == n - 1);
      CHECK(pair.rev.node_count() == n);
      const auto in = pair.fwd.in_degrees();
      CHECK(std::count(in.begin(), in.end(), 0u) == 1);
      CHECK(*std::max_element(in.begin(), in.end()) <= 1);
      const auto out = pair.rev.out_degrees();
      CHECK(*std::max_element(out.begin(), out.end()) <= 1);
      CHECK(build_reverse(pair.rev) == pair.fwd);
      CHECK(canonical(pair.fwd));
      CHECK(canonical(pair.rev));
      EdgeSet flipped;
      for (const auto& [a, b, r] : as_set(pair.fwd)) flipped.insert({b, a, r});
      CHECK(flipped == as_set(pair.rev));
      CHECK(build_graph_pair(s, vocab).fwd == pair.fwd);
    }
  }

  TEST_CASE("uniform relation keeps structure") {
    Rng rng(5);
    const auto vocab = RelationVocab::universal_dependencies();
    const auto g = build_forward(random_tree(9, vocab, rng), vocab);
    const auto u = g.with_uniform_relation(0);
    REQUIRE(u.edge_count() == g.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
      CHECK(u.edges()[k].src == g.edges()[k].src);
      CHECK(u.edges()[k].dst == g.edges()[k].dst);
      CHECK(u.edges()[k].rel == 0);
    }
  }
}

TEST_SUITE("dot") {
  TEST_CASE("one node, zero edges") {
    const auto s = parse_conllu_string("1\tHi\t_\t_\t_\t_\t0\troot\t_\t_\n").at(0);
    const auto vocab = RelationVocab::universal_dependencies();
    oracle::DotChecker dot(to_dot(build_graph_pair(s, vocab), s.forms(), vocab));
    REQUIRE(dot.check());
    CHECK(dot.graphs() == 1);
    CHECK(dot.edges() == 0);
    CHECK(dot.node_stmts() == 1);
  }

  TEST_CASE("figure sentence contains the labeled solid nsubj edge") {
    const auto vocab = RelationVocab::universal_dependencies();
    const auto s = fig2();
    const std::string text = to_dot(build_graph_pair(s, vocab), s.forms(), vocab);
    CHECK(text.find("\"jumped\" -> \"fox\" [label=\"nsubj\", style=solid]") != std::string::npos);
    CHECK(text.find("\"fox\" -> \"jumped\" [label=\"nsubj\", style=dashed]") != std::string::npos);
    oracle::DotChecker dot(text);
    CHECK(dot.check());
    CHECK(dot.edges() == 26);
  }

  TEST_CASE("repeated and awkward forms stay distinct and well formed") {
    const auto vocab = RelationVocab::universal_dependencies();
    const std::string text = "1\tthe\t_\t_\t_\t_\t3\tdet\t_\t_\n2\t\"q\\\t_\t_\t_\t_\t3\tamod\t_\t_\n"
                             "3\tthe\t_\t_\t_\t_\t0\troot\t_\t_\n";
    const auto s = parse_conllu_string(text).at(0);
    const std::string out = to_dot(build_graph_pair(s, vocab), s.forms(), vocab, "g\"1");
    CHECK(out.find("\"the-1\"") != std::string::npos);
    CHECK(out.find("\"the-3\"") != std::string::npos);
    oracle::DotChecker dot(out);
    CHECK(dot.check());
    CHECK(dot.node_stmts() == 3);
    CHECK(dot.edges() == 4);
  }

  TEST_CASE("length mismatch") {
    const auto vocab = RelationVocab::universal_dependencies();
    const auto pair = build_graph_pair(fig2(), vocab);
    CHECK_THROWS_AS(to_dot(pair, {"a"}, vocab), DimensionError);
  }

  TEST_CASE("random sentences pass the grammar checker") {
    Rng rng(99);
    const auto vocab = RelationVocab::universal_dependencies();
    for (int trial = 0; trial < 20; ++trial) {
      auto s = random_tree(1 + rng.below(12), vocab, rng);
      for (auto& w : s.words) {
        if (rng.below(4) == 0) w.form = "it's \"x\"";
      }
      const auto pair = build_graph_pair(s, vocab);
      oracle::DotChecker dot(to_dot(pair, s.forms(), vocab));
      CHECK(dot.check());
      CHECK(dot.edges() == 2 * (s.size() - 1));
      CHECK(dot.node_stmts() == s.size());
    }
  }

  TEST_CASE("checker rejects malformed text") {
    CHECK_FALSE(oracle::DotChecker("digraph { a -> }").check());
    CHECK_FALSE(oracle::DotChecker("digraph { \"a }").check());
    CHECK_FALSE(oracle::DotChecker("graph { a -> b }").check());
    CHECK(oracle::DotChecker("digraph x { a -> b [label=\"y\"]; }").check());
  }
}
