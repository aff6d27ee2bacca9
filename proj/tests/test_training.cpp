#include <doctest.h>

#include <cmath>

#include "depsem/error.hpp"
#include "depsem/gradcheck.hpp"
#include "depsem/training.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace depsem;

namespace {

const RelationVocab& ud() {
  static const RelationVocab v = RelationVocab::universal_dependencies();
  return v;
}

}  // namespace

TEST_SUITE("toy dataset") {
  TEST_CASE("two-word tree depths") {
    Rng rng(1);
    const auto s = random_tree(2, ud(), rng);
    auto d = tree_depths(s);
    std::sort(d.begin(), d.end());
    CHECK(d == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("depth and subtree-size invariants on random trees") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.below(12);
      const auto s = random_tree(n, ud(), rng);
      const auto depth = tree_depths(s);
      const auto size = subtree_sizes(s);
      CHECK(depth[s.root()] == 0);
      CHECK(size[s.root()] == n);
      std::vector<bool> has_child(n, false);
      for (const auto& w : s.words) {
        if (w.head == 0) continue;
        has_child[w.head - 1] = true;
        CHECK(depth[w.index - 1] == depth[w.head - 1] + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!has_child[i]) CHECK(size[i] == 1);
      }
      std::size_t child_sum = 0;
      for (const auto& w : s.words) {
        if (w.head == s.root() + 1) child_sum += size[w.index - 1];
      }
      CHECK(child_sum == n - 1);
    }
  }

  TEST_CASE("dataset shape, targets and determinism") {
    const ToyTask a = make_toy_dataset(ToyKind::NodeDepth, 12, 8, 6, 42, ud());
    const ToyTask b = make_toy_dataset(ToyKind::NodeDepth, 12, 8, 6, 42, ud());
    const ToyTask c = make_toy_dataset(ToyKind::SubtreeSize, 12, 8, 6, 42, ud());
    REQUIRE(a.instances.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) {
      const auto& inst = a.instances[k];
      const std::size_t n = inst.parse.size();
      CHECK(n >= 2);
      CHECK(n <= 8);
      CHECK(inst.embeddings.rows() == n);
      CHECK(inst.embeddings.cols() == 6);
      CHECK(inst.targets[inst.parse.root()] == 0.0);
      CHECK(c.instances[k].targets[c.instances[k].parse.root()] == static_cast<double>(n));
      CHECK(inst.embeddings == b.instances[k].embeddings);
      CHECK(inst.targets == b.instances[k].targets);
      CHECK(inst.graphs.fwd == b.instances[k].graphs.fwd);
      for (double t : inst.targets) CHECK(std::isfinite(t));
    }
    CHECK_FALSE(make_toy_dataset(ToyKind::NodeDepth, 12, 8, 6, 43, ud()).instances[0].embeddings ==
                a.instances[0].embeddings);
  }

  TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(make_toy_dataset(ToyKind::NodeDepth, 3, 1, 4, 0, ud()), ConfigError);
    CHECK_THROWS_AS(make_toy_dataset(ToyKind::NodeDepth, 3, 4, 1, 0, ud()), ConfigError);
    CHECK(toy_kind_from_string("subtree-size") == ToyKind::SubtreeSize);
    CHECK(to_string(ToyKind::NodeDepth) == "node-depth");
    CHECK_THROWS_AS(toy_kind_from_string("height"), ConfigError);
  }
}

TEST_SUITE("toy training") {
  TEST_CASE("zero targets with a zero head stay at zero loss") {
    ToyTask task = make_toy_dataset(ToyKind::NodeDepth, 3, 5, 4, 1, ud());
    for (auto& inst : task.instances) std::fill(inst.targets.begin(), inst.targets.end(), 0.0);
    RggnConfig cfg;
    cfg.dim = 4;
    cfg.iterations = 2;
    RggnModel m = RggnModel::create(cfg, ud(), 1);
    ScalarHead head = ScalarHead::zeros(4);
    const auto hist = train_toy(m, head, task, 10, 1e-3);
    CHECK(hist.size() == 11);
    for (double l : hist) CHECK(l == 0.0);
  }

  TEST_CASE("training loss gradient matches central differences") {
    const ToyTask task = make_toy_dataset(ToyKind::SubtreeSize, 2, 5, 4, 3, fixture::small_vocab(3));
    RggnModel m = fixture::random_model(4, 2, 3, 3);
    ScalarHead head = ScalarHead::create(4, 3);
    Objective f;
    f.value = [&]() { return toy_loss(m, head, task); };
    f.gradient = [&]() { toy_loss_and_grad(m, head, task); };
    CHECK(fd_gradcheck({&m.store(), &head.store}, f).max_rel_error < 1e-5);
  }

  TEST_CASE("the first Adam step lowers the loss on one sentence") {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ToyTask task = make_toy_dataset(ToyKind::NodeDepth, 1, 8, 16, seed, ud());
      RggnConfig cfg;
      cfg.dim = 16;
      cfg.iterations = 3;
      RggnModel m = RggnModel::create(cfg, ud(), derive_seed(seed, 1));
      ScalarHead head = ScalarHead::create(16, derive_seed(seed, 2));
      const auto hist = train_toy(m, head, task, 1, 1e-3);
      improved += hist[1] < hist[0];
    }
    CHECK(improved >= 8);
  }

  TEST_CASE("loss history stays finite and training is reproducible") {
    const ToyTask task = make_toy_dataset(ToyKind::NodeDepth, 4, 6, 8, 9, ud());
    RggnConfig cfg;
    cfg.dim = 8;
    cfg.iterations = 2;
    auto run = [&]() {
      RggnModel m = RggnModel::create(cfg, ud(), 9);
      ScalarHead head = ScalarHead::create(8, 10);
      return train_toy(m, head, task, 30, 1e-2);
    };
    const auto a = run();
    for (double l : a) CHECK(std::isfinite(l));
    CHECK(a == run());
    CHECK(a.back() < a.front());
  }

  TEST_CASE("model and task dimensions must agree") {
    const ToyTask task = make_toy_dataset(ToyKind::NodeDepth, 2, 4, 6, 0, ud());
    RggnConfig cfg;
    cfg.dim = 4;
    RggnModel m = RggnModel::create(cfg, ud(), 0);
    ScalarHead head = ScalarHead::create(4, 0);
    CHECK_THROWS_AS(train_toy(m, head, task, 1, 1e-3), DimensionError);
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("diversity examples") {
    CHECK(diversity_metric(Matrix(2, 3, {1, 2, 3, 1, 2, 3})) == 0.0);
    CHECK(diversity_metric(Matrix(2, 2, {0, 0, 3, 4})) == 5.0);
    CHECK_THROWS_AS(diversity_metric(Matrix(1, 3)), ConfigError);
  }

  TEST_CASE("diversity matches the double-loop oracle") {
    Rng rng(5);
    const Matrix m = random_matrix(5, 4, -1, 1, rng);
    CHECK(std::abs(diversity_metric(m) - oracle::mean_pairwise(m)) < 1e-12);
  }

  TEST_CASE("translation invariance and scale equivariance") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + rng.below(8), d = 1 + rng.below(6);
      const Matrix m = random_matrix(n, d, -2, 2, rng);
      const double alpha = rng.uniform(-4, 4);
      Matrix shifted = m, scaled = m;
      std::vector<double> t(d);
      for (auto& v : t) v = rng.uniform(-10, 10);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
          shifted(i, c) += t[c];
          scaled(i, c) *= alpha;
        }
      }
      const double base = diversity_metric(m);
      CHECK(diversity_metric(shifted) == doctest::Approx(base).epsilon(1e-10));
      CHECK(diversity_metric(scaled) == doctest::Approx(std::abs(alpha) * base).epsilon(1e-10));
    }
  }

  TEST_CASE("spearman with ties") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3, 4}, {1, 9, 4, 16}) == doctest::Approx(0.8));
    // average ranks: x -> 1, 2.5, 2.5, 4
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(0.9486832980505138));
  }
}

TEST_SUITE("seeded gradcheck") {
  TEST_CASE("default setup passes") {
    const auto r = run_seeded_gradcheck(GradcheckSetup{});
    CHECK(r.max_rel_error < 1e-5);
    CHECK(r.checked > 1000);
  }
}
