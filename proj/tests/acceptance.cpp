// Acceptance report: one line per criterion with the measured values. The
// exit status is the number of failing criteria.

#include <sys/wait.h>

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>

#include "depsem/alignment.hpp"
#include "depsem/baseline.hpp"
#include "depsem/commands.hpp"
#include "depsem/conllu.hpp"
#include "depsem/embeddings.hpp"
#include "depsem/model_file.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace depsem;
using fixture::max_abs_diff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::size_t> hops_to(const RelationalGraph& g, std::size_t target) {
  const std::size_t inf = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(g.node_count(), inf);
  dist[target] = 0;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : g.edges()) {
      if (dist[e.dst] != inf && dist[e.src] == inf) {
        dist[e.src] = dist[e.dst] + 1;
        grew = true;
      }
    }
  }
  return dist;
}

SubwordAlignment random_alignment(const SentenceParse& s, Rng& rng) {
  SubwordAlignment a;
  for (const auto& w : s.words) {
    a.words.push_back(w.form);
    std::vector<std::size_t> g;
    const std::size_t k = 1 + rng.below(3);
    for (std::size_t j = 0; j < k; ++j) {
      g.push_back(a.subwords.size());
      a.subwords.push_back(j == 0 ? w.form : "##" + std::to_string(j));
    }
    a.groups.push_back(g);
  }
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < s.words.size(); ++i) counts.push_back(rng.below(5));
  a.phoneme_counts = counts;
  return a;
}

// ---------------------------------------------------------------------------

Outcome gradient_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0, tensors = 0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GradcheckSetup setup;
    setup.dim = 8;
    setup.nodes = 6;
    setup.iterations = 2;
    setup.labels = 5;
    setup.seed = seed;
    const auto r = run_seeded_gradcheck(setup);
    checked += r.checked;
    tensors += r.tensors.size();
    ok = ok && r.max_rel_error < 1e-5;
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      where = fmt("seed %llu %s", static_cast<unsigned long long>(seed), r.worst_tensor().c_str());
    }
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 120.0;
  return {ok, fmt("gradient fidelity: max rel error %.3e (%s) over 10 seeds, %zu tensors, %zu coordinates, %.1f s",
                  worst, where.c_str(), tensors, checked, dt)};
}

Outcome oracle_equivalence() {
  Rng rng(5150);
  double step = 0.0, run = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(8), L = 1 + rng.below(5);
    const RggnModel m = fixture::random_model(d, 3, L, rng.next_u64());
    const auto inst = fixture::random_instance(n, d, m.vocab(), rng);
    for (const bool fwd : {true, false}) {
      const auto& g = fwd ? inst.pair.fwd : inst.pair.rev;
      const auto& p = fwd ? m.fwd() : m.rev();
      step = std::max(step, max_abs_diff(propagate_once(g, m.store(), p, inst.emb),
                                         oracle::dense_step(g, m.store(), p, inst.emb)));
      run = std::max(run, max_abs_diff(run_direction(g, m.store(), p, inst.emb, 3),
                                       oracle::dense_run(g, m.store(), p, inst.emb, 3)));
    }
  }
  return {step < 1e-9 && run < 1e-9,
          fmt("oracle equivalence: 200 trees x 2 directions, one step max |diff| %.2e, K=3 run max |diff| %.2e",
              step, run)};
}

Outcome locality() {
  Rng rng(3003);
  std::size_t probes = 0, violations = 0;
  const double bump = 0.5;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng.below(9), d = 1 + rng.below(6);
    const RggnModel m = fixture::random_model(d, 2, 1 + rng.below(5), rng.next_u64());
    const auto inst = fixture::random_instance(n, d, m.vocab(), rng);
    for (const bool fwd : {true, false}) {
      const auto& g = fwd ? inst.pair.fwd : inst.pair.rev;
      const auto& p = fwd ? m.fwd() : m.rev();
      const Matrix base = propagate(g, m.store(), p, inst.emb, 2);
      for (std::size_t i = 0; i < n; ++i) {
        const auto dist = hops_to(g, i);
        for (std::size_t j = 0; j < n; ++j) {
          if (dist[j] != static_cast<std::size_t>(-1) && dist[j] <= 2) continue;
          Matrix pert = inst.emb;
          for (std::size_t c = 0; c < d; ++c) pert(j, c) += bump;
          const Matrix out = propagate(g, m.store(), p, pert, 2);
          ++probes;
          for (std::size_t c = 0; c < d; ++c) violations += out(i, c) != base(i, c);
        }
      }
    }
  }
  return {violations == 0 && probes > 0,
          fmt("locality: 50 trees, K=2, %zu (node, far node) probes, %zu changed coordinates", probes, violations)};
}

Outcome graph_laws() {
  const auto vocab = RelationVocab::universal_dependencies();
  Rng rng(404);
  std::size_t bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const auto s = random_tree(n, vocab, rng);
    const auto pair = build_graph_pair(s, vocab);
    const auto in = pair.fwd.in_degrees();
    const bool ok = build_reverse(pair.rev) == pair.fwd && build_reverse(build_reverse(pair.fwd)) == pair.fwd &&
                    std::count(in.begin(), in.end(), 0u) == 1 && pair.fwd.edge_count() == n - 1;
    bad += !ok;
  }
  const auto fig = read_conllu(testutil::data_path("fig2.conllu")).at(0);
  std::size_t jumped = 0, fox = 0;
  for (const auto& w : fig.words) {
    if (w.form == "jumped") jumped = w.index - 1;
    if (w.form == "fox") fox = w.index - 1;
  }
  const auto fpair = build_graph_pair(fig, vocab);
  bool nsubj = false;
  for (const auto& e : fpair.fwd.edges()) {
    nsubj = nsubj || (e.src == jumped && e.dst == fox && e.rel == vocab.lookup("nsubj"));
  }
  return {bad == 0 && nsubj,
          fmt("graph laws: %d/200 parses satisfy involution, single root, n-1 edges; figure nsubj jumped->fox %s",
              200 - static_cast<int>(bad), nsubj ? "present" : "missing")};
}

Outcome exactness() {
  Rng rng(777);
  double pool = 0.0;
  std::size_t not_double = 0, up_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(8);
    const auto vocab = fixture::small_vocab(3);
    const auto s = random_tree(n, vocab, rng);
    const auto a = random_alignment(s, rng);
    const Matrix sub = random_matrix(a.subwords.size(), d, -1, 1, rng);
    const Matrix pooled = pool_subwords(sub, a);
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t k : a.groups[w]) sum += sub(k, c);
        pool = std::max(pool, std::abs(pooled(w, c) - sum / static_cast<double>(a.groups[w].size())));
      }
    }
    RggnModel m = fixture::random_model(d, 0, 3, rng.next_u64());
    m.set_identity_fc();
    const auto pair = build_graph_pair(s, vocab);
    EnhancedReps reps = enhance(pair, m, pooled);
    for (std::size_t i = 0; i < pooled.size(); ++i) not_double += reps.word_reps.flat()[i] != 2.0 * pooled.flat()[i];
    upsample_to_phonemes(reps, *a.phoneme_counts);
    const auto& counts = *a.phoneme_counts;
    const Matrix& p = *reps.phoneme_reps;
    up_bad += p.rows() != std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    std::size_t row = 0;
    for (std::size_t w = 0; w < n && up_bad == 0; ++w) {
      for (std::size_t k = 0; k < counts[w]; ++k, ++row) {
        for (std::size_t c = 0; c < d; ++c) up_bad += p(row, c) != reps.word_reps(w, c);
      }
    }
  }
  return {pool < 1e-12 && not_double == 0 && up_bad == 0,
          fmt("pooling and fusion exactness: 100 sentences, pooling max |diff| %.2e, %zu entries != 2v, %zu upsampling mismatches",
              pool, not_double, up_bad)};
}

struct ToyRun {
  std::vector<double> history;
  double rho = 0.0;
  double rho_identity = 0.0;
  double div_trained = 0.0;
  double div_k0 = 0.0;
  double seconds = 0.0;
};

std::vector<double> nodes_of(const ToyTask& t, const std::function<Vector(const ToyInstance&)>& f,
                             std::vector<double>* targets) {
  std::vector<double> out;
  for (const auto& inst : t.instances) {
    const Vector v = f(inst);
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(v[i]);
      if (targets) targets->push_back(inst.targets[i]);
    }
  }
  return out;
}

double mean_diversity(const RggnModel& m, const ToyTask& t) {
  double s = 0.0;
  for (const auto& inst : t.instances) s += diversity_metric(enhance(inst.graphs, m, inst.embeddings).word_reps);
  return s / static_cast<double>(t.instances.size());
}

const ToyRun& toy_run() {
  static const ToyRun run = [] {
    ToyRun r;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = 0;
    const auto vocab = RelationVocab::universal_dependencies();
    const ToyTask train = make_toy_dataset(ToyKind::NodeDepth, 20, 8, 16, seed, vocab);
    const ToyTask held = make_toy_dataset(ToyKind::NodeDepth, 20, 8, 16, seed + 1000, vocab);

    RggnConfig cfg;
    cfg.dim = 16;
    cfg.iterations = 3;
    RggnModel m = RggnModel::create(cfg, vocab, derive_seed(seed, 1), Dtype::F32);
    ScalarHead h = ScalarHead::create(16, derive_seed(seed, 2));
    r.history = train_toy(m, h, train, 500, 1e-3);
    std::vector<double> y;
    const auto pred = nodes_of(held, [&](const ToyInstance& i) { return predict(m, h, i); }, &y);
    r.rho = spearman(pred, y);

    cfg.iterations = 0;
    RggnModel id = RggnModel::create(cfg, vocab, derive_seed(seed, 1), Dtype::F32);
    id.set_identity_fc();
    ScalarHead hid = ScalarHead::create(16, derive_seed(seed, 2));
    train_toy(id, hid, train, 500, 1e-3);
    r.rho_identity = spearman(nodes_of(held, [&](const ToyInstance& i) { return predict(id, hid, i); }, nullptr), y);

    RggnModel k0 = m;
    k0.set_iterations(0);
    r.div_trained = mean_diversity(m, train);
    r.div_k0 = mean_diversity(k0, train);
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome learning_signal() {
  const ToyRun& r = toy_run();
  const double ratio = r.history.back() / r.history.front();
  const bool ok = ratio < 0.5 && r.rho > 0.5 && !(r.rho_identity > 0.5) && r.seconds < 300.0;
  return {ok, fmt("learning signal: loss %.4g -> %.4g (ratio %.2e, need < 0.5), held-out rho %.3f (need > 0.5), "
                  "K=0 identity rho %.3f (need <= 0.5), %.1f s",
                  r.history.front(), r.history.back(), ratio, r.rho, r.rho_identity, r.seconds)};
}

Outcome structural_sensitivity() {
  const RelationalGraph fwd(4, {{0, 1, 0}, {1, 2, 0}, {0, 3, 0}}, 3);
  const DependencyGraphPair pair{fwd, build_reverse(fwd)};
  int distinct = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RggnModel m = fixture::random_model(6, 1 + seed % 3, 2, seed + 500);
    Rng rng(seed + 500);
    Matrix emb = random_matrix(4, 6, -1, 1, rng);
    for (std::size_t c = 0; c < 6; ++c) emb(3, c) = emb(1, c);
    const Matrix out = enhance(pair, m, emb).word_reps;
    double dist = 0.0;
    for (std::size_t c = 0; c < 6; ++c) dist += (out(1, c) - out(3, c)) * (out(1, c) - out(3, c));
    distinct += std::sqrt(dist) > 1e-6;
  }
  const ToyRun& r = toy_run();
  return {distinct >= 8 && r.div_trained > r.div_k0,
          fmt("structural sensitivity: %d/10 seeds separate equal inputs (need >= 8); trained diversity %.4f vs K=0 %.4f "
              "(need greater)",
              distinct, r.div_trained, r.div_k0)};
}

int run_cli(const testutil::TempDir& dir, const std::string& args) {
  const std::string cmd = std::string("\"") + DEPSEM_CLI + "\" " + args + " >\"" + (dir / "cli.out").string() +
                          "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome io_determinism() {
  using testutil::read_file;
  testutil::TempDir dir;
  Rng rng(8080);
  std::size_t rt_bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = round_to_f32(random_matrix(1 + rng.below(9), 1 + rng.below(9), -10, 10, rng));
    const std::string bytes = emb1_bytes(m);
    rt_bad += parse_embedding_records(bytes).at(0) != m || emb1_bytes(parse_embedding_records(bytes).at(0)) != bytes;
    const auto s = random_tree(1 + rng.below(8), fixture::small_vocab(3), rng);
    const std::string js = alignment_to_json(random_alignment(s, rng));
    rt_bad += alignment_to_json(parse_alignment(js)) != js;
    const std::string mb = model_bytes(fixture::random_model(1 + rng.below(6), rng.below(3), 1 + rng.below(4), rng.next_u64()));
    rt_bad += model_bytes(parse_model(mb)) != mb;
  }

  const auto sents = read_conllu(testutil::data_path("sample10.conllu"));
  std::vector<Matrix> subs;
  std::vector<SubwordAlignment> aligns;
  for (const auto& s : sents) {
    aligns.push_back(random_alignment(s, rng));
    subs.push_back(round_to_f32(random_matrix(aligns.back().subwords.size(), 8, -1, 1, rng)));
  }
  write_embedding_records(dir / "sub.emb", subs);
  write_alignments(dir / "align.jsonl", aligns);
  cli::InitModelOptions mo;
  mo.dim = 8;
  mo.iterations = 3;
  mo.seed = 21;
  mo.out = dir / "model.rggn";
  cli::cmd_init_model(mo);

  cli::RunConfig rc;
  rc.conllu = testutil::data_path("sample10.conllu");
  rc.embeddings = dir / "sub.emb";
  rc.alignment = dir / "align.jsonl";
  rc.model = mo.out;
  rc.upsample = true;
  rc.out = dir / "a.emb";
  cli::cmd_enhance(rc);
  rc.out = dir / "b.emb";
  cli::cmd_enhance(rc);
  const bool repeat = read_file(dir / "a.emb") == read_file(dir / "b.emb") &&
                      read_file(dir / "a.emb.index.jsonl") == read_file(dir / "b.emb.index.jsonl");

  const std::string args = "enhance --upsample --conllu \"" + rc.conllu.string() + "\" --embeddings \"" +
                           rc.embeddings.string() + "\" --alignment \"" + rc.alignment.string() + "\" --model \"" +
                           rc.model.string() + "\" --out \"" + (dir / "c.emb").string() + "\"";
  const int code = run_cli(dir, args);
  const auto lib = cli::enhance_corpus(sents, subs, aligns, read_model(mo.out), true);
  const auto cli_recs = code == 0 ? read_embedding_records(dir / "c.emb") : std::vector<Matrix>{};
  bool match = cli_recs.size() == 2 * lib.size() && read_file(dir / "c.emb") == read_file(dir / "a.emb");
  for (std::size_t i = 0; match && i < lib.size(); ++i) {
    match = cli_recs[2 * i] == round_to_f32(lib[i].word_reps) &&
            cli_recs[2 * i + 1] == round_to_f32(*lib[i].phoneme_reps);
  }
  return {rt_bad == 0 && repeat && match,
          fmt("I/O and determinism: %zu round-trip mismatches over 60 EMB1/ALIGN/model files; repeat enhance %s; "
              "CLI (exit %d) vs library %s",
              rt_bad, repeat ? "bit-identical" : "differs", code, match ? "bit-identical" : "differs")};
}

Outcome baseline_and_ablation() {
  const auto vocab = RelationVocab::universal_dependencies();
  Rng rng(9090);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 1 + rng.below(6), d = 2 + rng.below(5);
    BaselineConfig cfg;
    cfg.word_dim = d;
    cfg.label_dim = 4;
    cfg.pos_enc_dim = 4;
    BaselineModel m = BaselineModel::create(cfg, vocab, rng.next_u64());
    const auto s = random_tree(n, vocab, rng);
    const Matrix emb = random_matrix(n, d, -1, 1, rng);
    const Matrix probe = random_matrix(n, d, -1, 1, rng);
    worst = std::max(worst, fixture::baseline_gradcheck(m, s, emb, probe).max_rel_error);
  }
  std::size_t row_bad = 0;
  BaselineConfig cfg;
  cfg.word_dim = 6;
  const BaselineModel bm = BaselineModel::create(cfg, vocab, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(25);
    const auto s = random_tree(n, vocab, rng);
    row_bad += blstm_enhance(s, random_matrix(n, 6, -1, 1, rng), bm).rows() != n;
  }

  std::size_t abl_bad = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(7), d = 1 + rng.below(6);
    RggnModel m = fixture::random_model(d, 1 + rng.below(3), 2 + rng.below(4), rng.next_u64());
    const auto inst = fixture::random_instance(n, d, m.vocab(), rng);
    const Matrix cot = random_matrix(n, d, -1, 1, rng);
    for (const auto& [f, r, l] : {std::tuple{true, false, true}, std::tuple{false, true, true},
                                  std::tuple{true, true, false}}) {
      m.set_flags(f, r, l);
      const Matrix out = enhance(inst.pair, m, inst.emb).word_reps;
      abl_bad += out.rows() != n || out.cols() != d;
      for (double v : out.flat()) abl_bad += !std::isfinite(v);
      m.store().zero_grad();
      rggn_backward(inst.pair, m, inst.emb, cot);
      for (const auto& p : m.store()) {
        bool disabled = (!f && p.name.rfind("fwd.", 0) == 0) || (!r && p.name.rfind("rev.", 0) == 0);
        if (!l) {
          for (std::size_t rel = 1; rel < m.vocab().size(); ++rel) {
            disabled = disabled || p.name == "fwd.edge." + std::to_string(rel) ||
                       p.name == "rev.edge." + std::to_string(rel);
          }
        }
        if (!disabled) continue;
        for (double v : p.grad.flat()) abl_bad += v != 0.0;
      }
    }
  }
  return {worst < 1e-5 && row_bad == 0 && abl_bad == 0,
          fmt("baseline parity: BLSTM gradcheck max rel error %.3e over 5 parses; %zu/200 parses with wrong row count; "
              "%zu ablation violations over 30 configurations",
              worst, row_bad, abl_bad)};
}

}  // namespace

int main() {
  const std::vector<Outcome (*)()> criteria = {gradient_fidelity, oracle_equivalence, locality,
                                               graph_laws,        exactness,          learning_signal,
                                               structural_sensitivity, io_determinism, baseline_and_ablation};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] AC%zu %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("criteria evaluated: %zu, passed: %zu, failed: %d\n", criteria.size(), criteria.size() - failed, failed);
  return failed;
}
