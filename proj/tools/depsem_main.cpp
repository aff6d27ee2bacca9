#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "depsem/commands.hpp"
#include "depsem/error.hpp"

namespace cli = depsem::cli;

int main(int argc, char** argv) {
  CLI::App app{"Dependency-graph enhancement of word-level embeddings"};
  app.require_subcommand(1);

  // init-model
  cli::InitModelOptions init;
  std::string init_labels, init_dtype = "f32";
  bool init_no_fwd = false, init_no_rev = false, init_no_labels = false;
  auto* c_init = app.add_subcommand("init-model", "Write a freshly initialized RGGN1 model");
  c_init->add_option("--dim", init.dim, "Hidden/embedding dimension")->capture_default_str();
  c_init->add_option("--iterations", init.iterations, "Propagation steps")->capture_default_str();
  c_init->add_option("--labels", init_labels, "Relation label file, one label per line");
  c_init->add_option("--seed", init.seed, "Initialization seed")->capture_default_str();
  c_init->add_option("--dtype", init_dtype, "Stored precision: f32 or f64")->capture_default_str();
  c_init->add_option("--out", init.out, "Output model path")->required();
  c_init->add_flag("--identity-fc", init.identity_fc, "Set both output layers to identity");
  c_init->add_flag("--no-fwd", init_no_fwd, "Disable the forward network");
  c_init->add_flag("--no-rev", init_no_rev, "Disable the reverse network");
  c_init->add_flag("--no-edge-labels", init_no_labels, "Share one message matrix across labels");

  // enhance
  cli::RunConfig run;
  std::string run_format = "binary";
  bool run_no_fwd = false, run_no_rev = false, run_no_labels = false;
  auto* c_enh = app.add_subcommand("enhance", "Enhance pooled word embeddings over dependency graphs");
  c_enh->add_option("--conllu", run.conllu, "CoNLL-U parses")->required();
  c_enh->add_option("--embeddings", run.embeddings, "EMB1 subword embeddings, one record per sentence")->required();
  c_enh->add_option("--alignment", run.alignment, "ALIGN JSON or JSON Lines, one object per sentence")->required();
  c_enh->add_option("--model", run.model, "RGGN1 model file")->required();
  c_enh->add_option("--out", run.out, "Output path")->required();
  c_enh->add_option("--format", run_format, "binary (EMB1 + index) or jsonl")->capture_default_str();
  c_enh->add_flag("--upsample", run.upsample, "Also emit phoneme-level representations");
  c_enh->add_flag("--no-fwd", run_no_fwd, "Disable the forward network");
  c_enh->add_flag("--no-rev", run_no_rev, "Disable the reverse network");
  c_enh->add_flag("--no-edge-labels", run_no_labels, "Collapse edge labels");
  c_enh->add_option("--jobs", run.jobs, "Worker threads")->capture_default_str();

  // graph
  cli::GraphOptions graph;
  std::string graph_labels;
  auto* c_graph = app.add_subcommand("graph", "Export forward/reverse graphs as DOT");
  c_graph->add_option("--conllu", graph.conllu, "CoNLL-U parses")->required();
  c_graph->add_option("--out", graph.out, "Output DOT path")->required();
  c_graph->add_option("--labels", graph_labels, "Relation label file");

  // gradcheck
  depsem::GradcheckSetup gc;
  double gc_eps = 1e-5, gc_threshold = 1e-5;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference check of the full backward pass");
  c_gc->add_option("--dim", gc.dim)->capture_default_str();
  c_gc->add_option("--nodes", gc.nodes)->capture_default_str();
  c_gc->add_option("--iterations", gc.iterations)->capture_default_str();
  c_gc->add_option("--labels", gc.labels, "Number of relation labels")->capture_default_str();
  c_gc->add_option("--seed", gc.seed)->capture_default_str();
  c_gc->add_option("--eps", gc_eps)->capture_default_str();
  c_gc->add_option("--threshold", gc_threshold)->capture_default_str();

  // train-toy
  cli::TrainToyOptions toy;
  std::string toy_kind = "node-depth", toy_labels, toy_model_out;
  auto* c_toy = app.add_subcommand("train-toy", "Train on a synthetic tree-structure task; writes step,loss CSV");
  c_toy->add_option("--kind", toy_kind, "node-depth or subtree-size")->capture_default_str();
  c_toy->add_option("--sentences", toy.sentences)->capture_default_str();
  c_toy->add_option("--max-words", toy.max_words)->capture_default_str();
  c_toy->add_option("--dim", toy.dim)->capture_default_str();
  c_toy->add_option("--iterations", toy.iterations)->capture_default_str();
  c_toy->add_option("--steps", toy.steps)->capture_default_str();
  c_toy->add_option("--lr", toy.lr)->capture_default_str();
  c_toy->add_option("--seed", toy.seed)->capture_default_str();
  c_toy->add_option("--labels", toy_labels, "Relation label file");
  c_toy->add_option("--out", toy.out, "Loss CSV path")->required();
  c_toy->add_option("--model-out", toy_model_out, "Also write the trained model");

  // diversity
  std::string div_path;
  auto* c_div = app.add_subcommand("diversity", "Mean pairwise distance of each EMB1 record");
  c_div->add_option("reps", div_path, "EMB1 file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_init) {
      if (!init_labels.empty()) init.labels = init_labels;
      init.dtype = depsem::dtype_from_string(init_dtype);
      init.use_fwd = !init_no_fwd;
      init.use_rev = !init_no_rev;
      init.use_edge_labels = !init_no_labels;
      cli::cmd_init_model(init);
    } else if (*c_enh) {
      run.format = cli::output_format_from_string(run_format);
      if (run_no_fwd) run.use_fwd = false;
      if (run_no_rev) run.use_rev = false;
      if (run_no_labels) run.use_edge_labels = false;
      cli::cmd_enhance(run);
    } else if (*c_graph) {
      if (!graph_labels.empty()) graph.labels = graph_labels;
      cli::cmd_graph(graph);
    } else if (*c_gc) {
      return cli::cmd_gradcheck(gc, gc_eps, gc_threshold, std::cout) ? 0 : 1;
    } else if (*c_toy) {
      toy.kind = depsem::toy_kind_from_string(toy_kind);
      if (!toy_labels.empty()) toy.labels = toy_labels;
      if (!toy_model_out.empty()) toy.model_out = toy_model_out;
      cli::cmd_train_toy(toy);
    } else if (*c_div) {
      cli::cmd_diversity(div_path, std::cout);
    }
  } catch (const depsem::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
