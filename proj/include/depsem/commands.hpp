#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depsem/alignment.hpp"
#include "depsem/conllu.hpp"
#include "depsem/gradcheck.hpp"
#include "depsem/rggn.hpp"
#include "depsem/training.hpp"

namespace depsem::cli {

namespace fs = std::filesystem;

struct InitModelOptions {
  std::size_t dim = 768;
  std::size_t iterations = 5;
  std::optional<fs::path> labels;  // default: Universal Dependencies set
  std::uint64_t seed = 0;
  fs::path out;
  Dtype dtype = Dtype::F32;
  bool identity_fc = false;
  bool use_fwd = true;
  bool use_rev = true;
  bool use_edge_labels = true;
};

void cmd_init_model(const InitModelOptions& opt);

enum class OutputFormat { Binary, Jsonl };
OutputFormat output_format_from_string(const std::string& s);

struct RunConfig {
  fs::path conllu;
  fs::path embeddings;
  fs::path alignment;
  fs::path model;
  fs::path out;
  OutputFormat format = OutputFormat::Binary;
  bool upsample = false;
  std::optional<bool> use_fwd;
  std::optional<bool> use_rev;
  std::optional<bool> use_edge_labels;
  std::size_t jobs = 1;
};

// Pool, build graphs, enhance and optionally upsample every sentence. The
// three input lists are parallel; results come back in input order.
std::vector<EnhancedReps> enhance_corpus(const std::vector<SentenceParse>& sentences,
                                         const std::vector<Matrix>& subword_embeddings,
                                         const std::vector<SubwordAlignment>& alignments,
                                         const RggnModel& model, bool upsample,
                                         std::size_t jobs = 1);

void cmd_enhance(const RunConfig& config);

// Path of the JSONL index written next to binary enhance output.
fs::path index_path(const fs::path& out);

struct GraphOptions {
  fs::path conllu;
  fs::path out;
  std::optional<fs::path> labels;
};

void cmd_graph(const GraphOptions& opt);

// Prints a one-line report; returns true iff max relative error < threshold.
bool cmd_gradcheck(const GradcheckSetup& setup, double eps, double threshold, std::ostream& report);

struct TrainToyOptions {
  ToyKind kind = ToyKind::NodeDepth;
  std::size_t sentences = 20;
  std::size_t max_words = 8;
  std::size_t dim = 16;
  std::size_t iterations = 3;
  std::size_t steps = 500;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::optional<fs::path> labels;
  fs::path out;
  std::optional<fs::path> model_out;
};

void cmd_train_toy(const TrainToyOptions& opt);

// One value per EMB1 record in the file, printed one per line.
std::vector<double> cmd_diversity(const fs::path& reps, std::ostream& report);

}  // namespace depsem::cli
