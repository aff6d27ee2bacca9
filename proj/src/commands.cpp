#include "depsem/commands.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "depsem/embeddings.hpp"
#include "depsem/error.hpp"
#include "depsem/graph.hpp"
#include "depsem/model_file.hpp"

namespace depsem::cli {

namespace {

RelationVocab load_vocab(const std::optional<fs::path>& labels) {
  return labels ? RelationVocab::read(*labels) : RelationVocab::universal_dependencies();
}

std::string format_real(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void append_rows(std::string& out, const Matrix& m) {
  out.push_back('[');
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) out.push_back(',');
    out.push_back('[');
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out.push_back(',');
      out += format_real(m(r, c));
    }
    out.push_back(']');
  }
  out.push_back(']');
}

std::ofstream open_out(const fs::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

void cmd_init_model(const InitModelOptions& opt) {
  if (opt.dim == 0) throw ConfigError("--dim must be at least 1");
  RggnConfig cfg;
  cfg.dim = opt.dim;
  cfg.iterations = opt.iterations;
  cfg.use_fwd = opt.use_fwd;
  cfg.use_rev = opt.use_rev;
  cfg.use_edge_labels = opt.use_edge_labels;
  if (!cfg.use_fwd && !cfg.use_rev) throw ConfigError("ablation flags cannot disable both directions");
  RggnModel model = RggnModel::create(cfg, load_vocab(opt.labels), opt.seed, opt.dtype);
  if (opt.identity_fc) model.set_identity_fc();
  write_model(opt.out, model);
}

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "binary" || s == "emb1") return OutputFormat::Binary;
  if (s == "jsonl") return OutputFormat::Jsonl;
  throw ConfigError("unknown output format '" + s + "' (expected binary or jsonl)");
}

fs::path index_path(const fs::path& out) {
  fs::path p = out;
  p += ".index.jsonl";
  return p;
}

std::vector<EnhancedReps> enhance_corpus(const std::vector<SentenceParse>& sentences,
                                         const std::vector<Matrix>& subword_embeddings,
                                         const std::vector<SubwordAlignment>& alignments,
                                         const RggnModel& model, bool upsample,
                                         std::size_t jobs) {
  if (subword_embeddings.size() != sentences.size() || alignments.size() != sentences.size()) {
    throw AlignmentError("input sizes disagree: " + std::to_string(sentences.size()) +
                         " parsed sentences, " + std::to_string(subword_embeddings.size()) +
                         " embedding records, " + std::to_string(alignments.size()) +
                         " alignments");
  }
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (alignments[s].word_count() != sentences[s].size()) {
      throw AlignmentError("sentence " + std::to_string(s) + ": parse has " +
                           std::to_string(sentences[s].size()) + " words but alignment has " +
                           std::to_string(alignments[s].word_count()));
    }
    if (subword_embeddings[s].cols() != model.dim()) {
      throw DimensionError("sentence " + std::to_string(s) + ": embedding dim " +
                           std::to_string(subword_embeddings[s].cols()) +
                           " does not match model dim " + std::to_string(model.dim()));
    }
    if (upsample && !alignments[s].phoneme_counts) {
      throw AlignmentError("sentence " + std::to_string(s) +
                           ": --upsample needs phoneme_counts in the alignment");
    }
  }

  std::vector<EnhancedReps> results(sentences.size());
  auto process = [&](std::size_t s) {
    try {
      const Matrix nodes = pool_subwords(subword_embeddings[s], alignments[s]);
      const DependencyGraphPair pair = build_graph_pair(sentences[s], model.vocab());
      EnhancedReps reps = enhance(pair, model, nodes);
      if (upsample) upsample_to_phonemes(reps, *alignments[s].phoneme_counts);
      results[s] = std::move(reps);
    } catch (const AlignmentError& e) {
      throw AlignmentError("sentence " + std::to_string(s) + ": " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError("sentence " + std::to_string(s) + ": " + e.what());
    }
  };

  if (jobs <= 1 || sentences.size() <= 1) {
    for (std::size_t s = 0; s < sentences.size(); ++s) process(s);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < std::min(jobs, sentences.size()); ++w) {
    workers.emplace_back([&]() {
      for (std::size_t s; (s = next.fetch_add(1)) < sentences.size();) {
        try {
          process(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

void cmd_enhance(const RunConfig& config) {
  for (const fs::path* p : {&config.conllu, &config.embeddings, &config.alignment, &config.model}) {
    if (!fs::exists(*p)) throw IoError("input file not found: " + p->string());
  }
  RggnModel model = read_model(config.model);
  if (config.use_fwd || config.use_rev || config.use_edge_labels) {
    model.set_flags(config.use_fwd.value_or(model.config().use_fwd),
                    config.use_rev.value_or(model.config().use_rev),
                    config.use_edge_labels.value_or(model.config().use_edge_labels));
  }
  const auto sentences = read_conllu(config.conllu);
  const auto embeddings = read_embedding_records(config.embeddings);
  const auto alignments = read_alignments(config.alignment);
  const auto results =
      enhance_corpus(sentences, embeddings, alignments, model, config.upsample, config.jobs);

  if (config.format == OutputFormat::Jsonl) {
    std::ofstream out = open_out(config.out, false);
    for (std::size_t s = 0; s < results.size(); ++s) {
      std::string line = "{\"sentence\":" + std::to_string(s) +
                         ",\"words\":" + nlohmann::json(sentences[s].forms()).dump() + ",\"reps\":";
      append_rows(line, results[s].word_reps);
      if (results[s].phoneme_reps) {
        line += ",\"phoneme_reps\":";
        append_rows(line, *results[s].phoneme_reps);
      }
      line += "}\n";
      out << line;
    }
    if (!out) throw IoError("write failed for " + config.out.string());
    return;
  }

  std::ofstream out = open_out(config.out, true);
  std::ofstream index = open_out(index_path(config.out), false);
  std::size_t offset = 0;
  auto write_record = [&](const Matrix& m) {
    const std::string bytes = emb1_bytes(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    nlohmann::json entry = {{"offset", offset}, {"rows", m.rows()}, {"dim", m.cols()}};
    offset += bytes.size();
    return entry;
  };
  for (std::size_t s = 0; s < results.size(); ++s) {
    nlohmann::json entry;
    entry["sentence"] = s;
    entry["words"] = sentences[s].forms();
    entry["word_reps"] = write_record(results[s].word_reps);
    if (results[s].phoneme_reps) {
      if (results[s].phoneme_reps->rows() == 0) {
        throw AlignmentError("sentence " + std::to_string(s) +
                             ": all phoneme counts are zero, nothing to write");
      }
      entry["phoneme_reps"] = write_record(*results[s].phoneme_reps);
    }
    index << entry.dump() << '\n';
  }
  if (!out || !index) throw IoError("write failed for " + config.out.string());
}

void cmd_graph(const GraphOptions& opt) {
  const RelationVocab vocab = load_vocab(opt.labels);
  const auto sentences = read_conllu(opt.conllu);
  std::ofstream out = open_out(opt.out, false);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto pair = build_graph_pair(sentences[s], vocab);
    const std::string name = sentences[s].sent_id.empty() ? "s" + std::to_string(s) : sentences[s].sent_id;
    out << to_dot(pair, sentences[s].forms(), vocab, name);
  }
  if (!out) throw IoError("write failed for " + opt.out.string());
}

bool cmd_gradcheck(const GradcheckSetup& setup, double eps, double threshold,
                   std::ostream& report) {
  GradcheckOptions opt;
  opt.eps = eps;
  opt.seed = setup.seed;
  const GradcheckReport r = run_seeded_gradcheck(setup, opt);
  const bool ok = r.max_rel_error < threshold;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_error);
  report << "max_rel_error=" << buf << " checked=" << r.checked << " worst=" << r.worst_tensor()
         << " status=" << (ok ? "pass" : "fail") << '\n';
  return ok;
}

void cmd_train_toy(const TrainToyOptions& opt) {
  const RelationVocab vocab = load_vocab(opt.labels);
  const ToyTask task =
      make_toy_dataset(opt.kind, opt.sentences, opt.max_words, opt.dim, opt.seed, vocab);
  RggnConfig cfg;
  cfg.dim = opt.dim;
  cfg.iterations = opt.iterations;
  RggnModel model = RggnModel::create(cfg, vocab, derive_seed(opt.seed, 1), Dtype::F32);
  ScalarHead head = ScalarHead::create(opt.dim, derive_seed(opt.seed, 2));
  const auto history = train_toy(model, head, task, opt.steps, opt.lr);

  std::ofstream out = open_out(opt.out, false);
  out << "step,loss\n";
  for (std::size_t s = 0; s < history.size(); ++s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", history[s]);
    out << s << ',' << buf << '\n';
  }
  if (!out) throw IoError("write failed for " + opt.out.string());
  if (opt.model_out) write_model(*opt.model_out, model);
}

std::vector<double> cmd_diversity(const fs::path& reps, std::ostream& report) {
  std::vector<double> values;
  for (const Matrix& m : read_embedding_records(reps)) {
    values.push_back(diversity_metric(m));
    report << format_real(values.back()) << '\n';
  }
  return values;
}

}  // namespace depsem::cli
