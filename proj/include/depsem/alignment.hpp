#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "depsem/tensor.hpp"

namespace depsem {

// Subword-to-word mapping for one sentence. groups[i] lists the subword rows
// belonging to word i.
struct SubwordAlignment {
  std::vector<std::string> words;
  std::vector<std::string> subwords;
  std::vector<std::vector<std::size_t>> groups;
  std::optional<std::vector<std::size_t>> phoneme_counts;

  std::size_t word_count() const noexcept { return groups.size(); }
  std::size_t subword_count() const noexcept { return subwords.size(); }
};

// Groups nonempty and strictly ascending, pairwise disjoint, indices < m;
// words and phoneme_counts (if present) have one entry per group.
void validate_alignment(const SubwordAlignment& a);

// ALIGN is a JSON object:
//   {"words": [...], "subwords": [...], "word_to_subwords": [[...], ...],
//    "phoneme_counts": [...]}   (phoneme_counts optional)
SubwordAlignment parse_alignment(const std::string& json_text);
std::string alignment_to_json(const SubwordAlignment& a);

SubwordAlignment read_alignment(const std::filesystem::path& path);
// A single ALIGN object, a JSON array of them, or JSON Lines.
std::vector<SubwordAlignment> read_alignments(const std::filesystem::path& path);
void write_alignments(const std::filesystem::path& path, const std::vector<SubwordAlignment>& a);

// Row i of the result is the arithmetic mean of the subword rows in groups[i].
Matrix pool_subwords(const Matrix& subword_embeddings, const SubwordAlignment& alignment);

}  // namespace depsem
