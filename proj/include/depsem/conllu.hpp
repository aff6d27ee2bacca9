#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace depsem {

struct WordToken {
  std::size_t index = 0;  // 1-based position in the sentence
  std::string form;
  std::size_t head = 0;   // 0 = attached to the virtual root
  std::string deprel;

  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  std::string deps = "_";
  std::string misc = "_";

  std::size_t line = 0;  // source line, 0 when not read from a file
};

struct SentenceParse {
  std::vector<WordToken> words;
  std::string text;     // from "# text = ..." when present
  std::string sent_id;  // from "# sent_id = ..." when present
  std::size_t first_line = 0;

  std::size_t size() const noexcept { return words.size(); }
  std::vector<std::string> forms() const;
  // 0-based index of the root word.
  std::size_t root() const;
};

// Parses CoNLL-U. Multiword-token ranges ("3-4") and empty nodes ("5.1") are
// skipped; every sentence is validated as a single-rooted tree. Throws
// ParseError carrying the offending line number.
std::vector<SentenceParse> parse_conllu(std::istream& in);
std::vector<SentenceParse> parse_conllu_string(const std::string& text);
std::vector<SentenceParse> read_conllu(const std::filesystem::path& path);

// Writes the ten-column form. Retained fields round-trip exactly.
void write_conllu(std::ostream& out, const std::vector<SentenceParse>& sentences);
std::string to_conllu_string(const std::vector<SentenceParse>& sentences);

// Checks indices 1..n, head range, a single root and acyclicity.
void validate_tree(const SentenceParse& sentence);

}  // namespace depsem
