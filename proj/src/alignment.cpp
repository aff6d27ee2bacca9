#include "depsem/alignment.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "depsem/error.hpp"

namespace depsem {

using nlohmann::json;

namespace {

std::string field_path(const std::string& name, std::size_t i) {
  return name + "[" + std::to_string(i) + "]";
}

SubwordAlignment from_json(const json& j) {
  if (!j.is_object()) throw FormatError("ALIGN: top level must be an object");
  for (const char* key : {"words", "subwords", "word_to_subwords"}) {
    if (!j.contains(key) || !j.at(key).is_array()) {
      throw FormatError(std::string("ALIGN: missing array field '") + key + "'");
    }
  }
  SubwordAlignment a;
  for (std::size_t i = 0; i < j["words"].size(); ++i) {
    if (!j["words"][i].is_string()) throw FormatError("ALIGN: " + field_path("words", i) + " is not a string");
    a.words.push_back(j["words"][i].get<std::string>());
  }
  for (std::size_t i = 0; i < j["subwords"].size(); ++i) {
    if (!j["subwords"][i].is_string()) throw FormatError("ALIGN: " + field_path("subwords", i) + " is not a string");
    a.subwords.push_back(j["subwords"][i].get<std::string>());
  }
  const json& groups = j["word_to_subwords"];
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].is_array()) {
      throw FormatError("ALIGN: " + field_path("word_to_subwords", i) + " is not an array");
    }
    std::vector<std::size_t> g;
    for (std::size_t k = 0; k < groups[i].size(); ++k) {
      const json& v = groups[i][k];
      if (!v.is_number_unsigned()) {
        throw FormatError("ALIGN: " + field_path("word_to_subwords", i) + "[" + std::to_string(k) +
                          "] is not a non-negative integer");
      }
      g.push_back(v.get<std::size_t>());
    }
    a.groups.push_back(std::move(g));
  }
  if (j.contains("phoneme_counts") && !j["phoneme_counts"].is_null()) {
    const json& pc = j["phoneme_counts"];
    if (!pc.is_array()) throw FormatError("ALIGN: 'phoneme_counts' must be an array");
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      if (!pc[i].is_number_unsigned()) {
        throw FormatError("ALIGN: " + field_path("phoneme_counts", i) + " is not a non-negative integer");
      }
      counts.push_back(pc[i].get<std::size_t>());
    }
    a.phoneme_counts = std::move(counts);
  }
  validate_alignment(a);
  return a;
}

json to_json(const SubwordAlignment& a) {
  json j;
  j["words"] = a.words;
  j["subwords"] = a.subwords;
  j["word_to_subwords"] = a.groups;
  if (a.phoneme_counts) j["phoneme_counts"] = *a.phoneme_counts;
  return j;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

void validate_alignment(const SubwordAlignment& a) {
  const std::size_t m = a.subwords.size();
  if (a.words.size() != a.groups.size()) {
    throw FormatError("ALIGN: 'words' has " + std::to_string(a.words.size()) +
                      " entries but 'word_to_subwords' has " + std::to_string(a.groups.size()));
  }
  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    const auto& g = a.groups[i];
    if (g.empty()) throw FormatError("ALIGN: " + field_path("word_to_subwords", i) + " is empty");
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::string where = field_path("word_to_subwords", i) + "[" + std::to_string(k) + "]";
      if (g[k] >= m) {
        throw FormatError("ALIGN: " + where + ": index " + std::to_string(g[k]) +
                          " out of range [0, " + std::to_string(m) + ")");
      }
      if (k > 0 && g[k] <= g[k - 1]) throw FormatError("ALIGN: " + where + ": indices not strictly ascending");
      if (used[g[k]]) {
        throw FormatError("ALIGN: " + where + ": subword " + std::to_string(g[k]) +
                          " assigned to more than one word");
      }
      used[g[k]] = true;
    }
  }
  if (a.phoneme_counts && a.phoneme_counts->size() != a.groups.size()) {
    throw FormatError("ALIGN: 'phoneme_counts' has " + std::to_string(a.phoneme_counts->size()) +
                      " entries for " + std::to_string(a.groups.size()) + " words");
  }
}

SubwordAlignment parse_alignment(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("ALIGN: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

std::string alignment_to_json(const SubwordAlignment& a) { return to_json(a).dump(); }

SubwordAlignment read_alignment(const std::filesystem::path& path) {
  try {
    return parse_alignment(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<SubwordAlignment> read_alignments(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::vector<SubwordAlignment> out;
  const json whole = json::parse(text, nullptr, /*allow_exceptions=*/false);
  try {
    if (!whole.is_discarded()) {
      if (whole.is_array()) {
        for (const auto& item : whole) out.push_back(from_json(item));
      } else {
        out.push_back(from_json(whole));
      }
      return out;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.push_back(parse_alignment(line));
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

void write_alignments(const std::filesystem::path& path, const std::vector<SubwordAlignment>& a) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& item : a) out << alignment_to_json(item) << '\n';
}

Matrix pool_subwords(const Matrix& emb, const SubwordAlignment& align) {
  validate_alignment(align);
  if (emb.rows() != align.subword_count()) {
    throw AlignmentError("embedding matrix has " + std::to_string(emb.rows()) +
                         " rows but the alignment declares " + std::to_string(align.subword_count()) +
                         " subwords");
  }
  const std::size_t d = emb.cols();
  Matrix out(align.word_count(), d);
  for (std::size_t i = 0; i < align.word_count(); ++i) {
    const auto& g = align.groups[i];
    const auto first = emb.row(g.front());
    auto dst = out.row(i);
    // Mean as first row plus mean deviation; constant groups pool exactly.
    for (std::size_t k = 0; k < d; ++k) {
      Real dev = 0.0;
      for (std::size_t j = 1; j < g.size(); ++j) dev += emb(g[j], k) - first[k];
      dst[k] = first[k] + dev / static_cast<Real>(g.size());
    }
  }
  return out;
}

}  // namespace depsem
