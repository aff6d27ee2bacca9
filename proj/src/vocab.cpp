#include "depsem/vocab.hpp"

#include <fstream>

#include "depsem/error.hpp"

namespace depsem {

RelationVocab::RelationVocab(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ConfigError("empty relation label at position " + std::to_string(i));
    if (labels_[i] == kUnkLabel) throw ConfigError("relation label '<unk>' is reserved");
    if (!ids_.emplace(labels_[i], i).second) {
      throw ConfigError("duplicate relation label '" + labels_[i] + "'");
    }
  }
}

RelationVocab RelationVocab::universal_dependencies() {
  return RelationVocab({
      // core universal relations
      "acl", "advcl", "advmod", "amod", "appos", "aux", "case", "cc", "ccomp", "clf",
      "compound", "conj", "cop", "csubj", "dep", "det", "discourse", "dislocated", "expl",
      "fixed", "flat", "goeswith", "iobj", "list", "mark", "nmod", "nsubj", "nummod", "obj",
      "obl", "orphan", "parataxis", "punct", "reparandum", "root", "vocative", "xcomp",
      // subtypes
      "acl:relcl", "advmod:emph", "aux:pass", "cc:preconj", "compound:lvc", "compound:prt",
      "csubj:pass", "det:poss", "det:predet", "expl:pv", "flat:foreign", "flat:name",
      "nmod:npmod", "nmod:poss", "nmod:tmod", "nsubj:pass", "obl:npmod", "obl:tmod",
  });
}

RelationVocab RelationVocab::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file " + path.string());
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    labels.push_back(line);
  }
  if (labels.empty()) throw ConfigError("label file " + path.string() + " is empty");
  return RelationVocab(std::move(labels));
}

void RelationVocab::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& l : labels_) out << l << '\n';
}

RelationId RelationVocab::lookup(const std::string& label) const {
  auto it = ids_.find(label);
  return it == ids_.end() ? unk_id() : it->second;
}

const std::string& RelationVocab::label(RelationId id) const {
  static const std::string unk = kUnkLabel;
  if (id == unk_id()) return unk;
  if (id > unk_id()) throw ConfigError("relation id " + std::to_string(id) + " out of range");
  return labels_[id];
}

}  // namespace depsem
