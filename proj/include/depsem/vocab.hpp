#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace depsem {

using RelationId = std::size_t;

// Dense label ids 0..L-1 for the named labels, with the unknown-label bucket
// at id L.
class RelationVocab {
 public:
  static constexpr const char* kUnkLabel = "<unk>";

  RelationVocab() = default;
  explicit RelationVocab(std::vector<std::string> labels);

  // Universal Dependencies relations plus common subtypes: 55 labels.
  static RelationVocab universal_dependencies();
  // One label per line; blank lines are skipped.
  static RelationVocab read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

  RelationId lookup(const std::string& label) const;
  const std::string& label(RelationId id) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  RelationId unk_id() const noexcept { return labels_.size(); }
  // Named labels plus the unknown bucket.
  std::size_t size() const noexcept { return labels_.size() + 1; }

  friend bool operator==(const RelationVocab& a, const RelationVocab& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, RelationId> ids_;
};

}  // namespace depsem
