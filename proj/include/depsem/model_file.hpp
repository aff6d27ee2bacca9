#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depsem/rggn.hpp"

namespace depsem {

// RGGN1 layout:
//   "RGGN1 <manifest bytes>\n"
//   manifest: UTF-8 JSON with dim, iterations, labels (id order), flags,
//             dtype and the name/shape of every tensor in payload order
//   payload:  tensors concatenated, little-endian f32 or f64, row-major
struct TensorEntry {
  std::string name;
  std::vector<std::size_t> shape;  // [rows, cols] or [dim]
};

struct ModelManifest {
  std::size_t dim = 0;
  std::size_t iterations = 0;
  std::vector<std::string> labels;
  std::size_t relation_count = 0;  // labels + unknown bucket
  bool use_fwd = true;
  bool use_rev = true;
  bool use_edge_labels = true;
  Dtype dtype = Dtype::F32;
  std::vector<TensorEntry> tensors;
  std::size_t payload_bytes = 0;
};

std::string model_bytes(const RggnModel& model);
RggnModel parse_model(const std::string& bytes);
ModelManifest parse_model_manifest(const std::string& bytes);

void write_model(const std::filesystem::path& path, const RggnModel& model);
RggnModel read_model(const std::filesystem::path& path);
// Reads only the header and manifest.
ModelManifest read_model_manifest(const std::filesystem::path& path);

}  // namespace depsem
