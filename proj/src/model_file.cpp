#include "depsem/model_file.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "depsem/error.hpp"

namespace depsem {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "RGGN1 ";

std::size_t dtype_size(Dtype d) { return d == Dtype::F32 ? 4 : 8; }

template <typename U>
void put_le(std::string& out, U bits) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char* p) {
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return bits;
}

json manifest_json(const RggnModel& model) {
  json j;
  j["format"] = "RGGN1";
  j["dim"] = model.dim();
  j["iterations"] = model.iterations();
  j["labels"] = model.vocab().labels();
  j["unk_label"] = RelationVocab::kUnkLabel;
  j["relation_count"] = model.vocab().size();
  j["flags"] = {{"use_fwd", model.config().use_fwd},
                {"use_rev", model.config().use_rev},
                {"use_edge_labels", model.config().use_edge_labels}};
  j["dtype"] = to_string(model.store().dtype());
  json tensors = json::array();
  std::size_t payload = 0;
  for (const auto& p : model.store()) {
    json shape = p.rank == 1 ? json::array({p.value.rows()})
                             : json::array({p.value.rows(), p.value.cols()});
    tensors.push_back({{"name", p.name}, {"shape", shape}});
    payload += p.value.size() * dtype_size(model.store().dtype());
  }
  j["tensors"] = tensors;
  j["payload_bytes"] = payload;
  return j;
}

ModelManifest manifest_from_json(const json& j) {
  ModelManifest m;
  try {
    if (j.at("format").get<std::string>() != "RGGN1") throw FormatError("manifest: format is not RGGN1");
    m.dim = j.at("dim").get<std::size_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.relation_count = j.at("relation_count").get<std::size_t>();
    const json& flags = j.at("flags");
    m.use_fwd = flags.at("use_fwd").get<bool>();
    m.use_rev = flags.at("use_rev").get<bool>();
    m.use_edge_labels = flags.at("use_edge_labels").get<bool>();
    m.dtype = dtype_from_string(j.at("dtype").get<std::string>());
    for (const auto& t : j.at("tensors")) {
      TensorEntry e;
      e.name = t.at("name").get<std::string>();
      e.shape = t.at("shape").get<std::vector<std::size_t>>();
      if (e.shape.empty() || e.shape.size() > 2) throw FormatError("manifest: tensor " + e.name + " has bad rank");
      m.tensors.push_back(std::move(e));
    }
    m.payload_bytes = j.at("payload_bytes").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  if (m.relation_count != m.labels.size() + 1) {
    throw FormatError("manifest: relation_count " + std::to_string(m.relation_count) + " != " +
                      std::to_string(m.labels.size()) + " labels + 1");
  }
  std::size_t total = 0;
  std::size_t fwd_edges = 0, rev_edges = 0;
  for (const auto& t : m.tensors) {
    std::size_t count = 1;
    for (auto s : t.shape) count *= s;
    total += count * dtype_size(m.dtype);
    if (t.name.rfind("fwd.edge.", 0) == 0) ++fwd_edges;
    if (t.name.rfind("rev.edge.", 0) == 0) ++rev_edges;
  }
  if (total != m.payload_bytes) {
    throw FormatError("manifest: tensor shapes account for " + std::to_string(total) +
                      " payload bytes but payload_bytes is " + std::to_string(m.payload_bytes));
  }
  if (fwd_edges != m.relation_count || rev_edges != m.relation_count) {
    throw FormatError("manifest: edge matrix count (" + std::to_string(fwd_edges) + " fwd, " +
                      std::to_string(rev_edges) + " rev) does not match relation_count " +
                      std::to_string(m.relation_count));
  }
  return m;
}

// Returns the manifest and the byte offset where the payload starts.
std::pair<ModelManifest, std::size_t> split_header(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("byte offset 0: bad magic (expected 'RGGN1 ')");
  }
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos || nl > 32) throw FormatError("byte offset 0: unterminated RGGN1 header");
  std::size_t len = 0;
  const std::string_view num = bytes.substr(kMagic.size(), nl - kMagic.size());
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), len);
  if (ec != std::errc() || ptr != num.data() + num.size()) {
    throw FormatError("byte offset " + std::to_string(kMagic.size()) + ": bad manifest length");
  }
  const std::size_t start = nl + 1;
  if (bytes.size() - start < len) {
    throw FormatError("byte offset " + std::to_string(start) + ": truncated manifest");
  }
  json j;
  try {
    j = json::parse(bytes.substr(start, len));
  } catch (const json::parse_error& e) {
    throw FormatError("byte offset " + std::to_string(start) + ": manifest is not valid JSON: " + e.what());
  }
  return {manifest_from_json(j), start + len};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::string model_bytes(const RggnModel& model) {
  const std::string manifest = manifest_json(model).dump();
  std::string out = std::string(kMagic) + std::to_string(manifest.size()) + "\n" + manifest;
  const Dtype dtype = model.store().dtype();
  for (const auto& p : model.store()) {
    for (Real v : p.value.flat()) {
      if (!std::isfinite(v)) throw NumericalError("refusing to write non-finite value in " + p.name);
      if (dtype == Dtype::F32) {
        put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      } else {
        put_le(out, std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  return out;
}

ModelManifest parse_model_manifest(const std::string& bytes) { return split_header(bytes).first; }

RggnModel parse_model(const std::string& bytes) {
  auto [m, pos] = split_header(bytes);
  if (bytes.size() - pos != m.payload_bytes) {
    throw FormatError("byte offset " + std::to_string(pos) + ": payload has " +
                      std::to_string(bytes.size() - pos) + " bytes, manifest declares " +
                      std::to_string(m.payload_bytes));
  }
  ParameterStore store(m.dtype);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t width = dtype_size(m.dtype);
  for (const auto& t : m.tensors) {
    const std::size_t rows = t.shape[0];
    const std::size_t cols = t.shape.size() == 2 ? t.shape[1] : 1;
    std::vector<Real> data(rows * cols);
    for (auto& v : data) {
      v = m.dtype == Dtype::F32 ? static_cast<Real>(std::bit_cast<float>(get_le<std::uint32_t>(p + pos)))
                                : std::bit_cast<double>(get_le<std::uint64_t>(p + pos));
      if (!std::isfinite(v)) {
        throw FormatError("byte offset " + std::to_string(pos) + ": non-finite value in " + t.name);
      }
      pos += width;
    }
    if (t.shape.size() == 1) {
      store.add_vector(t.name, std::move(data));
    } else {
      store.add_matrix(t.name, Matrix(rows, cols, std::move(data)));
    }
  }
  RggnConfig cfg;
  cfg.dim = m.dim;
  cfg.iterations = m.iterations;
  cfg.use_fwd = m.use_fwd;
  cfg.use_rev = m.use_rev;
  cfg.use_edge_labels = m.use_edge_labels;
  try {
    return RggnModel::from_store(cfg, RelationVocab(m.labels), std::move(store));
  } catch (const Error& e) {
    throw FormatError(std::string("model tensors do not match manifest: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const RggnModel& model) {
  const std::string bytes = model_bytes(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

RggnModel read_model(const std::filesystem::path& path) {
  try {
    return parse_model(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ModelManifest read_model_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::size_t len = 0;
  if (header.rfind(kMagic, 0) == 0) {
    std::from_chars(header.data() + kMagic.size(), header.data() + header.size(), len);
  }
  std::string manifest(len, '\0');
  in.read(manifest.data(), static_cast<std::streamsize>(len));
  try {
    return parse_model_manifest(header + "\n" + manifest);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace depsem
