#include "depsem/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include "depsem/error.hpp"

namespace depsem {

namespace {

constexpr std::size_t kMaxHeader = 64;

void put_f32_le(std::string& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool parse_count(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Parses one record from bytes[pos...]; advances pos.
Matrix parse_record(std::string_view bytes, std::size_t& pos) {
  const std::size_t start = pos;
  if (bytes.substr(pos, 5) != "EMB1 ") {
    throw FormatError("byte offset " + std::to_string(start) + ": bad magic (expected 'EMB1 ')");
  }
  const std::size_t nl = bytes.find('\n', pos);
  if (nl == std::string_view::npos || nl - pos > kMaxHeader) {
    throw FormatError("byte offset " + std::to_string(start) + ": unterminated EMB1 header");
  }
  const std::string_view header = bytes.substr(pos + 5, nl - pos - 5);
  const std::size_t sp = header.find(' ');
  std::size_t rows = 0, dim = 0;
  if (sp == std::string_view::npos || !parse_count(header.substr(0, sp), rows) ||
      !parse_count(header.substr(sp + 1), dim)) {
    throw FormatError("byte offset " + std::to_string(start) + ": malformed EMB1 header '" +
                      std::string(header) + "'");
  }
  if (rows == 0 || dim == 0) {
    throw FormatError("byte offset " + std::to_string(start) + ": EMB1 rows and dim must be >= 1");
  }
  pos = nl + 1;
  const std::size_t need = rows * dim * 4;
  const std::size_t have = bytes.size() - pos;
  if (have < need) {
    throw FormatError("byte offset " + std::to_string(pos) + ": truncated payload, header declares " +
                      std::to_string(rows) + "x" + std::to_string(dim) + " (" +
                      std::to_string(need) + " bytes) but only " + std::to_string(have) +
                      " remain");
  }
  Matrix m(rows, dim);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  auto flat = m.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const float v = get_f32_le(p + 4 * i);
    if (!std::isfinite(v)) {
      throw FormatError("byte offset " + std::to_string(pos + 4 * i) + ": non-finite value");
    }
    flat[i] = static_cast<Real>(v);
  }
  pos += need;
  return m;
}

}  // namespace

std::string emb1_bytes(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw DimensionError("EMB1 requires rows >= 1 and dim >= 1");
  std::string out = "EMB1 " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  out.reserve(out.size() + 4 * m.size());
  for (Real v : m.flat()) {
    if (!std::isfinite(v)) throw NumericalError("refusing to write non-finite embedding value");
    put_f32_le(out, static_cast<float>(v));
  }
  return out;
}

void write_emb1(std::ostream& out, const Matrix& m) {
  const std::string bytes = emb1_bytes(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Matrix read_emb1(std::istream& in, std::size_t base_offset) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("byte offset " + std::to_string(base_offset) + ": empty input");
  header.push_back('\n');
  std::size_t pos = 0;
  // Parse the header alone first to learn the payload size.
  std::size_t rows = 0, dim = 0;
  {
    std::istringstream hs(header);
    std::string magic;
    hs >> magic >> rows >> dim;
    if (magic != "EMB1") {
      throw FormatError("byte offset " + std::to_string(base_offset) + ": bad magic (expected 'EMB1 ')");
    }
  }
  // Read in bounded chunks so a corrupt header cannot force a huge allocation.
  const std::size_t need = rows * dim * 4;
  std::string payload;
  char buf[1 << 16];
  while (payload.size() < need && in) {
    const std::size_t want = std::min(sizeof buf, need - payload.size());
    in.read(buf, static_cast<std::streamsize>(want));
    payload.append(buf, static_cast<std::size_t>(in.gcount()));
  }
  const std::string bytes = header + payload;
  try {
    return parse_record(bytes, pos);
  } catch (const FormatError& e) {
    if (base_offset == 0) throw;
    throw FormatError(std::string(e.what()) + " (record at byte offset " +
                      std::to_string(base_offset) + ")");
  }
}

std::vector<Matrix> parse_embedding_records(const std::string& bytes) {
  std::vector<Matrix> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) out.push_back(parse_record(bytes, pos));
  return out;
}

Matrix read_embeddings(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  std::size_t pos = 0;
  try {
    Matrix m = parse_record(bytes, pos);
    if (pos != bytes.size()) {
      throw FormatError("byte offset " + std::to_string(pos) + ": " +
                        std::to_string(bytes.size() - pos) + " trailing bytes after EMB1 record");
    }
    return m;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<Matrix> read_embedding_records(const std::filesystem::path& path) {
  try {
    return parse_embedding_records(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_embedding_records(const std::filesystem::path& path, const std::vector<Matrix>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& m : records) write_emb1(out, m);
  if (!out) throw IoError("write failed for " + path.string());
}

void write_embeddings(const std::filesystem::path& path, const Matrix& m) {
  write_embedding_records(path, {m});
}

Matrix round_to_f32(const Matrix& m) {
  Matrix out = m;
  for (auto& v : out.flat()) v = static_cast<Real>(static_cast<float>(v));
  return out;
}

}  // namespace depsem
