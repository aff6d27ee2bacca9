#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "depsem/tensor.hpp"

namespace depsem {

// EMB1 record: ASCII header "EMB1 <rows> <dim>\n" followed by rows*dim
// little-endian IEEE-754 binary32 values, row-major. Files may hold several
// records back to back (one per sentence).

void write_emb1(std::ostream& out, const Matrix& m);
std::string emb1_bytes(const Matrix& m);

// Reads one record starting at the current position. `base_offset` is the
// byte offset of the stream position, used in error messages.
Matrix read_emb1(std::istream& in, std::size_t base_offset = 0);

// Exactly one record; trailing bytes are an error.
Matrix read_embeddings(const std::filesystem::path& path);
std::vector<Matrix> read_embedding_records(const std::filesystem::path& path);
std::vector<Matrix> parse_embedding_records(const std::string& bytes);

void write_embeddings(const std::filesystem::path& path, const Matrix& m);
void write_embedding_records(const std::filesystem::path& path, const std::vector<Matrix>& records);

// Rounds every entry through binary32, the precision EMB1 stores.
Matrix round_to_f32(const Matrix& m);

}  // namespace depsem
