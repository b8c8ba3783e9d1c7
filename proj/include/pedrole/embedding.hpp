#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pedrole/corpus.hpp"
#include "pedrole/matrix.hpp"

namespace pedrole {

enum class EncoderKind { ExternalFile, BuiltinHash };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::BuiltinHash;
  std::size_t dim = 256;
  std::uint64_t seed = 0;
};

/// doc_id -> one row per body sentence, in sentence order.
using CorpusVectors = std::map<std::string, MatrixF>;

struct EncodedSentence {
  std::vector<float> values;
  bool zero = false;  // no tokens; vector left all-zero
};

/// Signed feature hashing of token unigrams and bigrams into spec.dim
/// buckets, L2-normalized. Bucket and sign come from
/// splitmix64(fnv1a64(feature) ^ seed): low 32 bits mod dim, top bit = sign.
EncodedSentence builtin_encode(std::string_view sentence, const EncoderSpec& spec);

/// Encodes every document's sentences. Output is independent of thread count.
CorpusVectors encode_documents(std::span<const Document> docs, const EncoderSpec& spec);

/// `<n_sentences> <dim>` header then one row per line, values written with 9
/// significant digits.
MatrixF read_vector_file(const std::filesystem::path& file);
void write_vector_file(const std::filesystem::path& file, const MatrixF& vectors);

/// Loads `<vec_dir>/<doc_id>.vec` for each document, checking that the row
/// count matches the document's sentence count and the dimension is uniform.
CorpusVectors load_vectors(const std::filesystem::path& vec_dir, std::span<const Document> docs);

void save_vectors(const std::filesystem::path& vec_dir, const CorpusVectors& vectors);

}  // namespace pedrole
