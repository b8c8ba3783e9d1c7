#include "pedrole/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>

#include "pedrole/error.hpp"
#include "pedrole/random.hpp"
#include "pedrole/textproc.hpp"

namespace pedrole {

namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

void add_feature(std::string_view feature, std::uint64_t seed, std::vector<double>& acc) {
  const std::uint64_t h = splitmix64(fnv1a64(feature) ^ seed);
  const std::size_t bucket = (h & 0xFFFFFFFFull) % acc.size();
  acc[bucket] += (h >> 63) != 0 ? -1.0 : 1.0;
}

std::string_view next_field(std::string_view& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
  std::size_t j = i;
  while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
  std::string_view field = line.substr(i, j - i);
  line.remove_prefix(j);
  return field;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

EncodedSentence builtin_encode(std::string_view sentence, const EncoderSpec& spec) {
  if (spec.kind != EncoderKind::BuiltinHash) throw ConfigError("builtin_encode called with a non-builtin encoder");
  if (spec.dim == 0) throw ConfigError("encoder dim must be >= 1");

  const auto tokens = tokenize(sentence);
  std::vector<double> acc(spec.dim, 0.0);
  std::string feature;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    feature = "u:" + tokens[i];
    add_feature(feature, spec.seed, acc);
    if (i + 1 < tokens.size()) {
      feature = "b:" + tokens[i] + ' ' + tokens[i + 1];
      add_feature(feature, spec.seed, acc);
    }
  }

  EncodedSentence out;
  out.values.assign(spec.dim, 0.0f);
  double sq = 0.0;
  for (double v : acc) sq += v * v;
  if (sq == 0.0) {
    out.zero = true;
    return out;
  }
  const double norm = std::sqrt(sq);
  for (std::size_t j = 0; j < spec.dim; ++j) out.values[j] = static_cast<float>(acc[j] / norm);
  return out;
}

CorpusVectors encode_documents(std::span<const Document> docs, const EncoderSpec& spec) {
  std::vector<MatrixF> encoded(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t d = 0; d < n; ++d) {
    MatrixF m(docs[d].sentences.size(), spec.dim);
    for (std::size_t s = 0; s < docs[d].sentences.size(); ++s) {
      const auto v = builtin_encode(docs[d].sentences[s], spec);
      std::copy(v.values.begin(), v.values.end(), m.row(s).begin());
    }
    encoded[d] = std::move(m);
  }
  CorpusVectors out;
  for (std::size_t d = 0; d < docs.size(); ++d) out.emplace(docs[d].doc_id, std::move(encoded[d]));
  return out;
}

MatrixF read_vector_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read vector file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty vector file " + file.string());
  std::string_view header = line;
  std::size_t rows = 0;
  std::size_t dim = 0;
  if (!parse_number(next_field(header), rows) || !parse_number(next_field(header), dim) ||
      !next_field(header).empty() || dim == 0) {
    throw InputError("bad vector file header in " + file.string() + ": '" + line + "'");
  }

  MatrixF m(rows, dim);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw InputError(file.string() + ": expected " + std::to_string(rows) + " vectors, found " + std::to_string(r));
    }
    std::string_view rest = line;
    auto row = m.row(r);
    for (std::size_t j = 0; j < dim; ++j) {
      float v = 0.0f;
      const auto field = next_field(rest);
      if (!parse_number(field, v) || !std::isfinite(v)) {
        throw InputError(file.string() + ":" + std::to_string(r + 2) + ": bad value '" + std::string(field) + "'");
      }
      row[j] = v;
    }
    if (!next_field(rest).empty()) {
      throw InputError(file.string() + ":" + std::to_string(r + 2) + ": more than " + std::to_string(dim) + " values");
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw InputError(file.string() + ": more vectors than the header's " + std::to_string(rows));
    }
  }
  return m;
}

void write_vector_file(const fs::path& file, const MatrixF& vectors) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write vector file " + file.string());
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  char buf[32];
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    const auto row = vectors.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[j]));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError("error writing vector file " + file.string());
}

CorpusVectors load_vectors(const fs::path& vec_dir, std::span<const Document> docs) {
  if (!fs::is_directory(vec_dir)) throw InputError("vector directory not found: " + vec_dir.string());

  std::vector<MatrixF> loaded(docs.size());
  std::vector<std::optional<std::string>> errors(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t d = 0; d < n; ++d) {
    try {
      loaded[d] = read_vector_file(vec_dir / (docs[d].doc_id + ".vec"));
    } catch (const std::exception& e) {
      errors[d] = e.what();
    }
  }

  CorpusVectors out;
  std::size_t dim = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (errors[d]) throw InputError(*errors[d]);
    const auto& doc = docs[d];
    if (loaded[d].rows() != doc.sentences.size()) {
      throw InputError("sentence count mismatch for doc_id " + doc.doc_id + ": expected " +
                       std::to_string(doc.sentences.size()) + ", got " + std::to_string(loaded[d].rows()));
    }
    if (d == 0) {
      dim = loaded[d].cols();
    } else if (loaded[d].cols() != dim) {
      throw InputError("dimension mismatch: doc_id " + doc.doc_id + " has dim " + std::to_string(loaded[d].cols()) +
                       ", expected " + std::to_string(dim));
    }
    out.emplace(doc.doc_id, std::move(loaded[d]));
  }
  return out;
}

void save_vectors(const fs::path& vec_dir, const CorpusVectors& vectors) {
  fs::create_directories(vec_dir);
  for (const auto& [doc_id, m] : vectors) write_vector_file(vec_dir / (doc_id + ".vec"), m);
}

}  // namespace pedrole
