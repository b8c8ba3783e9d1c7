#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pedrole/matrix.hpp"

namespace pedrole {

/// Rule-based splitter. A sentence ends after a run of '.', '!' or '?'
/// (plus any closing quotes or brackets) when the next non-space character
/// is an uppercase letter or digit, unless the word before a single '.' is a
/// guarded abbreviation. Blank lines always end a sentence. Whitespace inside
/// a sentence is collapsed to single spaces.
std::vector<std::string> split_sentences(std::string_view text);

/// Lowercased maximal runs of alphanumeric characters. Bytes >= 0x80 count as
/// word characters so UTF-8 letters stay inside their token.
std::vector<std::string> tokenize(std::string_view sentence);

/// Whether `phrase` (lowercase) occurs in `text` bounded by non-word
/// characters on both sides. Matching is case-insensitive on ASCII.
bool contains_phrase(std::string_view text, std::string_view phrase);

struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index

  double norm() const;
  bool empty() const { return entries.empty(); }
};

struct TfidfModel {
  std::vector<std::string> vocabulary;      // sorted
  std::vector<std::uint32_t> doc_frequency;  // parallel to vocabulary
  std::vector<double> idf;                   // ln((1+n)/(1+df)) + 1
  double min_df = 0.10;
  double max_df = 0.90;
  std::size_t n_docs = 0;

  std::size_t size() const { return vocabulary.size(); }
  /// Index of term in the vocabulary, or -1.
  std::int64_t index_of(std::string_view term) const;
};

/// A document as a flat token list.
using TokenizedDoc = std::vector<std::string>;

/// Keeps terms whose document fraction lies in [min_df, max_df], both ends
/// inclusive. Throws InputError when no term survives.
TfidfModel tfidf_fit(std::span<const TokenizedDoc> docs, double min_df = 0.10, double max_df = 0.90);

/// Raw count times idf, then L2-normalized; out-of-vocabulary terms ignored.
SparseVector tfidf_transform(const TfidfModel& model, const TokenizedDoc& doc);

/// Dense rows (one per doc) for the forest.
MatrixD tfidf_dense(const TfidfModel& model, std::span<const TokenizedDoc> docs);

std::string tfidf_to_json(const TfidfModel& model);
TfidfModel tfidf_from_json(std::string_view json);

}  // namespace pedrole
