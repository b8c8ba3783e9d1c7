#include "pedrole/textproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

#include "pedrole/error.hpp"

namespace pedrole {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }
bool is_upper_or_digit(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || u >= 0x80;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Words that end in '.' without ending a sentence. Compared against the
// lowercased tail of the sentence buffer, so "e.g" covers "e.g." and "et al"
// covers "et al.".
constexpr std::array<std::string_view, 22> kAbbreviations = {
    "dr", "mr",  "mrs", "ms",  "prof", "st",    "jr",   "sr",  "vs",  "cf",  "e.g", "i.e",
    "et al", "fig", "figs", "eq", "eqs", "sec", "no", "approx", "resp", "ca",
};

bool ends_with_abbreviation(std::string_view buffer) {
  for (std::string_view abbr : kAbbreviations) {
    if (buffer.size() < abbr.size()) continue;
    const std::size_t start = buffer.size() - abbr.size();
    bool match = true;
    for (std::size_t i = 0; i < abbr.size(); ++i) {
      if (ascii_lower(buffer[start + i]) != abbr[i]) {
        match = false;
        break;
      }
    }
    if (match && (start == 0 || !is_word_char(buffer[start - 1]))) return true;
  }
  return false;
}

void flush(std::string& buffer, std::vector<std::string>& out) {
  while (!buffer.empty() && buffer.back() == ' ') buffer.pop_back();
  if (!buffer.empty()) out.push_back(std::move(buffer));
  buffer.clear();
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ascii_lower(c));
  }
  return out;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string buffer;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = text[i];
    if (is_space(c)) {
      int newlines = 0;
      while (i < n && is_space(text[i])) {
        if (text[i] == '\n') ++newlines;
        ++i;
      }
      if (newlines >= 2) {
        flush(buffer, out);
      } else if (!buffer.empty()) {
        buffer.push_back(' ');
      }
      continue;
    }
    if (!is_terminator(c)) {
      buffer.push_back(c);
      ++i;
      continue;
    }

    // Terminator run plus trailing closers.
    std::size_t j = i;
    while (j < n && is_terminator(text[j])) ++j;
    const bool single_period = (j - i == 1) && c == '.';
    const bool guarded = single_period && ends_with_abbreviation(buffer);
    buffer.append(text.substr(i, j - i));
    while (j < n && is_closer(text[j])) buffer.push_back(text[j++]);

    std::size_t k = j;
    while (k < n && is_space(text[k])) ++k;
    std::size_t probe = k;
    while (probe < n && is_opener(text[probe])) ++probe;
    const bool boundary = k == n || (k > j && probe < n && is_upper_or_digit(text[probe]));
    if (boundary && !guarded) flush(buffer, out);
    i = j;
  }
  flush(buffer, out);
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : sentence) {
    if (is_word_char(c)) {
      current.push_back(ascii_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
  if (phrase.empty()) return false;
  const std::string hay = normalize_for_match(text);
  const std::string needle = normalize_for_match(phrase);
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == hay.size() || !is_word_char(hay[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

double SparseVector::norm() const {
  double acc = 0.0;
  for (const auto& [idx, w] : entries) acc += w * w;
  return std::sqrt(acc);
}

std::int64_t TfidfModel::index_of(std::string_view term) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == vocabulary.end() || *it != term) return -1;
  return it - vocabulary.begin();
}

namespace {

void compute_idf(TfidfModel& model) {
  model.idf.resize(model.vocabulary.size());
  const double n = static_cast<double>(model.n_docs);
  for (std::size_t t = 0; t < model.vocabulary.size(); ++t) {
    model.idf[t] = std::log((1.0 + n) / (1.0 + model.doc_frequency[t])) + 1.0;
  }
}

}  // namespace

TfidfModel tfidf_fit(std::span<const TokenizedDoc> docs, double min_df, double max_df) {
  if (docs.empty()) throw InputError("tfidf_fit: no documents");
  std::map<std::string, std::uint32_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (std::string_view term : seen) ++df[std::string(term)];
  }

  TfidfModel model;
  model.min_df = min_df;
  model.max_df = max_df;
  model.n_docs = docs.size();
  constexpr double kEps = 1e-12;
  const double n = static_cast<double>(docs.size());
  for (const auto& [term, count] : df) {
    const double frac = count / n;
    if (frac + kEps >= min_df && frac - kEps <= max_df) {
      model.vocabulary.push_back(term);
      model.doc_frequency.push_back(count);
    }
  }
  if (model.vocabulary.empty()) throw InputError("no terms within df bounds");
  compute_idf(model);
  return model;
}

SparseVector tfidf_transform(const TfidfModel& model, const TokenizedDoc& doc) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : doc) {
    const auto idx = model.index_of(token);
    if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  SparseVector v;
  v.entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [idx, tf] : counts) {
    const double w = tf * model.idf[idx];
    v.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (auto& e : v.entries) e.second /= norm;
  }
  return v;
}

MatrixD tfidf_dense(const TfidfModel& model, std::span<const TokenizedDoc> docs) {
  MatrixD m(docs.size(), model.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& [idx, w] : tfidf_transform(model, docs[d]).entries) m(d, idx) = w;
  }
  return m;
}

std::string tfidf_to_json(const TfidfModel& model) {
  nlohmann::ordered_json j;
  j["n_docs"] = model.n_docs;
  j["min_df"] = model.min_df;
  j["max_df"] = model.max_df;
  j["vocabulary"] = model.vocabulary;
  j["doc_frequency"] = model.doc_frequency;
  return j.dump(1);
}

TfidfModel tfidf_from_json(std::string_view json) {
  TfidfModel model;
  try {
    const auto j = nlohmann::json::parse(json);
    model.n_docs = j.at("n_docs").get<std::size_t>();
    model.min_df = j.at("min_df").get<double>();
    model.max_df = j.at("max_df").get<double>();
    model.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    model.doc_frequency = j.at("doc_frequency").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("tfidf model: ") + e.what());
  }
  if (model.vocabulary.size() != model.doc_frequency.size()) {
    throw InputError("tfidf model: vocabulary and doc_frequency lengths differ");
  }
  if (!std::is_sorted(model.vocabulary.begin(), model.vocabulary.end())) {
    throw InputError("tfidf model: vocabulary not sorted");
  }
  compute_idf(model);
  return model;
}

}  // namespace pedrole
