#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pedrole/role.hpp"

namespace pedrole {

/// Subset id carried by the single-annotator supplementary records.
inline constexpr std::string_view kInternalSubset = "internal";

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<std::string> sentences;  // body sentences, title excluded
  std::string source_tag;
};

struct AnnotationRecord {
  std::string doc_id;
  std::string annotator_id;
  std::string subset_id;
  RoleSet roles;
};

/// Documents (sorted by doc_id) and the annotation records that refer to them.
struct RawCorpus {
  std::vector<Document> documents;
  std::vector<AnnotationRecord> records;

  const Document* find(std::string_view doc_id) const;
};

struct LabeledDocument {
  Document doc;
  RoleSet roles;  // resolved ground truth, never empty
  std::string subset_id;
  std::size_t n_annotators = 0;
};

struct LabeledCorpus {
  std::vector<LabeledDocument> documents;  // sorted by doc_id
  std::size_t filtered = 0;     // annotated but no role reached majority
  std::size_t unannotated = 0;  // loaded documents with no records
};

/// Document text: first line is the title, the rest is split into sentences.
/// Throws InputError when the body yields no sentences.
Document parse_document(std::string doc_id, std::string_view text);

AnnotationRecord parse_annotation_line(std::string_view line);

/// One JSON object per non-blank line. Rejects duplicate (doc_id, annotator_id).
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& file);

/// Every `<doc_dir>/*.txt` file, sorted by doc_id (the file stem).
std::vector<Document> load_documents(const std::filesystem::path& doc_dir);

/// Reads `<doc_dir>/<doc_id>.txt` for every .txt file and the annotations
/// file. Every annotation must name a loaded document.
RawCorpus load_corpus(const std::filesystem::path& doc_dir, const std::filesystem::path& annotations_file);

/// Minimum number of annotators that must mark a role: ceil((n+1)/2).
constexpr std::size_t majority_threshold(std::size_t n_annotators) { return n_annotators / 2 + 1; }

/// Roles marked by at least majority_threshold(n_annotators) records;
/// nullopt when no role qualifies (the document is filtered).
std::optional<RoleSet> resolve_majority(std::span<const AnnotationRecord> records, std::size_t n_annotators);

/// n_annotators taken as the number of distinct annotator ids.
std::optional<RoleSet> resolve_majority(std::span<const AnnotationRecord> records);

/// Groups records by document (sorted by doc_id, then annotator_id).
std::vector<std::pair<std::string, std::vector<AnnotationRecord>>> group_by_document(
    std::span<const AnnotationRecord> records);

LabeledCorpus label_corpus(const RawCorpus& raw);

struct StatsReport {
  std::size_t n_documents = 0;
  std::size_t total_role_annotations = 0;
  std::size_t filtered_documents = 0;
  std::array<std::size_t, kNumRoles> role_counts{};
  std::array<std::size_t, kNumRoles> roles_per_doc_histogram{};  // index k = k+1 roles
  std::vector<std::pair<RoleSet, std::size_t>> combination_counts;  // multi-role docs, most frequent first
  // Same tallies restricted to documents resolved from more than one annotator.
  std::size_t multi_annotated_documents = 0;
  std::size_t multi_annotated_role_annotations = 0;

  /// Share of documents with at most `k` roles.
  double share_with_at_most(std::size_t k) const;
};

StatsReport corpus_stats(const LabeledCorpus& corpus);

std::string stats_to_json(const StatsReport& stats);
std::string stats_to_text(const StatsReport& stats);

}  // namespace pedrole
