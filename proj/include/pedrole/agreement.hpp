#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pedrole/corpus.hpp"
#include "pedrole/matrix.hpp"

namespace pedrole {

/// Items x categories; cell (i, c) = number of raters assigning item i to c.
using RatingTable = DenseMatrix<std::uint32_t>;

struct KappaResult {
  double value = 0.0;
  // Expected chance agreement was 1 (every rating in the table identical);
  // value is reported as 1.0.
  bool degenerate = false;
};

/// Fleiss' kappa. Every row must sum to n_raters (>= 2).
KappaResult fleiss_kappa(const RatingTable& table, std::size_t n_raters);

/// Binary (document, role) items: one row per document and role with
/// columns {marked, not marked}. Records are grouped per document.
RatingTable binary_role_items(std::span<const std::pair<std::string, std::vector<AnnotationRecord>>> docs,
                              std::size_t n_raters);

struct SubsetKappa {
  double kappa = 0.0;
  bool degenerate = false;
  std::size_t n_documents = 0;
};

struct AgreementReport {
  std::map<std::string, SubsetKappa> per_subset;
  double mean_kappa = 0.0;  // unweighted mean over subsets
  std::vector<std::string> warnings;
};

/// Per-subset Fleiss kappa over binary role items, averaged across subsets.
/// The supplementary "internal" subset is excluded.
AgreementReport average_subset_kappa(std::span<const AnnotationRecord> records, std::size_t n_raters = 3);

struct AnnotatorConfusion {
  std::array<std::array<std::size_t, kNumRoles>, kNumRoles> counts{};  // [majority][third annotator]
  std::size_t total_pairs = 0;
  std::size_t docs_used = 0;
};

/// Majority role against the dissenting annotator's roles, over documents
/// with exactly three records and a single majority role. The dissenter is
/// the annotator whose set has the largest symmetric difference from the
/// majority singleton; ties go to the smallest annotator_id.
AnnotatorConfusion third_annotator_confusion(std::span<const AnnotationRecord> records);

std::string agreement_to_json(const AgreementReport& report, const AnnotatorConfusion& confusion);
std::string confusion_to_text(const AnnotatorConfusion& confusion);

}  // namespace pedrole
