#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pedrole/bosec.hpp"
#include "pedrole/classifiers.hpp"
#include "pedrole/corpus.hpp"
#include "pedrole/embedding.hpp"
#include "pedrole/role.hpp"

namespace pedrole {

using PredictionMap = std::map<std::string, RoleSet>;

// ---------------------------------------------------------------------------
// Folds

struct FoldPlan {
  std::size_t n_folds = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;  // doc_ids, sorted within each fold
};

/// Stratified by each document's first role in canonical order: within each
/// stratum the doc_ids are shuffled and dealt round-robin, the dealing
/// position carrying over between strata so fold sizes differ by at most one.
FoldPlan make_folds(std::span<const std::string> doc_ids, std::span<const RoleSet> labels, std::size_t n_folds,
                    std::uint64_t seed);
FoldPlan make_folds(const LabeledCorpus& corpus, std::size_t n_folds, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scoring

struct RoleCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;  // tp + fn
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct FoldScore {
  std::array<RoleCounts, kNumRoles> per_role{};
};

/// Per-role TP/FP/FN and derived metrics; zero denominators give 0. The key
/// sets of both maps must be identical.
FoldScore score(const PredictionMap& predictions, const PredictionMap& truth);

struct RoleMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double support = 0.0;
};

struct EvalReport {
  std::string method;
  std::array<RoleMetrics, kNumRoles> per_role{};  // arithmetic means over folds
  RoleMetrics weighted;                           // support-weighted average of per_role; support = total
  std::vector<FoldScore> folds;
  std::map<std::string, std::uint64_t> seeds;
};

EvalReport aggregate(std::span<const FoldScore> folds, std::string method);

/// Single-truth-role documents only; column kNumRoles is "No prediction".
struct PredictionConfusion {
  std::array<std::array<double, kNumRoles + 1>, kNumRoles> counts{};
  std::size_t n_folds = 1;
};

/// Counts over all predicted documents, divided by plan.n_folds.
PredictionConfusion prediction_confusion(const PredictionMap& predictions, const PredictionMap& truth,
                                         const FoldPlan& plan);

std::string report_to_json(const EvalReport& report, const PredictionConfusion& confusion);
std::string report_to_text(const EvalReport& report);
std::string prediction_confusion_to_text(const PredictionConfusion& confusion);

// ---------------------------------------------------------------------------
// Role / cluster affinity

struct ClusterAffinity {
  std::uint32_t cluster = 0;
  double frequency = 0.0;  // summed relative frequency over documents bearing the role
  std::vector<std::string> examples;
};

struct RoleAffinity {
  Role role = Role::Survey;
  std::vector<ClusterAffinity> clusters;
};

struct AffinityParams {
  std::size_t top_m = 2;
  std::size_t examples_per_cluster = 3;
  std::size_t filter_sample_size = 100;
  double min_alpha_ratio = 0.5;
  std::uint64_t seed = 0;
};

/// Share of a sentence's non-whitespace characters that are letters.
double alphabetic_ratio(std::string_view sentence);

/// For each role, clusters ranked by summed BoSEC frequency over the role's
/// documents (ties: lower cluster id), skipping clusters whose sampled member
/// sentences average below min_alpha_ratio letters. Example sentences are
/// the members nearest to the centroid.
std::vector<RoleAffinity> role_cluster_affinity(std::span<const LabeledDocument> docs, const CorpusVectors& vectors,
                                                const ClusterModel& model, const AffinityParams& params);

std::string affinity_to_json(std::span<const RoleAffinity> affinity);

// ---------------------------------------------------------------------------
// Cross-validation

enum class Method { RandomForest, Centroid, Knn, Keyphrase };

std::string_view method_name(Method m);
bool method_needs_vectors(Method m);

struct CvConfig {
  std::size_t n_folds = 5;
  std::uint64_t seed = 0;
  KmeansParams kmeans;  // seed overridden per fold
  KnnConfig knn;
  ForestParams forest;  // seed overridden per fold
  CenDistance cen_distance = CenDistance::Euclidean;
  KeyphraseRules keyphrases = KeyphraseRules::defaults();
  double min_df = 0.10;
  double max_df = 0.90;
};

struct CvResult {
  EvalReport report;
  PredictionConfusion confusion;
  PredictionMap predictions;
  FoldPlan plan;
  std::vector<std::string> warnings;
};

/// Runs one method over the fold plan. Every learned component (TF-IDF
/// vocabulary, clusters, centroids, forests) is fit on the training folds
/// only. `vectors` is required for the centroid and KNN methods.
CvResult cross_validate(Method method, const LabeledCorpus& corpus, const CorpusVectors* vectors,
                        const CvConfig& config);

}  // namespace pedrole
