#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pedrole/corpus.hpp"
#include "pedrole/matrix.hpp"
#include "pedrole/role.hpp"

namespace pedrole {

// ---------------------------------------------------------------------------
// CEN: per-role mean sentence vector

enum class CenDistance { Euclidean, Cosine };

struct CenModel {
  std::vector<Role> roles;  // canonical order, roles with training sentences only
  MatrixD means;            // row i belongs to roles[i]
  MatrixF centroids;        // means rounded to float for the assignment kernel
  CenDistance distance = CenDistance::Euclidean;
  std::vector<std::string> warnings;
};

/// Centroid of a role = sum of every sentence vector of every training
/// document bearing that role, divided by the number of vectors added.
CenModel cen_fit(std::span<const MatrixF* const> doc_vectors, std::span<const RoleSet> labels,
                 CenDistance distance = CenDistance::Euclidean);

/// Each sentence votes for its nearest centroid (ties: canonical role order);
/// roles with strictly more than a third of the votes are returned.
RoleSet cen_predict(const CenModel& model, const MatrixF& sentence_vectors);

std::string cen_to_json(const CenModel& model);
CenModel cen_from_json(std::string_view json);

// ---------------------------------------------------------------------------
// KNN over document feature vectors

struct KnnConfig {
  std::size_t k = 3;
  /// Votes a role needs among the k neighbours; majority of k.
  std::size_t vote_threshold() const { return k / 2 + 1; }
};

struct KnnIndex {
  std::vector<std::string> doc_ids;
  MatrixD features;  // row i belongs to doc_ids[i]
  std::vector<RoleSet> labels;
};

/// Indices into `index` of the k nearest rows by L1 distance, closest first;
/// distance ties go to the smaller doc_id.
std::vector<std::size_t> knn_neighbors(const KnnConfig& config, const KnnIndex& index, std::span<const double> query);

/// Roles held by at least vote_threshold() of the k nearest documents. An
/// empty result means "no prediction".
RoleSet knn_predict(const KnnConfig& config, const KnnIndex& index, std::span<const double> query);

// ---------------------------------------------------------------------------
// Random forest, one binary forest per role

struct ForestParams {
  std::size_t n_trees = 10;
  std::size_t max_depth = 75;
  std::size_t min_samples_split = 5;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 = floor(sqrt(n_features))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double positive_fraction = 0.0;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// Leaf positive fraction strictly above one half.
  bool predict(std::span<const double> x) const;
  double positive_fraction(std::span<const double> x) const;
  std::size_t depth() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

/// Gini-split binary tree grown on `rows` of X (duplicates allowed, as
/// produced by bootstrapping). Candidate features are visited in a random
/// order until max_features non-constant ones have been scored; the best
/// split wins, first found on ties.
DecisionTree fit_tree(const MatrixD& x, std::span<const std::uint8_t> y, std::span<const std::size_t> rows,
                      const ForestParams& params, std::uint64_t seed);

struct BinaryForest {
  bool trained = false;  // false when the role had no positive examples
  std::vector<DecisionTree> trees;

  /// Fraction of trees voting positive.
  double vote_fraction(std::span<const double> x) const;
};

struct ForestModel {
  std::array<BinaryForest, kNumRoles> per_role;
  ForestParams params;
  std::size_t n_features = 0;
  std::vector<std::string> warnings;
};

ForestModel rf_fit(const MatrixD& x, std::span<const RoleSet> labels, const ForestParams& params);

/// Roles whose forest has more than half of its trees voting positive.
RoleSet rf_predict(const ForestModel& model, std::span<const double> x);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(std::string_view json);

// ---------------------------------------------------------------------------
// Keyphrase baseline

struct KeyphraseRules {
  std::vector<std::pair<Role, std::vector<std::string>>> phrases;

  /// "software manual", "manual", "technical manual" for SoftwareManual and
  /// "tutorial" for Tutorial.
  static KeyphraseRules defaults();
};

/// JSON object mapping role names to phrase arrays. Phrases are lowercased;
/// empty phrases are rejected.
KeyphraseRules keyphrase_rules_from_json(std::string_view json);
KeyphraseRules load_keyphrase_rules(const std::filesystem::path& file);

/// Number of leading body sentences scanned after the title.
inline constexpr std::size_t kKeyphraseBodySentences = 4;

/// A role is predicted when any of its phrases occurs, at word boundaries and
/// ignoring case, in the title or the first four body sentences.
RoleSet keyphrase_predict(const KeyphraseRules& rules, const Document& doc);

}  // namespace pedrole
