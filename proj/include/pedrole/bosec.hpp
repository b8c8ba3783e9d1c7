#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pedrole/matrix.hpp"

namespace pedrole {

struct KmeansParams {
  std::size_t n_clusters = 300;
  std::size_t batch_size = 4800;
  // Stop once the smoothed batch inertia has not improved for this many batches.
  std::size_t no_improvement_window = 50;
  // Centers whose accumulated count falls below this fraction of the largest
  // count are moved onto random batch points.
  double reassignment_ratio = 1e-4;
  std::size_t reassignment_interval = 10;  // batches between reassignment checks
  std::size_t max_batches = 1000;
  std::uint64_t seed = 0;
};

struct ClusterModel {
  MatrixF centroids;  // n_clusters x dim
  std::uint64_t seed = 0;
  std::size_t batches_run = 0;
  bool early_stopped = false;
  std::size_t reassigned_centers = 0;
  double final_inertia = 0.0;  // full-batch sum of squared distances

  std::size_t n_clusters() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
};

/// Mini-batch k-means with k-means++ initialization. Each batch draws
/// min(batch_size, n) rows uniformly with replacement; a center moves to the
/// running mean of every point ever assigned to it. Fully determined by
/// params.seed and independent of thread count.
ClusterModel kmeans_fit(const MatrixF& vectors, const KmeansParams& params);

/// Nearest centroid by Euclidean distance; ties go to the lowest index.
std::uint32_t assign(const ClusterModel& model, std::span<const float> vector);

std::vector<std::uint32_t> assign_all(const ClusterModel& model, const MatrixF& vectors);

/// Relative frequency of each cluster among the document's sentences.
std::vector<double> bosec_featurize(const ClusterModel& model, const MatrixF& sentence_vectors);

/// Row i = features of docs[i].
MatrixD bosec_features(const ClusterModel& model, std::span<const MatrixF* const> docs);

/// Concatenates document vector blocks into one training matrix.
MatrixF stack_rows(std::span<const MatrixF* const> blocks);

/// `<N> <dim> <seed>` header then N centroid lines (9 significant digits).
void save_cluster_model(const std::filesystem::path& file, const ClusterModel& model);
ClusterModel load_cluster_model(const std::filesystem::path& file);

std::string bosec_to_json(const std::map<std::string, std::vector<double>>& features);

}  // namespace pedrole
