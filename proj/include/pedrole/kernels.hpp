#pragma once

// Hot loops of the pipeline: nearest-centroid assignment (k-means, BoSEC,
// CEN) and L1 distance scans (KNN). Each kernel exists twice with the same
// signature. `serial` is the plain reference kept for tests and benchmarks;
// `parallel` splits the outer loop across OpenMP threads. Both evaluate every
// output element with the same inline routine, so results are bitwise equal
// regardless of thread count.

#include <cstddef>
#include <cstdint>
#include <span>

#include "pedrole/matrix.hpp"

namespace pedrole::kernels {

inline double squared_euclidean(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    acc += d * d;
  }
  return acc;
}

inline double manhattan(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d < 0.0 ? -d : d;
  }
  return acc;
}

/// Index of the closest centroid; ties go to the lowest index.
inline std::uint32_t nearest(std::span<const float> point, const MatrixF& centroids, double* best_sq) {
  std::uint32_t best = 0;
  double best_d = squared_euclidean(point, centroids.row(0));
  for (std::size_t c = 1; c < centroids.rows(); ++c) {
    const double d = squared_euclidean(point, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  if (best_sq != nullptr) *best_sq = best_d;
  return best;
}

namespace serial {
/// labels[i] = nearest centroid of points.row(i). sq_dist may be empty.
void assign_nearest(const MatrixF& points, const MatrixF& centroids,
                    std::span<std::uint32_t> labels, std::span<double> sq_dist);

/// Same, restricted to the listed rows; outputs are indexed like `rows`.
void assign_nearest(const MatrixF& points, std::span<const std::size_t> rows,
                    const MatrixF& centroids, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist);

/// min_sq[i] = min(min_sq[i], |points.row(i) - center|^2).
void update_min_sq_distance(const MatrixF& points, std::span<const float> center,
                            std::span<double> min_sq);

/// out[i] = L1 distance from query to points.row(i).
void l1_distances(std::span<const double> query, const MatrixD& points, std::span<double> out);
}  // namespace serial

// Same contracts as `serial`; outer loop split across OpenMP threads.
namespace parallel {
void assign_nearest(const MatrixF& points, const MatrixF& centroids,
                    std::span<std::uint32_t> labels, std::span<double> sq_dist);
void assign_nearest(const MatrixF& points, std::span<const std::size_t> rows,
                    const MatrixF& centroids, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist);
void update_min_sq_distance(const MatrixF& points, std::span<const float> center,
                            std::span<double> min_sq);
void l1_distances(std::span<const double> query, const MatrixD& points, std::span<double> out);
}  // namespace parallel

/// Caps OpenMP worker threads; 0 leaves the runtime default.
void set_thread_limit(int threads);

}  // namespace pedrole::kernels
