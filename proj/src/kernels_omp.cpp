#include <omp.h>

#include <cstdint>

#include "pedrole/kernels.hpp"

namespace pedrole::kernels {

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

namespace parallel {

void assign_nearest(const MatrixF& points, const MatrixF& centroids, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist) {
  const bool want_dist = !sq_dist.empty();
  const auto n = static_cast<std::int64_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    labels[i] = nearest(points.row(i), centroids, want_dist ? &sq_dist[i] : nullptr);
  }
}

void assign_nearest(const MatrixF& points, std::span<const std::size_t> rows, const MatrixF& centroids,
                    std::span<std::uint32_t> labels, std::span<double> sq_dist) {
  const bool want_dist = !sq_dist.empty();
  const auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    labels[i] = nearest(points.row(rows[i]), centroids, want_dist ? &sq_dist[i] : nullptr);
  }
}

void update_min_sq_distance(const MatrixF& points, std::span<const float> center, std::span<double> min_sq) {
  const auto n = static_cast<std::int64_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = squared_euclidean(points.row(i), center);
    if (d < min_sq[i]) min_sq[i] = d;
  }
}

void l1_distances(std::span<const double> query, const MatrixD& points, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = manhattan(query, points.row(i));
  }
}

}  // namespace parallel
}  // namespace pedrole::kernels
