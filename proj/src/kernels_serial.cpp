#include "pedrole/kernels.hpp"

namespace pedrole::kernels::serial {

void assign_nearest(const MatrixF& points, const MatrixF& centroids, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist) {
  const bool want_dist = !sq_dist.empty();
  for (std::size_t i = 0; i < points.rows(); ++i) {
    labels[i] = nearest(points.row(i), centroids, want_dist ? &sq_dist[i] : nullptr);
  }
}

void assign_nearest(const MatrixF& points, std::span<const std::size_t> rows, const MatrixF& centroids,
                    std::span<std::uint32_t> labels, std::span<double> sq_dist) {
  const bool want_dist = !sq_dist.empty();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    labels[i] = nearest(points.row(rows[i]), centroids, want_dist ? &sq_dist[i] : nullptr);
  }
}

void update_min_sq_distance(const MatrixF& points, std::span<const float> center, std::span<double> min_sq) {
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double d = squared_euclidean(points.row(i), center);
    if (d < min_sq[i]) min_sq[i] = d;
  }
}

void l1_distances(std::span<const double> query, const MatrixD& points, std::span<double> out) {
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out[i] = manhattan(query, points.row(i));
  }
}

}  // namespace pedrole::kernels::serial
