#include <algorithm>
#include <numeric>

#include "pedrole/classifiers.hpp"
#include "pedrole/error.hpp"
#include "pedrole/kernels.hpp"

namespace pedrole {

std::vector<std::size_t> knn_neighbors(const KnnConfig& config, const KnnIndex& index, std::span<const double> query) {
  if (config.k == 0) throw ConfigError("knn: k must be >= 1");
  const std::size_t n = index.features.rows();
  if (n < config.k) {
    throw InputError("knn: " + std::to_string(n) + " training documents, need at least k=" + std::to_string(config.k));
  }
  if (query.size() != index.features.cols()) throw InputError("knn: query dimension mismatch");

  std::vector<double> dist(n);
  kernels::parallel::l1_distances(query, index.features, dist);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return index.doc_ids[a] < index.doc_ids[b];
                    });
  order.resize(config.k);
  return order;
}

RoleSet knn_predict(const KnnConfig& config, const KnnIndex& index, std::span<const double> query) {
  std::array<std::size_t, kNumRoles> votes{};
  for (std::size_t i : knn_neighbors(config, index, query)) {
    for (Role r : index.labels[i].roles()) ++votes[role_index(r)];
  }
  RoleSet out;
  for (Role r : kAllRoles) {
    if (votes[role_index(r)] >= config.vote_threshold()) out.insert(r);
  }
  return out;
}

}  // namespace pedrole
