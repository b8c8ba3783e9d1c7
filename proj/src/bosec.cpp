#include "pedrole/bosec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "pedrole/error.hpp"
#include "pedrole/kernels.hpp"
#include "pedrole/random.hpp"

namespace pedrole {

namespace fs = std::filesystem;

namespace {

MatrixF gather_rows(const MatrixF& src, std::span<const std::size_t> rows) {
  MatrixF out(rows.size(), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(src.row(rows[i]).begin(), src.cols(), out.row(i).begin());
  return out;
}

// k-means++ seeding over `sample`: first center uniform, then each next
// center drawn with probability proportional to its squared distance from
// the nearest chosen center.
MatrixF kmeanspp(const MatrixF& sample, std::size_t k, Rng& rng) {
  const std::size_t n = sample.rows();
  MatrixF centers(k, sample.cols());
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

  std::size_t pick = rng.uniform_index(n);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double d : min_sq) total += d;
      if (total <= 0.0) {
        pick = rng.uniform_index(n);
      } else {
        const double target = rng.uniform01() * total;
        double cum = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          cum += min_sq[i];
          if (cum > target && min_sq[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    std::copy_n(sample.row(pick).begin(), sample.cols(), centers.row(c).begin());
    kernels::parallel::update_min_sq_distance(sample, centers.row(c), min_sq);
  }
  return centers;
}

}  // namespace

ClusterModel kmeans_fit(const MatrixF& vectors, const KmeansParams& params) {
  const std::size_t n = vectors.rows();
  const std::size_t k = params.n_clusters;
  const std::size_t dim = vectors.cols();
  if (k == 0) throw ConfigError("n_clusters must be >= 1");
  if (params.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (params.no_improvement_window == 0) throw ConfigError("no_improvement_window must be >= 1");
  if (params.max_batches == 0) throw ConfigError("max_batches must be >= 1");
  if (params.reassignment_interval == 0) throw ConfigError("reassignment_interval must be >= 1");
  if (n < k) {
    throw InputError("fewer vectors than clusters (" + std::to_string(n) + " < " + std::to_string(k) + ")");
  }
  for (float v : vectors.data()) {
    if (!std::isfinite(v)) throw InputError("non-finite value in clustering input");
  }

  Rng rng(params.seed);

  // Seed from a subsample so initialization stays affordable on large corpora.
  const std::size_t init_size = std::min(n, std::max(3 * params.batch_size, 3 * k));
  MatrixF init_centers;
  if (init_size == n) {
    init_centers = kmeanspp(vectors, k, rng);
  } else {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < init_size; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
    idx.resize(init_size);
    init_centers = kmeanspp(gather_rows(vectors, idx), k, rng);
  }

  ClusterModel model;
  model.seed = params.seed;
  model.centroids = std::move(init_centers);
  std::vector<double> centers(model.centroids.data().begin(), model.centroids.data().end());
  std::vector<double> counts(k, 0.0);

  const std::size_t b = std::min(params.batch_size, n);
  const double alpha = std::min(1.0, 2.0 * static_cast<double>(b) / static_cast<double>(n + 1));
  std::vector<std::size_t> batch(b);
  std::vector<std::uint32_t> labels(b);
  std::vector<double> sq(b);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> batch_counts(k);

  double ewa = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t no_improvement = 0;

  for (std::size_t step = 0; step < params.max_batches; ++step) {
    for (auto& i : batch) i = rng.uniform_index(n);
    kernels::parallel::assign_nearest(vectors, batch, model.centroids, labels, sq);

    double inertia = 0.0;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(batch_counts.begin(), batch_counts.end(), 0);
    for (std::size_t i = 0; i < b; ++i) {
      inertia += sq[i];
      const auto row = vectors.row(batch[i]);
      double* dst = &sums[labels[i] * dim];
      for (std::size_t j = 0; j < dim; ++j) dst[j] += row[j];
      ++batch_counts[labels[i]];
    }
    inertia /= static_cast<double>(b);

    for (std::size_t c = 0; c < k; ++c) {
      if (batch_counts[c] == 0) continue;
      const double old_count = counts[c];
      const double new_count = old_count + static_cast<double>(batch_counts[c]);
      for (std::size_t j = 0; j < dim; ++j) {
        double& center = centers[c * dim + j];
        center = (center * old_count + sums[c * dim + j]) / new_count;
        model.centroids(c, j) = static_cast<float>(center);
      }
      counts[c] = new_count;
    }

    if ((step + 1) % params.reassignment_interval == 0) {
      const double max_count = *std::max_element(counts.begin(), counts.end());
      std::vector<std::size_t> low;
      for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] < params.reassignment_ratio * max_count) low.push_back(c);
      }
      if (!low.empty() && low.size() < k) {
        std::stable_sort(low.begin(), low.end(), [&](std::size_t a, std::size_t c) { return counts[a] < counts[c]; });
        low.resize(std::min(low.size(), std::max<std::size_t>(1, b / 2)));
        double floor_count = std::numeric_limits<double>::infinity();
        std::vector<bool> moving(k, false);
        for (std::size_t c : low) moving[c] = true;
        for (std::size_t c = 0; c < k; ++c) {
          if (!moving[c]) floor_count = std::min(floor_count, counts[c]);
        }
        for (std::size_t c : low) {
          const auto row = vectors.row(batch[rng.uniform_index(b)]);
          for (std::size_t j = 0; j < dim; ++j) {
            centers[c * dim + j] = row[j];
            model.centroids(c, j) = row[j];
          }
          counts[c] = floor_count;
        }
        model.reassigned_centers += low.size();
      }
    }

    model.batches_run = step + 1;
    ewa = step == 0 ? inertia : ewa * (1.0 - alpha) + inertia * alpha;
    if (ewa < best) {
      best = ewa;
      no_improvement = 0;
    } else if (++no_improvement >= params.no_improvement_window) {
      model.early_stopped = true;
      break;
    }
  }

  std::vector<std::uint32_t> all_labels(n);
  std::vector<double> all_sq(n);
  kernels::parallel::assign_nearest(vectors, model.centroids, all_labels, all_sq);
  for (double d : all_sq) model.final_inertia += d;
  return model;
}

std::uint32_t assign(const ClusterModel& model, std::span<const float> vector) {
  if (vector.size() != model.dim()) {
    throw InputError("dimension mismatch: vector has dim " + std::to_string(vector.size()) + ", model has " +
                     std::to_string(model.dim()));
  }
  return kernels::nearest(vector, model.centroids, nullptr);
}

std::vector<std::uint32_t> assign_all(const ClusterModel& model, const MatrixF& vectors) {
  if (vectors.rows() > 0 && vectors.cols() != model.dim()) {
    throw InputError("dimension mismatch: vectors have dim " + std::to_string(vectors.cols()) + ", model has " +
                     std::to_string(model.dim()));
  }
  std::vector<std::uint32_t> labels(vectors.rows());
  kernels::parallel::assign_nearest(vectors, model.centroids, labels, {});
  return labels;
}

std::vector<double> bosec_featurize(const ClusterModel& model, const MatrixF& sentence_vectors) {
  if (sentence_vectors.rows() == 0) throw InputError("bosec_featurize: document has no sentences");
  std::vector<double> freq(model.n_clusters(), 0.0);
  for (std::uint32_t c : assign_all(model, sentence_vectors)) freq[c] += 1.0;
  const double total = static_cast<double>(sentence_vectors.rows());
  for (double& f : freq) f /= total;
  return freq;
}

MatrixD bosec_features(const ClusterModel& model, std::span<const MatrixF* const> docs) {
  MatrixD out(docs.size(), model.n_clusters());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto f = bosec_featurize(model, *docs[d]);
    std::copy(f.begin(), f.end(), out.row(d).begin());
  }
  return out;
}

MatrixF stack_rows(std::span<const MatrixF* const> blocks) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const MatrixF* m : blocks) {
    if (m->rows() == 0) continue;
    if (cols == 0) cols = m->cols();
    if (m->cols() != cols) throw InputError("dimension mismatch while stacking sentence vectors");
    rows += m->rows();
  }
  MatrixF out(rows, cols);
  std::size_t r = 0;
  for (const MatrixF* m : blocks) {
    for (std::size_t i = 0; i < m->rows(); ++i, ++r) std::copy_n(m->row(i).begin(), cols, out.row(r).begin());
  }
  return out;
}

void save_cluster_model(const fs::path& file, const ClusterModel& model) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write cluster model " + file.string());
  out << model.n_clusters() << ' ' << model.dim() << ' ' << model.seed << '\n';
  char buf[32];
  for (std::size_t c = 0; c < model.n_clusters(); ++c) {
    const auto row = model.centroids.row(c);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[j]));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError("error writing cluster model " + file.string());
}

ClusterModel load_cluster_model(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read cluster model " + file.string());
  std::size_t n = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  if (!(in >> n >> dim >> seed) || n == 0 || dim == 0) throw InputError("bad cluster model header in " + file.string());
  ClusterModel model;
  model.seed = seed;
  model.centroids = MatrixF(n, dim);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < dim; ++j) {
      double v = 0.0;
      if (!(in >> v) || !std::isfinite(v)) {
        throw InputError("bad centroid value in " + file.string() + " (cluster " + std::to_string(c) + ")");
      }
      model.centroids(c, j) = static_cast<float>(v);
    }
  }
  return model;
}

std::string bosec_to_json(const std::map<std::string, std::vector<double>>& features) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [doc_id, f] : features) j[doc_id] = f;
  return j.dump() + "\n";
}

}  // namespace pedrole
