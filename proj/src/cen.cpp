#include <cmath>

#include "json.hpp"

#include "pedrole/classifiers.hpp"
#include "pedrole/error.hpp"
#include "pedrole/kernels.hpp"

namespace pedrole {

namespace {

void normalize_rows(MatrixF& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    double sq = 0.0;
    for (float v : row) sq += static_cast<double>(v) * v;
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (float& v : row) v = static_cast<float>(v / norm);
  }
}

}  // namespace

CenModel cen_fit(std::span<const MatrixF* const> doc_vectors, std::span<const RoleSet> labels, CenDistance distance) {
  if (doc_vectors.size() != labels.size()) throw InputError("cen_fit: vectors and labels differ in length");
  std::size_t dim = 0;
  for (const MatrixF* m : doc_vectors) {
    if (m->rows() == 0) continue;
    if (dim == 0) dim = m->cols();
    if (m->cols() != dim) throw InputError("cen_fit: dimension mismatch across documents");
  }

  std::array<std::vector<double>, kNumRoles> sums;
  std::array<std::size_t, kNumRoles> counts{};
  for (auto& s : sums) s.assign(dim, 0.0);
  for (std::size_t d = 0; d < doc_vectors.size(); ++d) {
    const MatrixF& m = *doc_vectors[d];
    for (Role r : labels[d].roles()) {
      auto& sum = sums[role_index(r)];
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
      }
      counts[role_index(r)] += m.rows();
    }
  }

  CenModel model;
  model.distance = distance;
  for (Role r : kAllRoles) {
    const std::size_t ri = role_index(r);
    if (counts[ri] == 0) {
      model.warnings.push_back("role " + std::string(role_name(r)) + " has no training sentences; omitted from CEN");
      continue;
    }
    std::vector<double> mean(dim);
    for (std::size_t j = 0; j < dim; ++j) mean[j] = sums[ri][j] / static_cast<double>(counts[ri]);
    model.roles.push_back(r);
    model.means.append_row(mean);
    model.centroids.append_row(std::vector<float>(mean.begin(), mean.end()));
  }
  return model;
}

RoleSet cen_predict(const CenModel& model, const MatrixF& sentence_vectors) {
  if (model.roles.empty() || sentence_vectors.rows() == 0) return {};
  if (sentence_vectors.cols() != model.centroids.cols()) throw InputError("cen_predict: dimension mismatch");

  std::vector<std::uint32_t> nearest(sentence_vectors.rows());
  if (model.distance == CenDistance::Cosine) {
    MatrixF sentences = sentence_vectors;
    MatrixF centroids = model.centroids;
    normalize_rows(sentences);
    normalize_rows(centroids);
    kernels::parallel::assign_nearest(sentences, centroids, nearest, {});
  } else {
    kernels::parallel::assign_nearest(sentence_vectors, model.centroids, nearest, {});
  }

  std::vector<std::size_t> votes(model.roles.size(), 0);
  for (std::uint32_t c : nearest) ++votes[c];
  RoleSet out;
  const std::size_t n = sentence_vectors.rows();
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (3 * votes[i] > n) out.insert(model.roles[i]);
  }
  return out;
}

std::string cen_to_json(const CenModel& model) {
  nlohmann::ordered_json j;
  j["distance"] = model.distance == CenDistance::Cosine ? "cosine" : "euclidean";
  j["roles"] = nlohmann::ordered_json::array();
  j["centroids"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model.roles.size(); ++i) {
    j["roles"].push_back(std::string(role_name(model.roles[i])));
    const auto row = model.means.row(i);
    j["centroids"].push_back(std::vector<double>(row.begin(), row.end()));
  }
  return j.dump() + "\n";
}

CenModel cen_from_json(std::string_view json) {
  CenModel model;
  try {
    const auto j = nlohmann::json::parse(json);
    model.distance = j.at("distance").get<std::string>() == "cosine" ? CenDistance::Cosine : CenDistance::Euclidean;
    const auto& roles = j.at("roles");
    const auto& centroids = j.at("centroids");
    if (roles.size() != centroids.size()) throw InputError("CEN model: roles and centroids differ in length");
    for (std::size_t i = 0; i < roles.size(); ++i) {
      model.roles.push_back(role_from_string(roles[i].get<std::string>()));
      const auto mean = centroids[i].get<std::vector<double>>();
      if (i > 0 && mean.size() != model.means.cols()) throw InputError("CEN model: ragged centroid rows");
      model.means.append_row(mean);
      model.centroids.append_row(std::vector<float>(mean.begin(), mean.end()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("CEN model: ") + e.what());
  }
  return model;
}

}  // namespace pedrole
