#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "pedrole/classifiers.hpp"
#include "pedrole/error.hpp"
#include "pedrole/random.hpp"

namespace pedrole {

namespace {

double gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct SplitChoice {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const MatrixD& x, std::span<const std::uint8_t> y, const ForestParams& params, std::uint64_t seed)
      : x_(x), y_(y), params_(params), rng_(seed), features_(x.cols()) {
    for (std::size_t f = 0; f < features_.size(); ++f) features_[f] = static_cast<std::uint32_t>(f);
    max_features_ = params.max_features != 0
                        ? params.max_features
                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
    max_features_ = std::min(max_features_, x.cols());
  }

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  std::uint32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t n = rows.size();
    std::size_t positives = 0;
    for (std::size_t r : rows) positives += y_[r];

    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].positive_fraction = n == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(n);

    if (depth >= params_.max_depth || n < params_.min_samples_split || positives == 0 || positives == n) return id;
    const auto split = best_split(rows, positives);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::uint32_t l = grow(std::move(left), depth + 1);
    const std::uint32_t r = grow(std::move(right), depth + 1);
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, std::size_t positives) {
    SplitChoice best;
    best.score = std::numeric_limits<double>::infinity();
    const std::size_t n = rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    std::vector<std::pair<double, std::uint8_t>> column(n);

    std::size_t scored = 0;
    for (std::size_t i = 0; i < features_.size() && scored < max_features_; ++i) {
      std::swap(features_[i], features_[i + rng_.uniform_index(features_.size() - i)]);
      const std::uint32_t f = features_[i];
      for (std::size_t k = 0; k < n; ++k) column[k] = {x_(rows[k], f), y_[rows[k]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++scored;

      std::size_t left_pos = 0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_pos += column[k].second;
        if (column[k].first == column[k + 1].first) continue;
        const std::size_t nl = k + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double score = (static_cast<double>(nl) * gini(static_cast<double>(left_pos), static_cast<double>(nl)) +
                              static_cast<double>(nr) *
                                  gini(static_cast<double>(positives - left_pos), static_cast<double>(nr))) /
                             static_cast<double>(n);
        if (score < best.score) {
          double threshold = 0.5 * (column[k].first + column[k + 1].first);
          if (threshold >= column[k + 1].first) threshold = column[k].first;
          best = {static_cast<std::int32_t>(f), threshold, score};
        }
      }
    }
    return best;
  }

  const MatrixD& x_;
  std::span<const std::uint8_t> y_;
  const ForestParams& params_;
  Rng rng_;
  std::vector<std::uint32_t> features_;
  std::size_t max_features_ = 1;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double DecisionTree::positive_fraction(std::span<const double> x) const {
  if (nodes_.empty()) return 0.0;
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[i].positive_fraction;
}

bool DecisionTree::predict(std::span<const double> x) const { return positive_fraction(x) > 0.5; }

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[i].feature >= 0) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

DecisionTree fit_tree(const MatrixD& x, std::span<const std::uint8_t> y, std::span<const std::size_t> rows,
                      const ForestParams& params, std::uint64_t seed) {
  if (x.cols() == 0) throw InputError("fit_tree: no features");
  TreeBuilder builder(x, y, params, seed);
  return DecisionTree(builder.build(std::vector<std::size_t>(rows.begin(), rows.end())));
}

double BinaryForest::vote_fraction(std::span<const double> x) const {
  if (!trained || trees.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto& t : trees) votes += t.predict(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

ForestModel rf_fit(const MatrixD& x, std::span<const RoleSet> labels, const ForestParams& params) {
  if (x.rows() != labels.size()) throw InputError("rf_fit: feature rows and labels differ in length");
  if (x.rows() == 0) throw InputError("rf_fit: no training documents");
  if (params.n_trees == 0) throw ConfigError("rf_fit: n_trees must be >= 1");

  ForestModel model;
  model.params = params;
  model.n_features = x.cols();
  const std::size_t n = x.rows();

  std::array<std::vector<std::uint8_t>, kNumRoles> targets;
  for (Role r : kAllRoles) {
    auto& y = targets[role_index(r)];
    y.resize(n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = labels[i].contains(r) ? 1 : 0;
      positives += y[i];
    }
    auto& forest = model.per_role[role_index(r)];
    forest.trained = positives > 0;
    if (forest.trained) {
      forest.trees.resize(params.n_trees);
    } else {
      model.warnings.push_back("role " + std::string(role_name(r)) + " absent from training data; never predicted");
    }
  }

  const auto tasks = static_cast<std::int64_t>(kNumRoles * params.n_trees);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t task = 0; task < tasks; ++task) {
    const std::size_t ri = static_cast<std::size_t>(task) / params.n_trees;
    const std::size_t t = static_cast<std::size_t>(task) % params.n_trees;
    auto& forest = model.per_role[ri];
    if (!forest.trained) continue;
    const std::uint64_t tree_seed = derive_seed(params.seed, ri * 1024 + t);
    Rng rng(tree_seed);
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = params.bootstrap ? rng.uniform_index(n) : i;
    forest.trees[t] = fit_tree(x, targets[ri], rows, params, splitmix64(tree_seed));
  }
  return model;
}

RoleSet rf_predict(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) throw InputError("rf_predict: feature dimension mismatch");
  RoleSet out;
  for (Role r : kAllRoles) {
    if (model.per_role[role_index(r)].vote_fraction(x) > 0.5) out.insert(r);
  }
  return out;
}

std::string forest_to_json(const ForestModel& model) {
  nlohmann::ordered_json j;
  const auto& p = model.params;
  j["params"] = {{"n_trees", p.n_trees},     {"max_depth", p.max_depth},       {"min_samples_split", p.min_samples_split},
                 {"min_samples_leaf", p.min_samples_leaf}, {"max_features", p.max_features}, {"bootstrap", p.bootstrap},
                 {"seed", p.seed}};
  j["n_features"] = model.n_features;
  nlohmann::ordered_json roles = nlohmann::ordered_json::object();
  for (Role r : kAllRoles) {
    const auto& forest = model.per_role[role_index(r)];
    nlohmann::ordered_json jf;
    jf["trained"] = forest.trained;
    jf["trees"] = nlohmann::ordered_json::array();
    for (const auto& tree : forest.trees) {
      nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
      for (const auto& nd : tree.nodes()) {
        nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.positive_fraction});
      }
      jf["trees"].push_back(nodes);
    }
    roles[std::string(role_name(r))] = jf;
  }
  j["roles"] = roles;
  return j.dump() + "\n";
}

ForestModel forest_from_json(std::string_view json) {
  ForestModel model;
  try {
    const auto j = nlohmann::json::parse(json);
    const auto& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<std::size_t>();
    model.params.max_depth = p.at("max_depth").get<std::size_t>();
    model.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
    model.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    model.params.max_features = p.at("max_features").get<std::size_t>();
    model.params.bootstrap = p.at("bootstrap").get<bool>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& [name, jf] : j.at("roles").items()) {
      auto& forest = model.per_role[role_index(role_from_string(name))];
      forest.trained = jf.at("trained").get<bool>();
      for (const auto& jt : jf.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const auto& jn : jt) {
          nodes.push_back({jn.at(0).get<std::int32_t>(), jn.at(1).get<double>(), jn.at(2).get<std::uint32_t>(),
                           jn.at(3).get<std::uint32_t>(), jn.at(4).get<double>()});
        }
        for (const auto& nd : nodes) {
          if (nd.feature >= 0 && (nd.left >= nodes.size() || nd.right >= nodes.size() ||
                                  static_cast<std::size_t>(nd.feature) >= model.n_features)) {
            throw InputError("forest model: node references out of range");
          }
        }
        forest.trees.emplace_back(std::move(nodes));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("forest model: ") + e.what());
  }
  return model;
}

}  // namespace pedrole
