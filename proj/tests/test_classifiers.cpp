#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pedrole/classifiers.hpp"
#include "pedrole/error.hpp"
#include "pedrole/random.hpp"
#include "pedrole/textproc.hpp"
#include "support.hpp"

using namespace pedrole;

namespace {

MatrixF rows_f(const std::vector<std::vector<float>>& rows) {
  MatrixF m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

CenModel cen_model(const std::vector<Role>& roles, const std::vector<std::vector<float>>& centroids) {
  CenModel m;
  m.roles = roles;
  for (const auto& c : centroids) {
    m.means.append_row(std::vector<double>(c.begin(), c.end()));
    m.centroids.append_row(c);
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// CEN

TEST_CASE("cen_fit: centroid is the mean of contributing sentence vectors") {
  const MatrixF d1 = rows_f({{1, 2}, {3, 4}});
  const MatrixF d2 = rows_f({{10, 0}});
  const std::vector<const MatrixF*> blocks{&d1, &d2};
  const std::vector<RoleSet> labels{{Role::Survey}, {Role::Resource, Role::EmpiricalResults}};
  const auto m = cen_fit(blocks, labels);
  REQUIRE(m.roles == std::vector<Role>{Role::Survey, Role::Resource, Role::EmpiricalResults});
  CHECK(m.means(0, 0) == 2.0);
  CHECK(m.means(0, 1) == 3.0);
  CHECK(m.means(1, 0) == 10.0);
  CHECK(m.means(2, 0) == 10.0);
  CHECK(m.warnings.size() == 4);
}

TEST_CASE("cen_fit matches a brute-force summation oracle within 1e-9") {
  Rng rng(41);
  std::vector<MatrixF> docs;
  std::vector<RoleSet> labels;
  for (int d = 0; d < 60; ++d) {
    MatrixF m(1 + rng.uniform_index(8), 10);
    for (float& v : m.data()) v = static_cast<float>(rng.normal());
    docs.push_back(std::move(m));
    labels.push_back(pedrole::testing::random_roleset(rng, false));
  }
  std::vector<const MatrixF*> blocks;
  for (const auto& m : docs) blocks.push_back(&m);
  const auto model = cen_fit(blocks, labels);
  for (std::size_t i = 0; i < model.roles.size(); ++i) {
    std::vector<double> sum(10, 0.0);
    double count = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      if (!labels[d].contains(model.roles[i])) continue;
      for (std::size_t s = 0; s < docs[d].rows(); ++s) {
        for (std::size_t j = 0; j < 10; ++j) sum[j] += docs[d](s, j);
        count += 1;
      }
    }
    for (std::size_t j = 0; j < 10; ++j) CHECK(std::fabs(model.means(i, j) - sum[j] / count) <= 1e-9);
  }
}

TEST_CASE("cen_predict uses a strict one-third threshold") {
  const auto m = cen_model({Role::Survey, Role::Tutorial, Role::Resource}, {{0, 0}, {10, 0}, {0, 10}});
  CHECK(cen_predict(m, rows_f({{0, 0}, {0, 1}, {10, 1}})) == RoleSet{Role::Survey});
  CHECK(cen_predict(m, rows_f({{0, 0}, {10, 1}})) == RoleSet{Role::Survey, Role::Tutorial});
  CHECK(cen_predict(m, rows_f({{0, 0}, {10, 1}, {0, 9}})).empty());
}

TEST_CASE("cen_predict: ties go to the earlier role and cosine option normalizes") {
  const auto m = cen_model({Role::Tutorial, Role::Other}, {{1, 0}, {-1, 0}});
  CHECK(cen_predict(m, rows_f({{0, 5}})) == RoleSet{Role::Tutorial});
  auto cos = cen_model({Role::Survey, Role::Other}, {{1, 0}, {0, 100}});
  cos.distance = CenDistance::Cosine;
  // Euclidean would pick Survey; by angle the vector is closer to Other.
  CHECK(cen_predict(cos, rows_f({{0.5f, 1.0f}})) == RoleSet{Role::Other});
}

TEST_CASE("cen_predict never returns more than two roles") {
  Rng rng(43);
  std::vector<std::vector<float>> cents;
  for (int r = 0; r < 7; ++r) cents.push_back({static_cast<float>(rng.normal()), static_cast<float>(rng.normal())});
  const auto m = cen_model(std::vector<Role>(kAllRoles.begin(), kAllRoles.end()), cents);
  for (int d = 0; d < 500; ++d) {
    MatrixF doc(1 + rng.uniform_index(12), 2);
    for (float& v : doc.data()) v = static_cast<float>(rng.normal());
    CHECK(cen_predict(m, doc).size() <= 2);
  }
}

TEST_CASE("cen model JSON round trip") {
  const auto m = cen_model({Role::Survey, Role::Other}, {{0.1f, 0.2f}, {0.3f, -4.0f}});
  const auto back = cen_from_json(cen_to_json(m));
  CHECK(back.roles == m.roles);
  CHECK(back.means == m.means);
  CHECK(back.centroids == m.centroids);
}

// ---------------------------------------------------------------------------
// KNN

namespace {

KnnIndex index_of(const std::vector<std::vector<double>>& rows, const std::vector<RoleSet>& labels) {
  KnnIndex idx;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "d%03zu", i);
    idx.doc_ids.push_back(id);
    idx.features.append_row(rows[i]);
  }
  idx.labels = labels;
  return idx;
}

}  // namespace

TEST_CASE("knn_predict examples") {
  const std::vector<double> q{0, 0};
  const auto two = index_of({{1, 0}, {0, 1}, {1, 1}, {9, 9}},
                            {{Role::Tutorial}, {Role::Tutorial}, {Role::Survey}, {Role::Survey}});
  CHECK(knn_predict({}, two, q) == RoleSet{Role::Tutorial});
  const auto none = index_of({{1, 0}, {0, 1}, {1, 1}}, {{Role::Survey}, {Role::Tutorial}, {Role::Resource}});
  CHECK(knn_predict({}, none, q).empty());
  const auto few = index_of({{1, 0}, {0, 1}}, {{Role::Survey}, {Role::Tutorial}});
  CHECK_THROWS_AS(knn_predict({}, few, q), InputError);
}

TEST_CASE("knn distance ties go to the smaller doc_id") {
  auto idx = index_of({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{Role::Survey}, {Role::Survey}, {Role::Other}, {Role::Other}});
  const std::vector<double> q{0, 0};
  CHECK(knn_neighbors({}, idx, q) == std::vector<std::size_t>{0, 1, 2});
  CHECK(knn_predict({}, idx, q) == RoleSet{Role::Survey});
}

TEST_CASE("knn matches an exhaustive scan and is invariant to storage order and uniform scaling") {
  Rng rng(44);
  std::vector<std::vector<double>> rows;
  std::vector<RoleSet> labels;
  for (int i = 0; i < 80; ++i) {
    std::vector<double> r(12);
    // Coarse values create plenty of exact distance ties.
    for (double& v : r) v = static_cast<double>(rng.uniform_index(3)) / 4.0;
    rows.push_back(r);
    labels.push_back(pedrole::testing::random_roleset(rng, false));
  }
  const auto idx = index_of(rows, labels);

  // Same documents stored in reverse order, and scaled by 3.
  KnnIndex reversed, scaled = idx;
  for (std::size_t i = rows.size(); i-- > 0;) {
    reversed.doc_ids.push_back(idx.doc_ids[i]);
    reversed.features.append_row(rows[i]);
    reversed.labels.push_back(labels[i]);
  }
  for (double& v : scaled.features.data()) v *= 3.0;

  for (int t = 0; t < 100; ++t) {
    std::vector<double> q(12);
    for (double& v : q) v = static_cast<double>(rng.uniform_index(3)) / 4.0;
    const auto expected = oracle::knn_scan(rows, idx.doc_ids, q, 3);
    CHECK(knn_neighbors({}, idx, q) == expected);
    const RoleSet got = knn_predict({}, idx, q);
    CHECK(knn_predict({}, reversed, q) == got);
    std::vector<double> q3 = q;
    for (double& v : q3) v *= 3.0;
    CHECK(knn_predict({}, scaled, q3) == got);
  }
}

// ---------------------------------------------------------------------------
// Random forest

TEST_CASE("depth-1 tree reproduces the hand-enumerated Gini split") {
  // x:      1  2  3  4  5  6
  // label:  0  0  1  0  1  1
  // Weighted Gini of each cut (left | right), n = 6:
  //   1.5: 1*0 + 5*(1-(0.6^2+0.4^2))           = 2.4    -> 0.4000
  //   2.5: 2*0 + 4*(1-(0.75^2+0.25^2))         = 1.5    -> 0.2500
  //   3.5: 3*(1-(1/9+4/9)) + 3*(1-(1/9+4/9))   = 2.6667 -> 0.4444
  //   4.5: 4*(1-(0.25^2+0.75^2)) + 2*0          = 1.5    -> 0.2500
  //   5.5: 5*(1-(0.4^2+0.6^2)) + 1*0            = 2.4    -> 0.4000
  // Minimum 0.25 first reached at 2.5.
  MatrixD x(6, 1);
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = static_cast<double>(i + 1);
  const std::vector<std::uint8_t> y{0, 0, 1, 0, 1, 1};
  const std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
  ForestParams p;
  p.max_depth = 1;
  p.min_samples_split = 2;
  p.bootstrap = false;
  const auto tree = fit_tree(x, y, rows, p, 1);
  REQUIRE(tree.nodes().size() == 3);
  CHECK(tree.nodes()[0].feature == 0);
  CHECK(tree.nodes()[0].threshold == 2.5);
  CHECK(tree.depth() == 1);
  CHECK(tree.nodes()[tree.nodes()[0].left].positive_fraction == 0.0);
  CHECK(tree.nodes()[tree.nodes()[0].right].positive_fraction == 0.75);
}

TEST_CASE("forest fits a separable two-role keyword corpus perfectly") {
  Rng rng(45);
  std::vector<TokenizedDoc> docs;
  std::vector<RoleSet> labels;
  for (int d = 0; d < 60; ++d) {
    const bool a = d % 2 == 0;
    TokenizedDoc doc;
    for (int w = 0; w < 20; ++w) doc.push_back((a ? "alpha" : "omega") + std::to_string(rng.uniform_index(6)));
    docs.push_back(doc);
    labels.push_back(a ? RoleSet{Role::Tutorial} : RoleSet{Role::SoftwareManual});
  }
  const auto tfidf = tfidf_fit(docs);
  const MatrixD x = tfidf_dense(tfidf, docs);
  ForestParams p;
  p.seed = 7;
  const auto model = rf_fit(x, labels, p);
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(rf_predict(model, x.row(i)) == labels[i]);
  CHECK_FALSE(model.per_role[role_index(Role::Survey)].trained);
  CHECK(model.warnings.size() == 5);
}

TEST_CASE("forest: absent roles are never predicted, output is seed-deterministic") {
  Rng rng(46);
  MatrixD x(50, 8);
  for (double& v : x.data()) v = rng.uniform01();
  std::vector<RoleSet> labels(50, RoleSet{Role::Other});
  for (std::size_t i = 0; i < 50; i += 3) labels[i].insert(Role::Resource);
  ForestParams p;
  p.seed = 3;
  const auto a = rf_fit(x, labels, p);
  const auto b = rf_fit(x, labels, p);
  CHECK(forest_to_json(a) == forest_to_json(b));
  for (int t = 0; t < 50; ++t) {
    std::vector<double> q(8);
    for (double& v : q) v = rng.uniform01();
    const RoleSet pred = rf_predict(a, q);
    CHECK_FALSE(pred.contains(Role::Survey));
    CHECK(pred == rf_predict(b, q));
  }
  const auto back = forest_from_json(forest_to_json(a));
  CHECK(forest_to_json(back) == forest_to_json(a));
  CHECK_THROWS_AS(rf_predict(a, std::vector<double>(3)), InputError);
}

TEST_CASE("tree depth respects max_depth and leaves respect min_samples_leaf") {
  Rng rng(47);
  MatrixD x(200, 5);
  for (double& v : x.data()) v = rng.uniform01();
  std::vector<std::uint8_t> y(200);
  for (auto& v : y) v = static_cast<std::uint8_t>(rng.uniform_index(2));
  std::vector<std::size_t> rows(200);
  for (std::size_t i = 0; i < 200; ++i) rows[i] = i;
  ForestParams p;
  p.max_depth = 4;
  p.min_samples_leaf = 7;
  p.max_features = 5;
  const auto tree = fit_tree(x, y, rows, p, 11);
  CHECK(tree.depth() <= 4);
  // Count training rows reaching each leaf.
  std::vector<std::size_t> reach(tree.nodes().size(), 0);
  for (std::size_t r = 0; r < 200; ++r) {
    std::size_t i = 0;
    while (tree.nodes()[i].feature >= 0) {
      const auto& nd = tree.nodes()[i];
      i = x(r, nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    ++reach[i];
  }
  for (std::size_t i = 0; i < reach.size(); ++i) {
    if (tree.nodes()[i].feature < 0) CHECK(reach[i] >= 7);
  }
}

// ---------------------------------------------------------------------------
// Keyphrase baseline

TEST_CASE("keyphrase examples") {
  const auto rules = KeyphraseRules::defaults();
  CHECK(keyphrase_predict(rules, parse_document("d", "A Tutorial on Parsing\nWe parse things.\n")) ==
        RoleSet{Role::Tutorial});
  std::string text = "Title\n";
  for (int i = 1; i <= 8; ++i) text += "Sentence number " + std::to_string(i) + " here. ";
  text += "See the manual for more.\n";
  CHECK(keyphrase_predict(rules, parse_document("d", text)).empty());
  CHECK(keyphrase_predict(rules, parse_document("d", "Title\nIt was done manually.\n")).empty());
}

TEST_CASE("keyphrase window covers the title and four body sentences") {
  const auto rules = KeyphraseRules::defaults();
  for (std::size_t pos = 0; pos < 7; ++pos) {
    std::string title = pos == 0 ? "The Technical Manual" : "Plain title";
    std::string body;
    for (std::size_t s = 1; s < 7; ++s) body += (s == pos ? "Read the manual now. " : "Nothing to see. ");
    const RoleSet got = keyphrase_predict(rules, parse_document("d", title + "\n" + body + "\n"));
    CHECK(got == (pos <= 4 ? RoleSet{Role::SoftwareManual} : RoleSet{}));
  }
}

TEST_CASE("keyphrase rules load from JSON") {
  const auto rules = keyphrase_rules_from_json(R"({"Survey": ["A Survey", "overview"], "Tutorial": ["how to"]})");
  CHECK(keyphrase_predict(rules, parse_document("d", "An Overview\nText here.\n")) == RoleSet{Role::Survey});
  CHECK(keyphrase_predict(rules, parse_document("d", "T\nThis is how to do it.\n")) == RoleSet{Role::Tutorial});
  CHECK_THROWS_AS(keyphrase_rules_from_json(R"({"Blog": ["x"]})"), InputError);
  CHECK_THROWS_AS(keyphrase_rules_from_json(R"({"Survey": ["  "]})"), InputError);
  CHECK_THROWS_AS(keyphrase_rules_from_json(R"(["x"])"), InputError);
}
