#include <exception>
#include <string>

#include "pedrole/error.hpp"
#include "pedrole/eval.hpp"
#include "pedrole/random.hpp"
#include "pedrole/textproc.hpp"

namespace pedrole {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::RandomForest:
      return "rf";
    case Method::Centroid:
      return "cen";
    case Method::Knn:
      return "knn";
    case Method::Keyphrase:
      return "keyphrase";
  }
  return "unknown";
}

bool method_needs_vectors(Method m) { return m == Method::Centroid || m == Method::Knn; }

namespace {

struct FoldOutput {
  PredictionMap predictions;
  std::vector<std::string> warnings;
};

TokenizedDoc document_tokens(const Document& doc) {
  TokenizedDoc tokens = tokenize(doc.title);
  for (const auto& s : doc.sentences) {
    auto t = tokenize(s);
    tokens.insert(tokens.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return tokens;
}

const MatrixF& vectors_of(const CorpusVectors& vectors, const std::string& doc_id) {
  auto it = vectors.find(doc_id);
  if (it == vectors.end()) throw InputError("no sentence vectors for doc_id " + doc_id);
  return it->second;
}

FoldOutput run_fold(Method method, const std::vector<const LabeledDocument*>& train,
                    const std::vector<const LabeledDocument*>& test, const CorpusVectors* vectors,
                    const CvConfig& config, std::size_t fold) {
  FoldOutput out;
  std::vector<RoleSet> train_labels;
  for (const auto* d : train) train_labels.push_back(d->roles);

  switch (method) {
    case Method::Keyphrase: {
      for (const auto* d : test) out.predictions[d->doc.doc_id] = keyphrase_predict(config.keyphrases, d->doc);
      break;
    }
    case Method::Centroid: {
      std::vector<const MatrixF*> blocks;
      for (const auto* d : train) blocks.push_back(&vectors_of(*vectors, d->doc.doc_id));
      const CenModel model = cen_fit(blocks, train_labels, config.cen_distance);
      out.warnings = model.warnings;
      for (const auto* d : test) {
        out.predictions[d->doc.doc_id] = cen_predict(model, vectors_of(*vectors, d->doc.doc_id));
      }
      break;
    }
    case Method::Knn: {
      std::vector<const MatrixF*> train_blocks;
      for (const auto* d : train) train_blocks.push_back(&vectors_of(*vectors, d->doc.doc_id));
      KmeansParams kp = config.kmeans;
      kp.seed = derive_seed(derive_seed(config.seed, SeedStream::Kmeans), fold);
      const ClusterModel clusters = kmeans_fit(stack_rows(train_blocks), kp);
      KnnIndex index;
      index.features = bosec_features(clusters, train_blocks);
      index.labels = train_labels;
      for (const auto* d : train) index.doc_ids.push_back(d->doc.doc_id);
      for (const auto* d : test) {
        const auto query = bosec_featurize(clusters, vectors_of(*vectors, d->doc.doc_id));
        out.predictions[d->doc.doc_id] = knn_predict(config.knn, index, query);
      }
      break;
    }
    case Method::RandomForest: {
      std::vector<TokenizedDoc> train_tokens;
      for (const auto* d : train) train_tokens.push_back(document_tokens(d->doc));
      const TfidfModel tfidf = tfidf_fit(train_tokens, config.min_df, config.max_df);
      ForestParams fp = config.forest;
      fp.seed = derive_seed(derive_seed(config.seed, SeedStream::Forest), fold);
      const ForestModel forest = rf_fit(tfidf_dense(tfidf, train_tokens), train_labels, fp);
      out.warnings = forest.warnings;
      std::vector<TokenizedDoc> test_tokens;
      for (const auto* d : test) test_tokens.push_back(document_tokens(d->doc));
      const MatrixD x = tfidf_dense(tfidf, test_tokens);
      for (std::size_t i = 0; i < test.size(); ++i) out.predictions[test[i]->doc.doc_id] = rf_predict(forest, x.row(i));
      break;
    }
  }
  for (auto& w : out.warnings) w = "fold " + std::to_string(fold) + ": " + w;
  return out;
}

}  // namespace

CvResult cross_validate(Method method, const LabeledCorpus& corpus, const CorpusVectors* vectors,
                        const CvConfig& config) {
  if (method_needs_vectors(method) && vectors == nullptr) {
    throw ConfigError("method '" + std::string(method_name(method)) + "' needs sentence vectors");
  }

  CvResult result;
  result.plan = make_folds(corpus, config.n_folds, derive_seed(config.seed, SeedStream::Folds));
  const auto& plan = result.plan;

  std::map<std::string, const LabeledDocument*> by_id;
  PredictionMap truth;
  for (const auto& ld : corpus.documents) {
    by_id[ld.doc.doc_id] = &ld;
    truth[ld.doc.doc_id] = ld.roles;
  }

  std::vector<FoldOutput> outputs(plan.n_folds);
  std::vector<std::exception_ptr> errors(plan.n_folds);
  const auto n_folds = static_cast<std::int64_t>(plan.n_folds);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t f = 0; f < n_folds; ++f) {
    try {
      std::vector<const LabeledDocument*> train;
      std::vector<const LabeledDocument*> test;
      for (std::size_t g = 0; g < plan.n_folds; ++g) {
        auto& dest = g == static_cast<std::size_t>(f) ? test : train;
        for (const auto& id : plan.folds[g]) dest.push_back(by_id.at(id));
      }
      outputs[f] = run_fold(method, train, test, vectors, config, static_cast<std::size_t>(f));
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<FoldScore> scores;
  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    PredictionMap fold_truth;
    for (const auto& id : plan.folds[f]) fold_truth[id] = truth.at(id);
    scores.push_back(score(outputs[f].predictions, fold_truth));
    result.predictions.merge(outputs[f].predictions);
    result.warnings.insert(result.warnings.end(), outputs[f].warnings.begin(), outputs[f].warnings.end());
  }

  result.report = aggregate(scores, std::string(method_name(method)));
  result.report.seeds["run"] = config.seed;
  result.report.seeds["folds"] = plan.seed;
  if (method == Method::Knn) result.report.seeds["kmeans"] = derive_seed(config.seed, SeedStream::Kmeans);
  if (method == Method::RandomForest) result.report.seeds["forest"] = derive_seed(config.seed, SeedStream::Forest);
  result.confusion = prediction_confusion(result.predictions, truth, plan);
  return result;
}

}  // namespace pedrole
