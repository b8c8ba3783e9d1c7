#include "pedrole/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pedrole/agreement.hpp"
#include "pedrole/bosec.hpp"
#include "pedrole/corpus.hpp"
#include "pedrole/embedding.hpp"
#include "pedrole/error.hpp"
#include "pedrole/eval.hpp"
#include "pedrole/kernels.hpp"
#include "pedrole/random.hpp"

namespace pedrole {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string docs;
  std::string annotations;
  std::string vec_dir;
  std::string encoder;  // "", "external" or "builtin"
  std::size_t dim = 256;
  std::size_t clusters = 300;
  std::size_t batch_size = 4800;
  std::size_t max_batches = 1000;
  std::size_t k = 3;
  std::size_t folds = 5;
  std::optional<std::uint64_t> seed;
  std::string method = "all";
  std::string out;
  std::string model;
  std::size_t top = 2;
  std::string keyphrases;
  std::string cen_distance = "euclidean";
  int threads = 0;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
  if (!f) throw InputError("write failed for " + path.string());
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw ConfigError(std::string(command) + " requires " + flag);
}

std::uint64_t require_seed(const RunConfig& cfg, const char* command) {
  if (!cfg.seed) throw ConfigError(std::string(command) + " requires --seed");
  return *cfg.seed;
}

fs::path output_dir(const RunConfig& cfg, const char* command) {
  require(cfg.out, "--out", command);
  fs::create_directories(cfg.out);
  return cfg.out;
}

fs::path model_path(const RunConfig& cfg) {
  return cfg.model.empty() ? fs::path(cfg.out) / "clusters.txt" : fs::path(cfg.model);
}

/// Sentence vectors for `docs`, or nullopt when no vector source is configured.
std::optional<CorpusVectors> sentence_vectors(const RunConfig& cfg, std::span<const Document> docs,
                                              const char* command) {
  std::string kind = cfg.encoder;
  if (kind.empty() && !cfg.vec_dir.empty()) kind = "external";
  if (kind.empty()) return std::nullopt;
  if (kind == "external") {
    require(cfg.vec_dir, "--vec-dir with --encoder external", command);
    return load_vectors(cfg.vec_dir, docs);
  }
  EncoderSpec spec;
  spec.kind = EncoderKind::BuiltinHash;
  spec.dim = cfg.dim;
  spec.seed = derive_seed(require_seed(cfg, command), SeedStream::Encoder);
  if (spec.dim == 0) throw ConfigError("--dim must be >= 1");
  return encode_documents(docs, spec);
}

CorpusVectors require_vectors(const RunConfig& cfg, std::span<const Document> docs, const char* command) {
  auto v = sentence_vectors(cfg, docs, command);
  if (!v) {
    throw ConfigError(std::string(command) +
                      " needs sentence vectors: pass --vec-dir <dir> (one <doc_id>.vec per document) or "
                      "--encoder builtin");
  }
  return std::move(*v);
}

/// Documents the command operates on: the labeled corpus when annotations
/// are given, otherwise every document file.
std::vector<Document> working_documents(const RunConfig& cfg, const char* command) {
  require(cfg.docs, "--docs", command);
  if (cfg.annotations.empty()) return load_documents(cfg.docs);
  const LabeledCorpus labeled = label_corpus(load_corpus(cfg.docs, cfg.annotations));
  std::vector<Document> docs;
  for (const auto& ld : labeled.documents) docs.push_back(ld.doc);
  return docs;
}

LabeledCorpus labeled_corpus(const RunConfig& cfg, const char* command) {
  require(cfg.docs, "--docs", command);
  require(cfg.annotations, "--annotations", command);
  return label_corpus(load_corpus(cfg.docs, cfg.annotations));
}

std::vector<const MatrixF*> blocks_for(const CorpusVectors& vectors, std::span<const Document> docs) {
  std::vector<const MatrixF*> blocks;
  for (const auto& d : docs) blocks.push_back(&vectors.at(d.doc_id));
  return blocks;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const LabeledCorpus corpus = labeled_corpus(cfg, "stats");
  const fs::path dir = output_dir(cfg, "stats");
  const StatsReport stats = corpus_stats(corpus);
  write_file(dir / "stats.json", stats_to_json(stats));
  write_file(dir / "stats.txt", stats_to_text(stats));
  out << "stats: " << stats.n_documents << " documents, " << stats.total_role_annotations << " role annotations, "
      << stats.filtered_documents << " filtered -> " << (dir / "stats.json").string() << "\n";
  return kExitOk;
}

int cmd_kappa(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.annotations, "--annotations", "kappa");
  const auto records = load_annotations(cfg.annotations);
  const fs::path dir = output_dir(cfg, "kappa");
  const AgreementReport report = average_subset_kappa(records);
  const AnnotatorConfusion confusion = third_annotator_confusion(records);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  write_file(dir / "agreement.json", agreement_to_json(report, confusion));
  write_file(dir / "agreement_confusion.txt", confusion_to_text(confusion));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", report.mean_kappa);
  out << "kappa: mean " << buf << " over " << report.per_subset.size() << " subsets -> "
      << (dir / "agreement.json").string() << "\n";
  return kExitOk;
}

KmeansParams kmeans_params(const RunConfig& cfg, std::uint64_t seed) {
  KmeansParams kp;
  kp.n_clusters = cfg.clusters;
  kp.batch_size = cfg.batch_size;
  kp.max_batches = cfg.max_batches;
  kp.seed = seed;
  return kp;
}

int cmd_cluster(const RunConfig& cfg, std::ostream& out) {
  const std::uint64_t seed = require_seed(cfg, "cluster");
  const auto docs = working_documents(cfg, "cluster");
  const CorpusVectors vectors = require_vectors(cfg, docs, "cluster");
  const fs::path dir = output_dir(cfg, "cluster");
  const auto blocks = blocks_for(vectors, docs);
  const ClusterModel model = kmeans_fit(stack_rows(blocks), kmeans_params(cfg, derive_seed(seed, SeedStream::Kmeans)));
  save_cluster_model(model_path(cfg), model);
  out << "cluster: " << model.n_clusters() << " clusters, " << model.batches_run << " batches"
      << (model.early_stopped ? " (early stop)" : "") << " -> " << model_path(cfg).string() << "\n";
  return kExitOk;
}

int cmd_featurize(const RunConfig& cfg, std::ostream& out) {
  const auto docs = working_documents(cfg, "featurize");
  const CorpusVectors vectors = require_vectors(cfg, docs, "featurize");
  const fs::path dir = output_dir(cfg, "featurize");
  const ClusterModel model = load_cluster_model(model_path(cfg));
  std::map<std::string, std::vector<double>> features;
  for (const auto& d : docs) features[d.doc_id] = bosec_featurize(model, vectors.at(d.doc_id));
  write_file(dir / "bosec.json", bosec_to_json(features));
  out << "featurize: " << features.size() << " documents x " << model.n_clusters() << " clusters -> "
      << (dir / "bosec.json").string() << "\n";
  return kExitOk;
}

std::vector<Method> selected_methods(const std::string& name) {
  if (name == "all") return {Method::RandomForest, Method::Centroid, Method::Knn, Method::Keyphrase};
  for (Method m : {Method::RandomForest, Method::Centroid, Method::Knn, Method::Keyphrase}) {
    if (method_name(m) == name) return {m};
  }
  throw ConfigError("unknown method '" + name + "'");
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = require_seed(cfg, "eval");
  const auto methods = selected_methods(cfg.method);
  const LabeledCorpus corpus = labeled_corpus(cfg, "eval");

  std::vector<Document> docs;
  for (const auto& ld : corpus.documents) docs.push_back(ld.doc);
  std::optional<CorpusVectors> vectors;
  for (Method m : methods) {
    if (!method_needs_vectors(m)) continue;
    if (!vectors) {
      std::string command = "eval --method " + std::string(method_name(m));
      vectors = require_vectors(cfg, docs, command.c_str());
    }
  }
  const fs::path dir = output_dir(cfg, "eval");

  CvConfig cv;
  cv.n_folds = cfg.folds;
  cv.seed = seed;
  cv.kmeans = kmeans_params(cfg, 0);
  cv.knn.k = cfg.k;
  if (cfg.cen_distance == "cosine") cv.cen_distance = CenDistance::Cosine;
  if (!cfg.keyphrases.empty()) cv.keyphrases = load_keyphrase_rules(cfg.keyphrases);

  for (Method m : methods) {
    CvResult result = cross_validate(m, corpus, vectors ? &*vectors : nullptr, cv);
    if (cfg.encoder == "builtin" && method_needs_vectors(m)) {
      result.report.seeds["encoder"] = derive_seed(seed, SeedStream::Encoder);
    }
    for (const auto& w : result.warnings) err << "warning: " << method_name(m) << ": " << w << "\n";
    const std::string stem = "eval_" + std::string(method_name(m));
    write_file(dir / (stem + ".json"), report_to_json(result.report, result.confusion));
    write_file(dir / (stem + ".txt"),
               report_to_text(result.report) + "\n" + prediction_confusion_to_text(result.confusion));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", result.report.weighted.f1);
    out << "eval: " << method_name(m) << " weighted F1 " << buf << " over " << corpus.documents.size()
        << " documents -> " << (dir / (stem + ".json")).string() << "\n";
  }
  return kExitOk;
}

int cmd_affinity(const RunConfig& cfg, std::ostream& out) {
  const std::uint64_t seed = require_seed(cfg, "affinity");
  const LabeledCorpus corpus = labeled_corpus(cfg, "affinity");
  std::vector<Document> docs;
  for (const auto& ld : corpus.documents) docs.push_back(ld.doc);
  const CorpusVectors vectors = require_vectors(cfg, docs, "affinity");
  const fs::path dir = output_dir(cfg, "affinity");
  const ClusterModel model = load_cluster_model(model_path(cfg));
  AffinityParams params;
  params.top_m = cfg.top;
  params.seed = derive_seed(seed, SeedStream::Affinity);
  const auto affinity = role_cluster_affinity(corpus.documents, vectors, model, params);
  write_file(dir / "affinity.json", affinity_to_json(affinity));
  out << "affinity: top " << cfg.top << " clusters per role -> " << (dir / "affinity.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedagogical role classification pipeline"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--docs", cfg.docs, "Directory of <doc_id>.txt files (first line is the title)");
    sub->add_option("--annotations", cfg.annotations, "Annotation records, one JSON object per line");
    sub->add_option("--vec-dir", cfg.vec_dir, "Directory of <doc_id>.vec sentence vector files");
    sub->add_option("--encoder", cfg.encoder, "Sentence vector source")
        ->check(CLI::IsMember({"external", "builtin"}));
    sub->add_option("--dim", cfg.dim, "Builtin encoder dimension")->capture_default_str();
    sub->add_option("--clusters", cfg.clusters, "Number of sentence clusters")->capture_default_str();
    sub->add_option("--batch-size", cfg.batch_size, "Mini-batch size")->capture_default_str();
    sub->add_option("--max-batches", cfg.max_batches, "Mini-batch iteration cap")->capture_default_str();
    sub->add_option("--k", cfg.k, "Neighbours for KNN")->capture_default_str();
    sub->add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Run seed; every random component derives from it");
    sub->add_option("--method", cfg.method, "Classifier to evaluate")
        ->check(CLI::IsMember({"rf", "cen", "knn", "keyphrase", "all"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--model", cfg.model, "Cluster model file (default <out>/clusters.txt)");
    sub->add_option("--top", cfg.top, "Clusters reported per role")->capture_default_str();
    sub->add_option("--keyphrases", cfg.keyphrases, "JSON file mapping role names to keyphrase arrays");
    sub->add_option("--cen-distance", cfg.cen_distance, "Sentence-to-centroid distance")
        ->check(CLI::IsMember({"euclidean", "cosine"}))
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker thread cap (0 = runtime default)");
  };

  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"stats", "kappa", "cluster", "featurize", "eval", "affinity"}) {
    subs[name] = app.add_subcommand(name);
    add_common(subs[name]);
  }
  subs["stats"]->description("Role counts and roles-per-document histogram");
  subs["kappa"]->description("Inter-annotator agreement and third-annotator confusion");
  subs["cluster"]->description("Fit the sentence cluster model");
  subs["featurize"]->description("Bag-of-cluster document features");
  subs["eval"]->description("Cross-validated classifier evaluation");
  subs["affinity"]->description("Clusters most associated with each role");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cfg.threads < 0) throw ConfigError("--threads must be >= 0");
    kernels::set_thread_limit(cfg.threads);
    if (subs["stats"]->parsed()) return cmd_stats(cfg, out);
    if (subs["kappa"]->parsed()) return cmd_kappa(cfg, out, err);
    if (subs["cluster"]->parsed()) return cmd_cluster(cfg, out);
    if (subs["featurize"]->parsed()) return cmd_featurize(cfg, out);
    if (subs["eval"]->parsed()) return cmd_eval(cfg, out, err);
    if (subs["affinity"]->parsed()) return cmd_affinity(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace pedrole
