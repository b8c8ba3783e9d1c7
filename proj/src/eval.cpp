#include "pedrole/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "pedrole/error.hpp"
#include "pedrole/kernels.hpp"
#include "pedrole/random.hpp"

namespace pedrole {

FoldPlan make_folds(std::span<const std::string> doc_ids, std::span<const RoleSet> labels, std::size_t n_folds,
                    std::uint64_t seed) {
  if (doc_ids.size() != labels.size()) throw InputError("make_folds: doc_ids and labels differ in length");
  if (n_folds < 2) throw ConfigError("number of folds must be >= 2");
  if (doc_ids.size() < n_folds) {
    throw InputError("corpus has " + std::to_string(doc_ids.size()) + " documents, fewer than " +
                     std::to_string(n_folds) + " folds");
  }

  // Stratum kNumRoles collects documents without roles (not expected in
  // resolved corpora, kept so the plan still partitions its input).
  std::array<std::vector<std::string>, kNumRoles + 1> strata;
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    const auto first = labels[i].first();
    strata[first ? role_index(*first) : kNumRoles].push_back(doc_ids[i]);
  }

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.folds.resize(n_folds);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& stratum : strata) {
    std::sort(stratum.begin(), stratum.end());
    rng.shuffle(stratum);
    for (auto& id : stratum) {
      plan.folds[next].push_back(std::move(id));
      next = (next + 1) % n_folds;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

FoldPlan make_folds(const LabeledCorpus& corpus, std::size_t n_folds, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<RoleSet> labels;
  for (const auto& ld : corpus.documents) {
    ids.push_back(ld.doc.doc_id);
    labels.push_back(ld.roles);
  }
  return make_folds(ids, labels, n_folds, seed);
}

namespace {

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

void check_same_keys(const PredictionMap& predictions, const PredictionMap& truth) {
  if (predictions.size() != truth.size()) {
    throw InputError("predictions cover " + std::to_string(predictions.size()) + " documents, truth covers " +
                     std::to_string(truth.size()));
  }
  for (auto p = predictions.begin(), t = truth.begin(); p != predictions.end(); ++p, ++t) {
    if (p->first != t->first) throw InputError("prediction/truth doc_id mismatch at " + p->first);
  }
}

}  // namespace

FoldScore score(const PredictionMap& predictions, const PredictionMap& truth) {
  check_same_keys(predictions, truth);
  FoldScore out;
  for (auto p = predictions.begin(), t = truth.begin(); p != predictions.end(); ++p, ++t) {
    for (Role r : kAllRoles) {
      auto& c = out.per_role[role_index(r)];
      const bool predicted = p->second.contains(r);
      const bool actual = t->second.contains(r);
      if (predicted && actual) ++c.tp;
      if (predicted && !actual) ++c.fp;
      if (!predicted && actual) ++c.fn;
    }
  }
  for (auto& c : out.per_role) {
    c.support = c.tp + c.fn;
    c.precision = safe_ratio(c.tp, c.tp + c.fp);
    c.recall = safe_ratio(c.tp, c.tp + c.fn);
    c.f1 = f1_of(c.precision, c.recall);
  }
  return out;
}

EvalReport aggregate(std::span<const FoldScore> folds, std::string method) {
  EvalReport report;
  report.method = std::move(method);
  report.folds.assign(folds.begin(), folds.end());
  if (folds.empty()) return report;

  const double n = static_cast<double>(folds.size());
  for (std::size_t r = 0; r < kNumRoles; ++r) {
    RoleMetrics m;
    for (const auto& f : folds) {
      m.precision += f.per_role[r].precision;
      m.recall += f.per_role[r].recall;
      m.f1 += f.per_role[r].f1;
      m.support += static_cast<double>(f.per_role[r].support);
    }
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    m.support /= n;
    report.per_role[r] = m;
  }

  double total = 0.0;
  for (const auto& m : report.per_role) total += m.support;
  report.weighted.support = total;
  if (total > 0.0) {
    for (const auto& m : report.per_role) {
      report.weighted.precision += m.support * m.precision;
      report.weighted.recall += m.support * m.recall;
      report.weighted.f1 += m.support * m.f1;
    }
    report.weighted.precision /= total;
    report.weighted.recall /= total;
    report.weighted.f1 /= total;
  }
  return report;
}

PredictionConfusion prediction_confusion(const PredictionMap& predictions, const PredictionMap& truth,
                                         const FoldPlan& plan) {
  check_same_keys(predictions, truth);
  PredictionConfusion out;
  out.n_folds = std::max<std::size_t>(1, plan.n_folds);
  for (auto p = predictions.begin(), t = truth.begin(); p != predictions.end(); ++p, ++t) {
    if (t->second.size() != 1) continue;
    auto& row = out.counts[role_index(*t->second.first())];
    if (p->second.empty()) {
      row[kNumRoles] += 1.0;
    } else {
      for (Role r : p->second.roles()) row[role_index(r)] += 1.0;
    }
  }
  for (auto& row : out.counts) {
    for (double& v : row) v /= static_cast<double>(out.n_folds);
  }
  return out;
}

std::string report_to_json(const EvalReport& report, const PredictionConfusion& confusion) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["n_folds"] = report.folds.size();
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.seeds) seeds[k] = v;
  j["seeds"] = seeds;

  auto metrics = [](const RoleMetrics& m) {
    return nlohmann::ordered_json{
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  };
  nlohmann::ordered_json per_role = nlohmann::ordered_json::object();
  for (Role r : kAllRoles) per_role[std::string(role_name(r))] = metrics(report.per_role[role_index(r)]);
  j["per_role"] = per_role;
  j["weighted_avg"] = metrics(report.weighted);

  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : report.folds) {
    nlohmann::ordered_json jf = nlohmann::ordered_json::object();
    for (Role r : kAllRoles) {
      const auto& c = f.per_role[role_index(r)];
      jf[std::string(role_name(r))] = {{"tp", c.tp},
                                       {"fp", c.fp},
                                       {"fn", c.fn},
                                       {"support", c.support},
                                       {"precision", c.precision},
                                       {"recall", c.recall},
                                       {"f1", c.f1}};
    }
    folds.push_back(jf);
  }
  j["folds"] = folds;

  nlohmann::ordered_json conf;
  conf["rows"] = nlohmann::ordered_json::array();
  conf["columns"] = nlohmann::ordered_json::array();
  for (Role r : kAllRoles) {
    conf["rows"].push_back(std::string(role_name(r)));
    conf["columns"].push_back(std::string(role_name(r)));
  }
  conf["columns"].push_back("NoPrediction");
  conf["counts"] = nlohmann::ordered_json::array();
  for (const auto& row : confusion.counts) conf["counts"].push_back(row);
  conf["n_folds"] = confusion.n_folds;
  j["prediction_confusion"] = conf;
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  char buf[160];
  out << "method: " << report.method << "  (" << report.folds.size() << " folds)\n";
  std::snprintf(buf, sizeof buf, "%-18s %9s %9s %9s %9s\n", "role", "precision", "recall", "f1", "support");
  out << buf;
  for (Role r : kAllRoles) {
    const auto& m = report.per_role[role_index(r)];
    std::snprintf(buf, sizeof buf, "%-18s %9.2f %9.2f %9.2f %9.1f\n", std::string(role_name(r)).c_str(), m.precision,
                  m.recall, m.f1, m.support);
    out << buf;
  }
  const auto& w = report.weighted;
  std::snprintf(buf, sizeof buf, "%-18s %9.2f %9.2f %9.2f %9.1f\n", "avg / total", w.precision, w.recall, w.f1,
                w.support);
  out << buf;
  return out.str();
}

std::string prediction_confusion_to_text(const PredictionConfusion& confusion) {
  std::ostringstream out;
  char buf[32];
  out << "      ";
  for (Role r : kAllRoles) {
    std::snprintf(buf, sizeof buf, "%7s", std::string(role_abbrev(r)).c_str());
    out << buf;
  }
  out << "  NoPred   Total\n";
  std::array<double, kNumRoles + 1> col_totals{};
  double grand = 0.0;
  for (Role r : kAllRoles) {
    std::snprintf(buf, sizeof buf, "%-6s", std::string(role_abbrev(r)).c_str());
    out << buf;
    double row_total = 0.0;
    const auto& row = confusion.counts[role_index(r)];
    for (std::size_t c = 0; c <= kNumRoles; ++c) {
      row_total += row[c];
      col_totals[c] += row[c];
      std::snprintf(buf, sizeof buf, c == kNumRoles ? "%8.1f" : "%7.1f", row[c]);
      out << buf;
    }
    grand += row_total;
    std::snprintf(buf, sizeof buf, "%8.1f\n", row_total);
    out << buf;
  }
  out << "Tot.  ";
  for (std::size_t c = 0; c <= kNumRoles; ++c) {
    std::snprintf(buf, sizeof buf, c == kNumRoles ? "%8.1f" : "%7.1f", col_totals[c]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%8.1f\n", grand);
  out << buf;
  return out.str();
}

double alphabetic_ratio(std::string_view sentence) {
  std::size_t letters = 0;
  std::size_t chars = 0;
  for (char ch : sentence) {
    const auto u = static_cast<unsigned char>(ch);
    if (u == ' ' || u == '\t' || u == '\n' || u == '\r') continue;
    if ((u & 0xC0) == 0x80) continue;  // UTF-8 continuation byte
    ++chars;
    if ((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0xC0) ++letters;
  }
  return chars == 0 ? 0.0 : static_cast<double>(letters) / static_cast<double>(chars);
}

std::vector<RoleAffinity> role_cluster_affinity(std::span<const LabeledDocument> docs, const CorpusVectors& vectors,
                                                const ClusterModel& model, const AffinityParams& params) {
  struct Member {
    std::size_t doc;
    std::size_t sentence;
    double sq_dist;
  };
  const std::size_t k = model.n_clusters();
  std::vector<std::vector<Member>> members(k);
  std::array<std::vector<double>, kNumRoles> role_freq;
  for (auto& f : role_freq) f.assign(k, 0.0);

  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto it = vectors.find(docs[d].doc.doc_id);
    if (it == vectors.end()) throw InputError("no sentence vectors for doc_id " + docs[d].doc.doc_id);
    const MatrixF& m = it->second;
    if (m.rows() == 0) continue;
    std::vector<std::uint32_t> labels(m.rows());
    std::vector<double> sq(m.rows());
    kernels::parallel::assign_nearest(m, model.centroids, labels, sq);
    const double share = 1.0 / static_cast<double>(m.rows());
    for (std::size_t s = 0; s < m.rows(); ++s) {
      members[labels[s]].push_back({d, s, sq[s]});
      for (Role r : docs[d].roles.roles()) role_freq[role_index(r)][labels[s]] += share;
    }
  }

  Rng rng(params.seed);
  std::vector<bool> degenerate(k, false);
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].empty()) continue;
    std::vector<std::size_t> sample(members[c].size());
    std::iota(sample.begin(), sample.end(), std::size_t{0});
    if (sample.size() > params.filter_sample_size) {
      rng.shuffle(sample);
      sample.resize(params.filter_sample_size);
    }
    double ratio = 0.0;
    for (std::size_t i : sample) {
      const auto& mem = members[c][i];
      ratio += alphabetic_ratio(docs[mem.doc].doc.sentences[mem.sentence]);
    }
    degenerate[c] = ratio / static_cast<double>(sample.size()) < params.min_alpha_ratio;
  }

  std::vector<RoleAffinity> out;
  for (Role r : kAllRoles) {
    const auto& freq = role_freq[role_index(r)];
    std::vector<std::uint32_t> order;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (freq[c] > 0.0 && !degenerate[c]) order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return freq[a] > freq[b]; });
    if (order.size() > params.top_m) order.resize(params.top_m);

    RoleAffinity ra;
    ra.role = r;
    for (std::uint32_t c : order) {
      ClusterAffinity ca;
      ca.cluster = c;
      ca.frequency = freq[c];
      auto mem = members[c];
      std::stable_sort(mem.begin(), mem.end(), [](const Member& a, const Member& b) { return a.sq_dist < b.sq_dist; });
      for (std::size_t i = 0; i < mem.size() && i < params.examples_per_cluster; ++i) {
        ca.examples.push_back(docs[mem[i].doc].doc.sentences[mem[i].sentence]);
      }
      ra.clusters.push_back(std::move(ca));
    }
    out.push_back(std::move(ra));
  }
  return out;
}

std::string affinity_to_json(std::span<const RoleAffinity> affinity) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& ra : affinity) {
    for (const auto& ca : ra.clusters) {
      j.push_back({{"role", std::string(role_name(ra.role))},
                   {"cluster", ca.cluster},
                   {"frequency", ca.frequency},
                   {"examples", ca.examples}});
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace pedrole
