#include "pedrole/agreement.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "pedrole/error.hpp"

namespace pedrole {

KappaResult fleiss_kappa(const RatingTable& table, std::size_t n_raters) {
  if (table.rows() == 0) throw InputError("fleiss_kappa: no items");
  if (n_raters < 2) throw InputError("fleiss_kappa: need at least two raters");

  const std::size_t n_items = table.rows();
  const std::size_t n_cats = table.cols();
  const double n = static_cast<double>(n_raters);
  std::vector<double> category_totals(n_cats, 0.0);
  double agreement_sum = 0.0;
  for (std::size_t i = 0; i < n_items; ++i) {
    std::size_t row_total = 0;
    double pairs = 0.0;
    for (std::size_t c = 0; c < n_cats; ++c) {
      const double v = table(i, c);
      row_total += table(i, c);
      pairs += v * (v - 1.0);
      category_totals[c] += v;
    }
    if (row_total != n_raters) {
      throw InputError("fleiss_kappa: item " + std::to_string(i) + " has " + std::to_string(row_total) +
                       " ratings, expected " + std::to_string(n_raters));
    }
    agreement_sum += pairs / (n * (n - 1.0));
  }
  const double p_bar = agreement_sum / static_cast<double>(n_items);
  double p_e = 0.0;
  const double total = n * static_cast<double>(n_items);
  for (double t : category_totals) {
    const double p = t / total;
    p_e += p * p;
  }
  if (p_e >= 1.0) return {1.0, true};
  return {(p_bar - p_e) / (1.0 - p_e), false};
}

RatingTable binary_role_items(std::span<const std::pair<std::string, std::vector<AnnotationRecord>>> docs,
                              std::size_t n_raters) {
  RatingTable table(docs.size() * kNumRoles, 2);
  std::size_t row = 0;
  for (const auto& [doc_id, recs] : docs) {
    if (recs.size() != n_raters) {
      throw InputError("doc_id " + doc_id + " has " + std::to_string(recs.size()) + " annotation records, expected " +
                       std::to_string(n_raters));
    }
    for (Role r : kAllRoles) {
      std::uint32_t yes = 0;
      for (const auto& rec : recs) yes += rec.roles.contains(r) ? 1 : 0;
      table(row, 0) = yes;
      table(row, 1) = static_cast<std::uint32_t>(n_raters) - yes;
      ++row;
    }
  }
  return table;
}

AgreementReport average_subset_kappa(std::span<const AnnotationRecord> records, std::size_t n_raters) {
  std::map<std::string, std::vector<AnnotationRecord>> by_subset;
  for (const auto& rec : records) {
    if (rec.subset_id == kInternalSubset) continue;
    by_subset[rec.subset_id].push_back(rec);
  }

  AgreementReport report;
  double sum = 0.0;
  for (const auto& [subset_id, recs] : by_subset) {
    const auto docs = group_by_document(recs);
    if (docs.empty()) {
      report.warnings.push_back("subset " + subset_id + " has no documents; skipped");
      continue;
    }
    const auto k = fleiss_kappa(binary_role_items(docs, n_raters), n_raters);
    report.per_subset[subset_id] = {k.value, k.degenerate, docs.size()};
    if (k.degenerate) report.warnings.push_back("subset " + subset_id + " has zero rating variance; kappa set to 1");
    sum += k.value;
  }
  if (report.per_subset.empty()) throw InputError("no annotated subsets to compute agreement over");
  report.mean_kappa = sum / static_cast<double>(report.per_subset.size());
  return report;
}

AnnotatorConfusion third_annotator_confusion(std::span<const AnnotationRecord> records) {
  AnnotatorConfusion out;
  for (const auto& [doc_id, recs] : group_by_document(records)) {
    if (recs.size() != 3 || recs.front().subset_id == kInternalSubset) continue;
    const auto majority = resolve_majority(recs, 3);
    if (!majority || majority->size() != 1) continue;
    const Role truth = *majority->first();

    // recs are sorted by annotator_id, so strict '>' keeps the smallest id on ties.
    const AnnotationRecord* third = &recs.front();
    std::size_t best = (third->roles ^ *majority).size();
    for (const auto& rec : recs) {
      const std::size_t diff = (rec.roles ^ *majority).size();
      if (diff > best) {
        best = diff;
        third = &rec;
      }
    }
    for (Role r : third->roles.roles()) {
      ++out.counts[role_index(truth)][role_index(r)];
      ++out.total_pairs;
    }
    ++out.docs_used;
  }
  return out;
}

std::string agreement_to_json(const AgreementReport& report, const AnnotatorConfusion& confusion) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json subsets = nlohmann::ordered_json::object();
  for (const auto& [id, s] : report.per_subset) {
    subsets[id] = {{"kappa", s.kappa}, {"degenerate", s.degenerate}, {"n_documents", s.n_documents}};
  }
  j["per_subset_kappa"] = subsets;
  j["mean_kappa"] = report.mean_kappa;
  j["warnings"] = report.warnings;

  nlohmann::ordered_json conf;
  conf["roles"] = nlohmann::ordered_json::array();
  for (Role r : kAllRoles) conf["roles"].push_back(std::string(role_name(r)));
  conf["counts"] = nlohmann::ordered_json::array();
  for (const auto& row : confusion.counts) conf["counts"].push_back(row);
  conf["total_pairs"] = confusion.total_pairs;
  conf["docs_used"] = confusion.docs_used;
  j["third_annotator_confusion"] = conf;
  return j.dump(2) + "\n";
}

std::string confusion_to_text(const AnnotatorConfusion& confusion) {
  std::ostringstream out;
  char buf[32];
  out << "      ";
  for (Role r : kAllRoles) {
    std::snprintf(buf, sizeof buf, "%6s", std::string(role_abbrev(r)).c_str());
    out << buf;
  }
  out << " Total\n";
  std::array<std::size_t, kNumRoles> col_totals{};
  for (Role r : kAllRoles) {
    std::snprintf(buf, sizeof buf, "%-6s", std::string(role_abbrev(r)).c_str());
    out << buf;
    std::size_t row_total = 0;
    for (std::size_t c = 0; c < kNumRoles; ++c) {
      const std::size_t v = confusion.counts[role_index(r)][c];
      row_total += v;
      col_totals[c] += v;
      std::snprintf(buf, sizeof buf, "%6zu", v);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%6zu\n", row_total);
    out << buf;
  }
  out << "Total ";
  for (std::size_t v : col_totals) {
    std::snprintf(buf, sizeof buf, "%6zu", v);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%6zu\n", confusion.total_pairs);
  out << buf;
  return out.str();
}

}  // namespace pedrole
