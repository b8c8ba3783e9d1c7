#include "pedrole/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "pedrole/error.hpp"
#include "pedrole/textproc.hpp"

namespace pedrole {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("cannot read file " + path.string());
  return ss.str();
}

}  // namespace

const Document* RawCorpus::find(std::string_view doc_id) const {
  auto it = std::lower_bound(documents.begin(), documents.end(), doc_id,
                             [](const Document& d, std::string_view id) { return d.doc_id < id; });
  if (it == documents.end() || it->doc_id != doc_id) return nullptr;
  return &*it;
}

Document parse_document(std::string doc_id, std::string_view text) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  const std::size_t eol = text.find('\n');
  std::string_view title = text.substr(0, eol);
  while (!title.empty() && (title.back() == '\r' || title.back() == ' ' || title.back() == '\t')) {
    title.remove_suffix(1);
  }
  doc.title = std::string(title);
  if (eol != std::string_view::npos) doc.sentences = split_sentences(text.substr(eol + 1));
  if (doc.sentences.empty()) throw InputError("document " + doc.doc_id + " has no sentences");
  return doc;
}

AnnotationRecord parse_annotation_line(std::string_view line) {
  AnnotationRecord rec;
  try {
    const auto j = nlohmann::json::parse(line);
    rec.doc_id = j.at("doc_id").get<std::string>();
    rec.annotator_id = j.at("annotator_id").get<std::string>();
    rec.subset_id = j.at("subset_id").get<std::string>();
    for (const auto& name : j.at("roles")) rec.roles.insert(role_from_string(name.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed annotation record: ") + e.what());
  }
  if (rec.roles.empty()) {
    throw InputError("annotation for doc_id " + rec.doc_id + " by " + rec.annotator_id + " has no roles");
  }
  return rec;
}

std::vector<AnnotationRecord> load_annotations(const fs::path& file) {
  if (!fs::exists(file)) throw InputError("annotations file not found: " + file.string());
  std::ifstream in(file);
  if (!in) throw InputError("cannot read file " + file.string());

  std::vector<AnnotationRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotationRecord rec;
    try {
      rec = parse_annotation_line(line);
    } catch (const InputError& e) {
      throw InputError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.emplace(rec.doc_id, rec.annotator_id).second) {
      throw InputError("duplicate annotation for doc_id " + rec.doc_id + " by annotator " + rec.annotator_id);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Document> load_documents(const fs::path& doc_dir) {
  if (!fs::is_directory(doc_dir)) throw InputError("document directory not found: " + doc_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(doc_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> documents;
  for (const auto& path : files) {
    Document doc = parse_document(path.stem().string(), read_file(path));
    doc.source_tag = path.filename().string();
    documents.push_back(std::move(doc));
  }
  std::sort(documents.begin(), documents.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return documents;
}

RawCorpus load_corpus(const fs::path& doc_dir, const fs::path& annotations_file) {
  RawCorpus corpus;
  corpus.records = load_annotations(annotations_file);
  corpus.documents = load_documents(doc_dir);
  for (const auto& rec : corpus.records) {
    if (corpus.find(rec.doc_id) == nullptr) throw InputError("unknown doc_id " + rec.doc_id);
  }
  return corpus;
}

std::optional<RoleSet> resolve_majority(std::span<const AnnotationRecord> records, std::size_t n_annotators) {
  if (records.empty()) throw InputError("resolve_majority: no annotation records");
  const std::size_t need = majority_threshold(n_annotators);
  std::array<std::size_t, kNumRoles> votes{};
  for (const auto& rec : records) {
    if (rec.doc_id != records.front().doc_id) {
      throw InputError("resolve_majority: records span doc_ids " + records.front().doc_id + " and " + rec.doc_id);
    }
    for (Role r : rec.roles.roles()) ++votes[role_index(r)];
  }
  RoleSet out;
  for (Role r : kAllRoles) {
    if (votes[role_index(r)] >= need) out.insert(r);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<RoleSet> resolve_majority(std::span<const AnnotationRecord> records) {
  std::set<std::string_view> annotators;
  for (const auto& rec : records) annotators.insert(rec.annotator_id);
  return resolve_majority(records, annotators.size());
}

std::vector<std::pair<std::string, std::vector<AnnotationRecord>>> group_by_document(
    std::span<const AnnotationRecord> records) {
  std::map<std::string, std::vector<AnnotationRecord>> by_doc;
  for (const auto& rec : records) by_doc[rec.doc_id].push_back(rec);
  std::vector<std::pair<std::string, std::vector<AnnotationRecord>>> out;
  out.reserve(by_doc.size());
  for (auto& [id, recs] : by_doc) {
    std::sort(recs.begin(), recs.end(),
              [](const AnnotationRecord& a, const AnnotationRecord& b) { return a.annotator_id < b.annotator_id; });
    out.emplace_back(id, std::move(recs));
  }
  return out;
}

LabeledCorpus label_corpus(const RawCorpus& raw) {
  LabeledCorpus out;
  const auto groups = group_by_document(raw.records);
  std::set<std::string_view> annotated;
  for (const auto& [doc_id, recs] : groups) {
    annotated.insert(doc_id);
    const auto roles = resolve_majority(recs);
    if (!roles) {
      ++out.filtered;
      continue;
    }
    const Document* doc = raw.find(doc_id);
    if (doc == nullptr) throw InputError("unknown doc_id " + doc_id);
    out.documents.push_back({*doc, *roles, recs.front().subset_id, recs.size()});
  }
  for (const auto& doc : raw.documents) {
    if (!annotated.contains(doc.doc_id)) ++out.unannotated;
  }
  return out;
}

double StatsReport::share_with_at_most(std::size_t k) const {
  if (n_documents == 0) return 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(k, kNumRoles); ++i) n += roles_per_doc_histogram[i];
  return static_cast<double>(n) / static_cast<double>(n_documents);
}

StatsReport corpus_stats(const LabeledCorpus& corpus) {
  StatsReport s;
  s.n_documents = corpus.documents.size();
  s.filtered_documents = corpus.filtered;
  std::map<std::uint8_t, std::size_t> combos;
  for (const auto& ld : corpus.documents) {
    const std::size_t k = ld.roles.size();
    s.total_role_annotations += k;
    ++s.roles_per_doc_histogram[k - 1];
    for (Role r : ld.roles.roles()) ++s.role_counts[role_index(r)];
    if (k > 1) ++combos[ld.roles.bits()];
    if (ld.n_annotators > 1) {
      ++s.multi_annotated_documents;
      s.multi_annotated_role_annotations += k;
    }
  }
  for (const auto& [bits, count] : combos) s.combination_counts.emplace_back(RoleSet::from_bits(bits), count);
  std::stable_sort(s.combination_counts.begin(), s.combination_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return s;
}

std::string stats_to_json(const StatsReport& stats) {
  nlohmann::ordered_json j;
  j["n_documents"] = stats.n_documents;
  j["total_role_annotations"] = stats.total_role_annotations;
  j["filtered_documents"] = stats.filtered_documents;
  j["multi_annotated_documents"] = stats.multi_annotated_documents;
  j["multi_annotated_role_annotations"] = stats.multi_annotated_role_annotations;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (Role r : kAllRoles) counts[std::string(role_name(r))] = stats.role_counts[role_index(r)];
  j["role_counts"] = counts;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < kNumRoles; ++k) hist[std::to_string(k + 1)] = stats.roles_per_doc_histogram[k];
  j["roles_per_doc_histogram"] = hist;
  nlohmann::ordered_json combos = nlohmann::ordered_json::object();
  for (const auto& [set, count] : stats.combination_counts) combos[set.to_string()] = count;
  j["combination_counts"] = combos;
  return j.dump(2) + "\n";
}

std::string stats_to_text(const StatsReport& stats) {
  std::ostringstream out;
  char buf[128];
  out << "documents: " << stats.n_documents << "  role annotations: " << stats.total_role_annotations
      << "  filtered: " << stats.filtered_documents << "\n\n";
  out << "role counts\n";
  for (Role r : kAllRoles) {
    std::snprintf(buf, sizeof buf, "  %-18s %6zu\n", std::string(role_name(r)).c_str(),
                  stats.role_counts[role_index(r)]);
    out << buf;
  }
  out << "\nroles per document\n";
  for (std::size_t k = 0; k < kNumRoles; ++k) {
    std::snprintf(buf, sizeof buf, "  %zu %6zu\n", k + 1, stats.roles_per_doc_histogram[k]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "  one role: %.1f%%  one or two: %.1f%%\n", 100.0 * stats.share_with_at_most(1),
                100.0 * stats.share_with_at_most(2));
  out << buf;
  out << "\nmulti-role combinations\n";
  for (const auto& [set, count] : stats.combination_counts) {
    std::snprintf(buf, sizeof buf, "  %6zu  ", count);
    out << buf << set.to_string() << "\n";
  }
  return out.str();
}

}  // namespace pedrole
