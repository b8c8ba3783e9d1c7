#pragma once
// Fixtures shared by the unit tests and the acceptance binary.

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <span>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pedrole/corpus.hpp"
#include "pedrole/random.hpp"

namespace pedrole::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pedrole_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string annotation_line(const std::string& doc, const std::string& annotator, const std::string& subset,
                                   RoleSet roles) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc;
  j["annotator_id"] = annotator;
  j["subset_id"] = subset;
  j["roles"] = nlohmann::json::array();
  for (Role r : roles.roles()) j["roles"].push_back(std::string(role_name(r)));
  return j.dump() + "\n";
}

/// Document text plus unanimous three-annotator labels.
struct SyntheticCorpus {
  std::vector<std::pair<std::string, std::string>> files;  // doc_id, text
  std::string annotations;
};

/// Each document carries one role drawn round-robin from `roles`; its
/// sentences use only words from that role's private vocabulary
/// ("r<role>w<j>"), so the roles are separable by construction.
inline SyntheticCorpus make_separable_corpus(std::size_t n_docs, std::span<const Role> roles, std::uint64_t seed,
                                             std::size_t vocab_per_role = 40) {
  SyntheticCorpus out;
  Rng rng(seed);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const Role role = roles[d % roles.size()];
    const std::size_t ri = role_index(role);
    char id[32];
    std::snprintf(id, sizeof id, "doc%04zu", d);
    std::string text = "Document " + std::to_string(d) + "\n";
    const std::size_t n_sent = 6 + rng.uniform_index(6);
    for (std::size_t s = 0; s < n_sent; ++s) {
      const std::size_t n_words = 5 + rng.uniform_index(5);
      for (std::size_t w = 0; w < n_words; ++w) {
        std::string word = "r" + std::to_string(ri) + "w" + std::to_string(rng.uniform_index(vocab_per_role));
        if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        text += word;
        text += w + 1 == n_words ? ". " : " ";
      }
    }
    text += "\n";
    out.files.emplace_back(id, text);
    const std::string subset = "batch" + std::to_string(d / 100);
    for (const char* a : {"a1", "a2", "a3"}) out.annotations += annotation_line(id, a, subset, RoleSet{role});
  }
  return out;
}

inline void write_corpus(const std::filesystem::path& doc_dir, const std::filesystem::path& annotations,
                         const SyntheticCorpus& corpus) {
  for (const auto& [id, text] : corpus.files) write_text(doc_dir / (id + ".txt"), text);
  write_text(annotations, corpus.annotations);
}

inline RoleSet random_roleset(Rng& rng, bool allow_empty) {
  for (;;) {
    const auto bits = static_cast<std::uint8_t>(rng.uniform_index(1u << kNumRoles));
    if (bits != 0 || allow_empty) return RoleSet::from_bits(bits);
  }
}

}  // namespace pedrole::testing
