#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "pedrole/error.hpp"
#include "pedrole/random.hpp"
#include "pedrole/textproc.hpp"

using namespace pedrole;
using Sentences = std::vector<std::string>;

TEST_CASE("split_sentences examples") {
  CHECK(split_sentences("A b. C d? E!") == Sentences{"A b.", "C d?", "E!"});
  CHECK(split_sentences("Dr. Smith ran.") == Sentences{"Dr. Smith ran."});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("   \n\t ").empty());
}

TEST_CASE("split_sentences guards abbreviations and lowercase continuations") {
  CHECK(split_sentences("See e.g. Fig. 3 for details. Then stop.") ==
        Sentences{"See e.g. Fig. 3 for details.", "Then stop."});
  CHECK(split_sentences("Smith et al. Proposed it. Done.") == Sentences{"Smith et al. Proposed it.", "Done."});
  CHECK(split_sentences("Value is 3.5 units. Next one.") == Sentences{"Value is 3.5 units.", "Next one."});
  CHECK(split_sentences("it ends. and goes on") == Sentences{"it ends. and goes on"});
  CHECK(split_sentences("He said \"Stop.\" Then left.") == Sentences{"He said \"Stop.\"", "Then left."});
  CHECK(split_sentences("Wait... Really?! Yes 2 times.") == Sentences{"Wait...", "Really?!", "Yes 2 times."});
}

TEST_CASE("split_sentences: blank lines split and whitespace collapses") {
  CHECK(split_sentences("Heading without stop\n\nBody   text\nwraps here.") ==
        Sentences{"Heading without stop", "Body text wraps here."});
}

namespace {

std::string strip_ws(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out += c;
  }
  return out;
}

}  // namespace

TEST_CASE("split_sentences covers every non-whitespace character and is idempotent") {
  Rng rng(42);
  const std::vector<std::string> pieces{"Alpha", "beta", "Dr.", "e.g.", "3.14", "end.", "Why?", "no!", "\n\n",
                                        "\"Quote.\"", "(Paren.)", "x", "Y", "  ", "\t", "etc.", "ok...", "Fig."};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const std::size_t n = rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i) {
      text += pieces[rng.uniform_index(pieces.size())];
      text += ' ';
    }
    const auto sentences = split_sentences(text);
    std::string joined;
    for (const auto& s : sentences) {
      CHECK_FALSE(s.empty());
      CHECK(s.front() != ' ');
      CHECK(s.back() != ' ');
      joined += s;
      CHECK(split_sentences(s) == Sentences{s});
    }
    CHECK(strip_ws(joined) == strip_ws(text));
    CHECK(split_sentences(text) == sentences);
  }
}

TEST_CASE("tokenize examples") {
  CHECK(tokenize("The TF--IDF scores!") == Sentences{"the", "tf", "idf", "scores"});
  CHECK(tokenize("k-means 300") == Sentences{"k", "means", "300"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("Caf\xC3\xA9 au lait") == Sentences{"caf\xC3\xA9", "au", "lait"});
}

TEST_CASE("tokenize is idempotent on its own output") {
  for (const auto& t : tokenize("Mixed CASE, with-punct 42x and MORE")) CHECK(tokenize(t) == Sentences{t});
}

TEST_CASE("contains_phrase respects word boundaries") {
  CHECK(contains_phrase("A Tutorial on Parsing", "tutorial"));
  CHECK_FALSE(contains_phrase("done manually", "manual"));
  CHECK(contains_phrase("the Software   Manual, v2", "software manual"));
  CHECK(contains_phrase("(manual)", "manual"));
  CHECK_FALSE(contains_phrase("tutorials", "tutorial"));
}

namespace {

std::vector<TokenizedDoc> docs_from(const std::vector<std::string>& texts) {
  std::vector<TokenizedDoc> out;
  for (const auto& t : texts) out.push_back(tokenize(t));
  return out;
}

}  // namespace

TEST_CASE("tfidf_fit df bounds are inclusive") {
  std::vector<std::string> texts(10, "common filler");
  texts[0] += " rare";
  for (int i = 0; i < 9; ++i) texts[i] += " most";
  const auto m = tfidf_fit(docs_from(texts));
  CHECK(m.index_of("common") == -1);  // df = 1.0
  CHECK(m.index_of("rare") >= 0);     // df = 0.1
  CHECK(m.index_of("most") >= 0);     // df = 0.9
  CHECK(m.n_docs == 10);
  CHECK_THROWS_WITH_AS(tfidf_fit(docs_from({"same words", "same words"})), "no terms within df bounds", InputError);
}

TEST_CASE("tfidf_fit vocabulary matches a brute-force df counter on 20 documents") {
  Rng rng(8);
  std::vector<TokenizedDoc> docs(20);
  for (auto& d : docs) {
    const std::size_t len = 3 + rng.uniform_index(15);
    for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(rng.uniform_index(30)));
  }
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df[t];
  }
  std::vector<std::string> expected;
  for (const auto& [t, c] : df) {
    if (c >= 2 && c <= 18) expected.push_back(t);  // 10% and 90% of 20
  }
  const auto m = tfidf_fit(docs);
  CHECK(m.vocabulary == expected);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m.doc_frequency[i] == static_cast<std::uint32_t>(df[m.vocabulary[i]]));
    CHECK(m.idf[i] > 0.0);
  }
}

TEST_CASE("tfidf_transform matches the hand formula on three documents") {
  // min_df 0, max_df 1 keeps all five terms.
  const auto docs = docs_from({"apple apple banana", "banana cherry", "apple date elder elder elder"});
  const auto m = tfidf_fit(docs, 0.0, 1.0);
  const double n = 3.0;
  auto idf = [&](double df) { return std::log((1.0 + n) / (1.0 + df)) + 1.0; };
  // Document 0: apple tf 2 (df 2), banana tf 1 (df 2).
  const double a = 2 * idf(2), b = 1 * idf(2);
  const double norm = std::sqrt(a * a + b * b);
  const auto v = tfidf_transform(m, docs[0]);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0].first == static_cast<std::uint32_t>(m.index_of("apple")));
  CHECK(v.entries[0].second == doctest::Approx(a / norm).epsilon(1e-12));
  CHECK(v.entries[1].second == doctest::Approx(b / norm).epsilon(1e-12));
  // Document 2: apple tf1 df2, date tf1 df1, elder tf3 df1.
  const double x = idf(2), y = idf(1), z = 3 * idf(1);
  const double n2 = std::sqrt(x * x + y * y + z * z);
  const auto w = tfidf_transform(m, docs[2]);
  REQUIRE(w.entries.size() == 3);
  CHECK(w.entries[0].second == doctest::Approx(x / n2).epsilon(1e-12));
  CHECK(w.entries[1].second == doctest::Approx(y / n2).epsilon(1e-12));
  CHECK(w.entries[2].second == doctest::Approx(z / n2).epsilon(1e-12));
}

TEST_CASE("tfidf_transform edge cases and norm property") {
  const auto docs = docs_from({"alpha beta", "beta gamma", "gamma delta", "delta alpha"});
  const auto m = tfidf_fit(docs, 0.0, 1.0);
  CHECK(tfidf_transform(m, tokenize("unknown words only")).empty());
  const auto single = tfidf_transform(m, tokenize("alpha alpha alpha"));
  REQUIRE(single.entries.size() == 1);
  CHECK(single.entries[0].second == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(1);
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "zeta"};
  for (int i = 0; i < 200; ++i) {
    TokenizedDoc d;
    for (std::size_t k = rng.uniform_index(6); k > 0; --k) d.push_back(words[rng.uniform_index(words.size())]);
    const double norm = tfidf_transform(m, d).norm();
    CHECK((std::fabs(norm) < 1e-9 || std::fabs(norm - 1.0) < 1e-9));
  }
}

TEST_CASE("tfidf model JSON round trip and refit determinism") {
  const auto docs = docs_from({"a b c", "b c d", "c d e", "d e a"});
  const auto m = tfidf_fit(docs, 0.0, 1.0);
  const auto back = tfidf_from_json(tfidf_to_json(m));
  CHECK(back.vocabulary == m.vocabulary);
  CHECK(back.doc_frequency == m.doc_frequency);
  CHECK(back.idf == m.idf);
  CHECK(tfidf_to_json(tfidf_fit(docs, 0.0, 1.0)) == tfidf_to_json(m));
  const auto dense = tfidf_dense(m, docs);
  CHECK(dense.rows() == 4);
  CHECK(dense.cols() == m.size());
}
