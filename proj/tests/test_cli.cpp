#include "doctest.h"

#include <sstream>

#include "pedrole/cli.hpp"
#include "support.hpp"

using namespace pedrole;
using pedrole::testing::read_text;
using pedrole::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pedrole");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Fixture {
  TempDir dir{"cli"};
  std::string docs = (dir / "docs").string();
  std::string ann = (dir / "ann.jsonl").string();
  std::string out = (dir / "out").string();

  Fixture() {
    const std::vector<Role> roles{Role::Survey, Role::Tutorial, Role::Resource};
    pedrole::testing::write_corpus(dir / "docs", dir / "ann.jsonl",
                                   pedrole::testing::make_separable_corpus(30, roles, 4));
  }
};

}  // namespace

TEST_CASE("stats writes JSON whose role counts sum to the annotation total") {
  Fixture f;
  const auto r = run({"stats", "--docs", f.docs, "--annotations", f.ann, "--out", f.out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_text(f.dir / "out" / "stats.json"));
  std::size_t sum = 0;
  for (const auto& [name, v] : j["role_counts"].items()) sum += v.get<std::size_t>();
  CHECK(sum == j["total_role_annotations"].get<std::size_t>());
  CHECK(sum == 30);
  CHECK(r.out.find("stats:") == 0);
}

TEST_CASE("missing annotations file exits 2 with a message") {
  Fixture f;
  const auto r = run({"stats", "--docs", f.docs, "--annotations", (f.dir / "nope.jsonl").string(), "--out", f.out});
  CHECK(r.code == 2);
  CHECK(r.err.find("annotations file not found") != std::string::npos);
}

TEST_CASE("kappa on unanimous annotations is 1") {
  Fixture f;
  const auto r = run({"kappa", "--annotations", f.ann, "--out", f.out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_text(f.dir / "out" / "agreement.json"));
  CHECK(j["mean_kappa"].get<double>() == 1.0);
}

TEST_CASE("cluster then featurize: rows sum to one") {
  Fixture f;
  auto r = run({"cluster", "--docs", f.docs, "--encoder", "builtin", "--dim", "32", "--clusters", "6", "--seed", "3",
                "--out", f.out});
  REQUIRE(r.code == 0);
  r = run({"featurize", "--docs", f.docs, "--encoder", "builtin", "--dim", "32", "--seed", "3", "--out", f.out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_text(f.dir / "out" / "bosec.json"));
  CHECK(j.size() == 30);
  for (const auto& [id, row] : j.items()) {
    double s = 0;
    for (const auto& v : row) s += v.get<double>();
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  r = run({"affinity", "--docs", f.docs, "--annotations", f.ann, "--encoder", "builtin", "--dim", "32", "--seed", "3",
           "--out", f.out});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(f.dir / "out" / "affinity.json"));
}

TEST_CASE("cluster with more clusters than vectors fails") {
  Fixture f;
  const auto r = run({"cluster", "--docs", f.docs, "--encoder", "builtin", "--clusters", "100000", "--seed", "1",
                      "--out", f.out});
  CHECK(r.code == 2);
  CHECK(r.err.find("fewer vectors than clusters") != std::string::npos);
}

TEST_CASE("configuration errors exit 3") {
  Fixture f;
  auto r = run({"eval", "--docs", f.docs, "--annotations", f.ann, "--method", "knn", "--seed", "1", "--out", f.out});
  CHECK(r.code == 3);
  CHECK(r.err.find("--encoder builtin") != std::string::npos);
  r = run({"eval", "--docs", f.docs, "--annotations", f.ann, "--method", "keyphrase", "--out", f.out});
  CHECK(r.code == 3);
  CHECK(r.err.find("--seed") != std::string::npos);
  r = run({"eval", "--method", "bogus"});
  CHECK(r.code == 3);
  r = run({});
  CHECK(r.code == 3);
}

TEST_CASE("eval --method all writes four reports and is byte-identical across runs") {
  Fixture f;
  const std::vector<std::string> args{"eval",    "--docs", f.docs, "--annotations", f.ann, "--encoder", "builtin",
                                      "--dim",   "32",     "--clusters", "6", "--seed", "11", "--method", "all",
                                      "--out",   f.out};
  REQUIRE(run(args).code == 0);
  std::map<std::string, std::string> first;
  for (const char* m : {"rf", "cen", "knn", "keyphrase"}) {
    const auto path = f.dir / "out" / ("eval_" + std::string(m) + ".json");
    REQUIRE(std::filesystem::exists(path));
    first[m] = read_text(path) + read_text(f.dir / "out" / ("eval_" + std::string(m) + ".txt"));
  }
  auto again = args;
  again.push_back("--threads");
  again.push_back("1");
  REQUIRE(run(again).code == 0);
  for (const auto& [m, text] : first) {
    CHECK(read_text(f.dir / "out" / ("eval_" + m + ".json")) + read_text(f.dir / "out" / ("eval_" + m + ".txt")) ==
          text);
  }
  const auto j = nlohmann::json::parse(read_text(f.dir / "out" / "eval_knn.json"));
  CHECK(j["seeds"]["run"] == 11);
  CHECK(j["seeds"].contains("encoder"));
}
