#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "unifsel/bayesnet.hpp"
#include "unifsel/dataset.hpp"
#include "unifsel/prng.hpp"

using namespace unifsel;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("csv codes follow first appearance") {
  const std::string text =
      "c1,c2,c3\n"
      "a,x,0\n"
      "b,y,1\n"
      "a,z,0\n"
      "b,x,1\n";
  const auto data = load_csv_text(text, "c3");
  CHECK(data.cardinalities == std::vector<int>{2, 3, 2});
  CHECK(data.class_index == 2);
  CHECK(data.columns[0] == std::vector<std::int32_t>{0, 1, 0, 1});
  CHECK(data.columns[1] == std::vector<std::int32_t>{0, 1, 2, 0});
  CHECK(data.decode(1, 2) == "z");
}

TEST_CASE("csv resolves class by index and rejects bad specs") {
  const std::string text = "a,b\n1,x\n2,y\n";
  const auto data = load_csv_text(text, "1");
  CHECK(data.class_index == 1);
  CHECK_THROWS_WITH_AS(load_csv_text(text, "missing"), doctest::Contains("does not resolve"),
                       std::runtime_error);
}

TEST_CASE("csv rejects degenerate inputs") {
  CHECK_THROWS_WITH_AS(load_csv_text("a,b\n0,1\n", "b"), doctest::Contains("fewer than 2 rows"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_csv_text("a,b\n0\n1,2\n", "b"), doctest::Contains("ragged"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_csv_text("a,b\n0,\n1,2\n", "b"), doctest::Contains("missing value"),
                       std::runtime_error);
  CHECK_THROWS(load_csv("/nonexistent/file.csv", "a"));
}

TEST_CASE("quoted fields parse") {
  const auto data = load_csv_text("a,b\n\"x,1\",0\n\"he said \"\"hi\"\"\",1\n", "b");
  CHECK(data.levels[0][0] == "x,1");
  CHECK(data.levels[0][1] == "he said \"hi\"");
}

TEST_CASE("alarm sample round-trips through save/load bit-exactly") {
  auto bn = load_network(std::string(UNIFSEL_DATA_DIR) + "/alarm.json");
  const auto data = forward_sample(bn, 200, 7, bn.node_index("HR"));
  CHECK(data.n_columns() == 37);
  CHECK(data.class_cardinality() == 3);
  const std::string path = temp_path("unifsel_roundtrip.json");
  save_dataset_json(data, path);
  const auto back = load_dataset_json(path);
  CHECK(back.feature_names == data.feature_names);
  CHECK(back.cardinalities == data.cardinalities);
  CHECK(back.class_index == data.class_index);
  CHECK(back.columns == data.columns);
  CHECK(back.levels == data.levels);
  std::remove(path.c_str());
}

TEST_CASE("encoding is injective per column") {
  const auto data = load_csv_text("u,v\nred,0\ngreen,1\nblue,0\nred,1\n", "v");
  for (std::size_t c = 0; c < data.n_columns(); ++c) {
    std::set<std::string> seen;
    for (int code = 0; code < data.cardinalities[c]; ++code)
      CHECK(seen.insert(data.decode(static_cast<int>(c), code)).second);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      // decode of the stored code recovers the raw cell
      const auto raw = data.decode(static_cast<int>(c), data.columns[c][r]);
      CHECK(data.levels[c][data.columns[c][r]] == raw);
    }
  }
}

TEST_CASE("equal-frequency split of 1..10 into two bins") {
  std::string text = "x,y\n";
  for (int i = 1; i <= 10; ++i) text += std::to_string(i) + "," + std::to_string(i % 2) + "\n";
  const auto data = load_csv_text(text, "y");
  const auto eqf = discretize(data, 2, BinStrategy::EqualFrequency);
  const auto eqw = discretize(data, 2, BinStrategy::EqualWidth);
  for (std::size_t r = 0; r < 10; ++r) {
    CHECK(eqf.columns[0][r] == (r < 5 ? 0 : 1));
    CHECK(eqw.columns[0][r] == (r < 5 ? 0 : 1));
  }
  CHECK(eqf.cardinalities[0] == 2);
}

TEST_CASE("constant numeric column collapses with a warning") {
  std::string text = "x,y\n";
  for (int i = 0; i < 6; ++i) text += "3.5," + std::to_string(i % 2) + "\n";
  const auto data = load_csv_text(text, "y");
  std::vector<DiscretizeWarning> warnings;
  const auto out = discretize(data, 5, BinStrategy::EqualFrequency, &warnings);
  CHECK(out.cardinalities[0] == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].column == 0);
}

TEST_CASE("discretize rejects bins < 2 and skips categorical columns") {
  const auto data = load_csv_text("x,y\nfoo,0\nbar,1\n", "y");
  CHECK_THROWS_AS(discretize(data, 1, BinStrategy::EqualWidth), std::invalid_argument);
  const auto out = discretize(data, 3, BinStrategy::EqualWidth);
  CHECK(out.columns[0] == data.columns[0]);
}

TEST_CASE("ties stay in one equal-frequency bin") {
  std::string text = "x,y\n";
  for (int i = 0; i < 8; ++i) text += std::string(i < 6 ? "1" : "9") + "," + std::to_string(i % 2) + "\n";
  const auto out = discretize(load_csv_text(text, "y"), 2, BinStrategy::EqualFrequency);
  for (std::size_t r = 0; r < 8; ++r) CHECK(out.columns[0][r] == (r < 6 ? 0 : 1));
}

TEST_CASE("folds: one row per fold when k equals m") {
  std::string text = "x,y\n";
  for (int i = 0; i < 10; ++i) text += std::to_string(i) + "," + std::to_string(i % 2) + "\n";
  const auto data = load_csv_text(text, "y");
  const auto plan = make_folds(data, 10, 3);
  std::set<int> used(plan.assignments.begin(), plan.assignments.end());
  CHECK(used.size() == 10);
}

TEST_CASE("folds are deterministic per seed") {
  std::string text = "x,y\n";
  for (int i = 0; i < 40; ++i) text += std::to_string(i % 7) + "," + std::to_string(i % 2) + "\n";
  const auto data = load_csv_text(text, "y");
  CHECK(make_folds(data, 5, 11).assignments == make_folds(data, 5, 11).assignments);
  CHECK(make_folds(data, 5, 11).assignments != make_folds(data, 5, 12).assignments);
}

TEST_CASE("stratification: 50/50 labels spread 5+5 per fold") {
  std::string text = "x,y\n";
  for (int i = 0; i < 100; ++i) text += std::to_string(i) + "," + std::to_string(i < 50 ? 0 : 1) + "\n";
  const auto data = load_csv_text(text, "y");
  const auto plan = make_folds(data, 10, 42);
  std::vector<std::vector<int>> counts(10, std::vector<int>(2, 0));
  for (std::size_t r = 0; r < 100; ++r) ++counts[plan.assignments[r]][data.columns[1][r]];
  for (int f = 0; f < 10; ++f) {
    CHECK(counts[f][0] == 5);
    CHECK(counts[f][1] == 5);
  }
}

TEST_CASE("fold class proportions stay within one row of balance") {
  Prng rng(5);
  std::string text = "x,y\n";
  const int m = 83;
  for (int i = 0; i < m; ++i)
    text += std::to_string(rng.below(4)) + "," + std::to_string(rng.below(3)) + "\n";
  const auto data = load_csv_text(text, "y");
  const int k = 7;
  const auto plan = make_folds(data, k, 9);
  std::vector<std::vector<int>> counts(k, std::vector<int>(3, 0));
  for (int r = 0; r < m; ++r) ++counts[plan.assignments[r]][data.columns[1][r]];
  for (int label = 0; label < 3; ++label) {
    int lo = m, hi = 0;
    for (int f = 0; f < k; ++f) {
      lo = std::min(lo, counts[f][label]);
      hi = std::max(hi, counts[f][label]);
    }
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("make_folds rejects k out of range") {
  const auto data = load_csv_text("x,y\n0,0\n1,1\n2,0\n", "y");
  CHECK_THROWS_AS(make_folds(data, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_folds(data, 4, 0), std::invalid_argument);
}
