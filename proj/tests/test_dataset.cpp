#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ruleforge/dataset.hpp"
#include "test_support.hpp"

using namespace ruleforge;

TEST_CASE("load_csv: numeric columns and first-appearance label mapping") {
  const std::string path = testsup::write_temp_file(
      "rf_basic.csv", "a,b,cls\n1.0,2.0,yes\n3.5,-1.0,no\n0.25,4.0,yes\n");
  const Dataset d = load_csv(path, "cls");
  CHECK(d.m == 3);
  CHECK(d.p == 2);
  CHECK(d.K == 2);
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.class_names == std::vector<std::string>{"yes", "no"});
  CHECK(d.at(1, 0) == doctest::Approx(3.5));
}

TEST_CASE("load_csv: ordinal encoding of categorical columns") {
  const std::string path = testsup::write_temp_file(
      "rf_cat.csv", "color,cls\nred,a\nblue,b\nred,a\n");
  const Dataset d = load_csv(path, "cls");
  // blue < red lexicographically.
  CHECK(d.at(0, 0) == 1.0);
  CHECK(d.at(1, 0) == 0.0);
  CHECK(d.at(2, 0) == 1.0);
  CHECK(d.encodings[0].categorical);
  CHECK(d.encodings[0].values == std::vector<std::string>{"blue", "red"});
}

TEST_CASE("load_csv: error paths") {
  CHECK_THROWS_WITH_AS(load_csv("/nonexistent/file.csv", "y"),
                       doctest::Contains("cannot open"), std::runtime_error);

  const std::string no_label = testsup::write_temp_file("rf_nolabel.csv", "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(no_label, "cls"), doctest::Contains("not found"),
                       std::runtime_error);

  const std::string empty = testsup::write_temp_file("rf_empty.csv", "a,cls\n");
  CHECK_THROWS_WITH_AS(load_csv(empty, "cls"), doctest::Contains("no data rows"),
                       std::runtime_error);

  const std::string mixed = testsup::write_temp_file(
      "rf_mixed.csv", "a,cls\n1.5,x\nred,y\n2.0,x\n");
  CHECK_THROWS_WITH_AS(load_csv(mixed, "cls"), doctest::Contains("mixes numeric"),
                       std::runtime_error);

  const std::string one_class = testsup::write_temp_file("rf_oneclass.csv", "a,cls\n1,x\n2,x\n");
  CHECK_THROWS(load_csv(one_class, "cls"));
}

TEST_CASE("load_csv: label column by index and quoted fields") {
  const std::string path = testsup::write_temp_file(
      "rf_quoted.csv", "y,desc\n1,\"hello, world\"\n0,\"say \"\"hi\"\"\"\n1,plain\n");
  const Dataset d = load_csv(path, "0");
  CHECK(d.m == 3);
  CHECK(d.p == 1);
  CHECK(d.encodings[0].categorical);
  CHECK(d.class_names == std::vector<std::string>{"1", "0"});
}

TEST_CASE("encoding round-trip: metadata re-encodes rows identically") {
  const std::string path = testsup::write_temp_file(
      "rf_roundtrip.csv", "num,cat,cls\n1.25,red,a\n-3.0,blue,b\n0.5,green,a\n");
  const Dataset d = load_csv(path, "cls");
  CHECK(d.encodings[0].encode("1.25") == d.at(0, 0));
  CHECK(d.encodings[1].encode("red") == d.at(0, 1));
  CHECK(d.encodings[1].encode("green") == d.at(2, 1));
  CHECK_THROWS(d.encodings[1].encode("purple"));
}

TEST_CASE("banknote characteristics when the data file is present") {
  if (!testsup::data_file_exists("banknote.csv")) {
    MESSAGE("data/banknote.csv not present; see data/README.md");
    return;
  }
  const Dataset d = load_csv(testsup::data_path("banknote.csv"), "class");
  CHECK(d.m == 1372);
  CHECK(d.p == 4);
  CHECK(d.K == 2);
}

TEST_CASE("stratified_kfold: exact balance when forced") {
  // 5 of class A, 5 of class B, k=5 -> every fold has exactly one of each.
  std::vector<double> x(10, 0.0);
  for (std::size_t i = 0; i < 10; ++i) x[i] = static_cast<double>(i);
  std::vector<int> y{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const Dataset d = make_dataset(x, y, 1, 2);
  const FoldPlan plan = stratified_kfold(d, 5, 7);
  for (int fold = 0; fold < 5; ++fold) {
    int a = 0, b = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      if (plan.assignments[i] != fold) continue;
      (d.labels[i] == 0 ? a : b) += 1;
    }
    CHECK(a == 1);
    CHECK(b == 1);
  }
}

TEST_CASE("stratified_kfold: per-class counts within one of m_class/k") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 20 + rng.below(80);
    const std::size_t K = 2 + rng.below(3);
    const Dataset d = testsup::random_dataset(rng, m, 2, K);
    const int k = 2 + static_cast<int>(rng.below(6));
    const FoldPlan plan = stratified_kfold(d, k, 1234 + trial);

    for (std::size_t cls = 0; cls < K; ++cls) {
      int m_class = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (d.labels[i] == static_cast<int>(cls)) ++m_class;
      for (int fold = 0; fold < k; ++fold) {
        int count = 0;
        for (std::size_t i = 0; i < m; ++i)
          if (plan.assignments[i] == fold && d.labels[i] == static_cast<int>(cls)) ++count;
        const double expected = static_cast<double>(m_class) / k;
        CHECK(std::fabs(count - expected) <= 1.0);
      }
    }
    // Folds partition the samples.
    for (int a : plan.assignments) CHECK((a >= 0 && a < k));
  }
}

TEST_CASE("stratified_kfold: leave-one-out and determinism") {
  Rng rng(5);
  const Dataset d = testsup::random_dataset(rng, 12, 2, 2);
  const FoldPlan loo = stratified_kfold(d, 12, 3);
  std::set<int> folds(loo.assignments.begin(), loo.assignments.end());
  CHECK(folds.size() == 12);  // one sample per fold

  const FoldPlan p1 = stratified_kfold(d, 4, 42);
  const FoldPlan p2 = stratified_kfold(d, 4, 42);
  CHECK(p1.assignments == p2.assignments);
  const FoldPlan p3 = stratified_kfold(d, 4, 43);
  CHECK(p1.assignments != p3.assignments);

  CHECK_THROWS(stratified_kfold(d, 13, 1));  // k > m
}

TEST_CASE("grid_search: single combination, tie-break, run count") {
  Rng rng(11);
  const Dataset d = testsup::random_dataset(rng, 40, 3, 2);
  FoldPlan plan = stratified_kfold(d, 4, 9);

  std::vector<HyperParams> one{{3, 0, 0}};
  const auto r1 = grid_search(d, one, plan,
                              [](const Dataset&, const Dataset&, const HyperParams&, std::uint64_t) {
                                return 0.5;
                              });
  CHECK(r1.best == one[0]);

  // Two combinations with equal mean accuracy -> first in grid order.
  std::vector<HyperParams> two{{1, 0, 0}, {2, 0, 0}};
  const auto r2 = grid_search(d, two, plan,
                              [](const Dataset&, const Dataset&, const HyperParams&, std::uint64_t) {
                                return 0.75;
                              });
  CHECK(r2.best == two[0]);

  // 3x3 grid over a 4-fold plan -> 36 runs recorded.
  std::vector<HyperParams> grid;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) grid.push_back(HyperParams{a, b, 0});
  const auto r3 = grid_search(d, grid, plan,
                              [](const Dataset&, const Dataset&, const HyperParams& hp,
                                 std::uint64_t) { return hp.max_depth == 2 ? 0.9 : 0.1; });
  CHECK(r3.runs.size() == 36);
  CHECK(r3.best.max_depth == 2);
  CHECK(r3.best.n_trees == 1);

  // Trainer failure carries fold context.
  CHECK_THROWS_WITH_AS(
      grid_search(d, one, plan,
                  [](const Dataset&, const Dataset&, const HyperParams&, std::uint64_t) -> double {
                    throw std::runtime_error("boom");
                  }),
      doctest::Contains("fold"), std::runtime_error);
}

TEST_CASE("subset preserves schema and copies rows") {
  Rng rng(21);
  const Dataset d = testsup::random_dataset(rng, 10, 3, 2);
  const std::vector<int> ids{7, 2, 4};
  const Dataset s = d.subset(ids);
  CHECK(s.m == 3);
  CHECK(s.K == d.K);
  CHECK(s.at(0, 1) == d.at(7, 1));
  CHECK(s.labels[1] == d.labels[2]);
}
