#include <set>

#include "doctest.h"
#include "ruleforge/forest.hpp"
#include "ruleforge/rules.hpp"
#include "test_support.hpp"

using namespace ruleforge;

namespace {

RulePool pool_from_tree(const TreeNode& tree, const Dataset& d, Criterion c = Criterion::gini) {
  return dedup(extract_rules(tree, d, c), c, d.p, d.K);
}

Rule make_rule(std::vector<FeatureInterval> intervals, std::vector<int> counts) {
  Rule r;
  r.intervals = std::move(intervals);
  r.class_counts = std::move(counts);
  return r;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("extract_rules: depth-1 tree gives the two half-spaces") {
  const Dataset d = make_dataset({1.0, 3.0}, {0, 1}, 1, 2);
  const std::vector<double> w{1.0, 1.0};
  TreeParams params;
  params.max_depth = 1;
  const TreeNode tree = fit_tree(d, w, params);
  const auto rules = extract_rules(tree, d, Criterion::gini);
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].intervals.size() == 1);
  CHECK(rules[0].intervals[0].interval.upper == doctest::Approx(2.0));
  CHECK(!rules[0].intervals[0].interval.has_lower());
  CHECK(rules[1].intervals[0].interval.lower == doctest::Approx(2.0));
  CHECK(!rules[1].intervals[0].interval.has_upper());
  CHECK(rules[0].covered_ids == std::vector<int>{0});
  CHECK(rules[1].covered_ids == std::vector<int>{1});
}

TEST_CASE("extract_rules: repeated clauses on one feature intersect") {
  // Hand-built tree: x0 <= 5 then x0 <= 3.
  TreeNode root;
  root.feature_index = 0;
  root.threshold = 5.0;
  root.left = std::make_unique<TreeNode>();
  root.left->feature_index = 0;
  root.left->threshold = 3.0;
  root.left->left = std::make_unique<TreeNode>();
  root.left->right = std::make_unique<TreeNode>();
  root.right = std::make_unique<TreeNode>();

  const Dataset d = make_dataset({1.0, 4.0, 6.0}, {0, 1, 0}, 1, 2);
  const auto rules = extract_rules(root, d, Criterion::gini);
  REQUIRE(rules.size() == 3);
  // Leftmost leaf: x0 in (-inf, 3].
  CHECK(rules[0].intervals.size() == 1);
  CHECK(!rules[0].intervals[0].interval.has_lower());
  CHECK(rules[0].intervals[0].interval.upper == 3.0);
  // Middle leaf: (3, 5].
  CHECK(rules[1].intervals[0].interval.lower == 3.0);
  CHECK(rules[1].intervals[0].interval.upper == 5.0);
}

TEST_CASE("satisfies: boundary semantics") {
  const Rule r1 = make_rule({{0, Interval{-kInf, 2.0}}}, {1, 0});
  CHECK(satisfies(r1, std::vector<double>{1.5}));
  CHECK(satisfies(r1, std::vector<double>{2.0}));   // closed upper
  CHECK(!satisfies(r1, std::vector<double>{2.5}));

  const Rule r2 = make_rule({{0, Interval{-kInf, 2.0}}, {1, Interval{0.0, kInf}}}, {1, 0});
  CHECK(!satisfies(r2, std::vector<double>{1.5, 0.0}));  // strict lower
  CHECK(satisfies(r2, std::vector<double>{1.5, 0.1}));

  const Rule empty = make_rule({}, {1, 0});  // root leaf
  CHECK(satisfies(empty, std::vector<double>{123.0, -5.0}));
}

TEST_CASE("rule consistency: stored stats reproduce from scratch") {
  Rng rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const Dataset d = testsup::random_dataset(rng, 40, 3, 3);
    const std::vector<double> w(d.m, 1.0);
    TreeParams params;
    params.max_depth = 3;
    const TreeNode tree = fit_tree(d, w, params);
    for (const Rule& rule : extract_rules(tree, d, Criterion::gini)) {
      std::vector<int> covered;
      std::vector<int> counts(d.K, 0);
      for (std::size_t i = 0; i < d.m; ++i) {
        if (!satisfies(rule, d.row(i))) continue;
        covered.push_back(static_cast<int>(i));
        counts[static_cast<std::size_t>(d.labels[i])] += 1;
      }
      CHECK(covered == rule.covered_ids);
      CHECK(counts == rule.class_counts);
      std::vector<double> totals(counts.begin(), counts.end());
      CHECK(rule.impurity == doctest::Approx(weighted_impurity(totals, Criterion::gini)));
      int total = 0;
      for (int c : counts) total += c;
      CHECK(total == rule.n_covered());
      CHECK(total >= 1);
    }
  }
}

TEST_CASE("single-tree pool: partition property") {
  Rng rng(29);
  const Dataset d = testsup::random_dataset(rng, 60, 3, 2);
  const std::vector<double> w(d.m, 1.0);
  TreeParams params;
  params.max_depth = 4;
  const TreeNode tree = fit_tree(d, w, params);
  const RulePool pool = pool_from_tree(tree, d);

  std::size_t covered_total = 0;
  for (const Rule& r : pool.rules) covered_total += r.covered_ids.size();
  CHECK(covered_total == d.m);

  for (std::size_t i = 0; i < d.m; ++i) {
    const auto out = predict(pool, d.row(i), false);
    CHECK(!out.was_missed);
  }
}

TEST_CASE("build_coverage: counts and error contract") {
  Rng rng(37);
  const Dataset d = testsup::random_dataset(rng, 30, 2, 2);
  const std::vector<double> w(d.m, 1.0);
  TreeParams params;
  params.max_depth = 3;

  // One tree: every sample covered exactly once.
  const TreeNode t1 = fit_tree(d, w, params);
  const RulePool p1 = pool_from_tree(t1, d);
  const CoverProblem c1 = build_coverage(p1, d);
  for (int i = 0; i < c1.m; ++i) CHECK(c1.covered_by[static_cast<std::size_t>(i)].size() == 1);

  // T trees, no dedup: every sample covered exactly T times.
  std::vector<Rule> all;
  const int T = 3;
  for (int t = 0; t < T; ++t) {
    TreeParams tp = params;
    tp.max_depth = 2 + t;
    auto rules = extract_rules(fit_tree(d, w, tp), d, Criterion::gini, t);
    all.insert(all.end(), rules.begin(), rules.end());
  }
  RulePool raw;  // no dedup on purpose
  raw.criterion = Criterion::gini;
  raw.p = d.p;
  raw.K = d.K;
  raw.rules = all;
  const CoverProblem cT = build_coverage(raw, d);
  for (int i = 0; i < cT.m; ++i)
    CHECK(cT.covered_by[static_cast<std::size_t>(i)].size() == static_cast<std::size_t>(T));

  // Remove the rules containing sample 7 -> failure naming sample 7.
  RulePool missing = p1;
  std::erase_if(missing.rules, [](const Rule& r) {
    return std::find(r.covered_ids.begin(), r.covered_ids.end(), 7) != r.covered_ids.end();
  });
  CHECK_THROWS_WITH_AS(build_coverage(missing, d), doctest::Contains("sample 7"),
                       std::runtime_error);
}

TEST_CASE("predict: majority vote, fallback, ties") {
  RulePool pool;
  pool.criterion = Criterion::gini;
  pool.p = 2;
  pool.K = 2;
  // Rule A: x0 <= 1, counts (A:3, B:1). Rule B: x1 <= 1, counts (A:0, B:5).
  pool.rules.push_back(make_rule({{0, Interval{-kInf, 1.0}}}, {3, 1}));
  pool.rules.push_back(make_rule({{1, Interval{-kInf, 1.0}}}, {0, 5}));

  const auto both = predict(pool, std::vector<double>{0.5, 0.5}, false);
  CHECK(both.cls == 1);  // 3 vs 6
  CHECK(!both.was_missed);

  // Tie (A:3,B:3) -> class 0.
  RulePool tie;
  tie.criterion = Criterion::gini;
  tie.p = 1;
  tie.K = 2;
  tie.rules.push_back(make_rule({{0, Interval{-kInf, 1.0}}}, {3, 3}));
  CHECK(predict(tie, std::vector<double>{0.0}, false).cls == 0);

  // Fallback: no rule satisfied; highest fraction of satisfied clauses wins.
  RulePool fb;
  fb.criterion = Criterion::gini;
  fb.p = 3;
  fb.K = 2;
  // 2/3 clauses satisfied at x = (0,0,9): x0<=1 yes, x1<=1 yes, x2<=1 no.
  fb.rules.push_back(make_rule(
      {{0, Interval{-kInf, 1.0}}, {1, Interval{-kInf, 1.0}}, {2, Interval{-kInf, 1.0}}}, {0, 7}));
  // 1/3: x0>5 no, x1<=1 yes, x2<=1 no.
  fb.rules.push_back(make_rule(
      {{0, Interval{5.0, kInf}}, {1, Interval{-kInf, 1.0}}, {2, Interval{-kInf, 1.0}}}, {9, 0}));
  const auto missed = predict(fb, std::vector<double>{0.0, 0.0, 9.0}, true);
  CHECK(missed.was_missed);
  CHECK(missed.cls == 1);  // the 2/3 rule votes alone
  CHECK_THROWS(predict(fb, std::vector<double>{0.0, 0.0, 9.0}, false));
}

TEST_CASE("dedup: collapses identical regions, keeps distinct thresholds") {
  const Dataset d = make_dataset({1.0, 3.0}, {0, 1}, 1, 2);
  TreeParams params;
  params.max_depth = 1;
  const std::vector<double> w{1.0, 1.0};
  const TreeNode tree = fit_tree(d, w, params);

  // Two identical depth-1 trees from different provenance collapse.
  auto r1 = extract_rules(tree, d, Criterion::gini, 0);
  auto r2 = extract_rules(tree, d, Criterion::gini, 1);
  std::vector<Rule> all = r1;
  all.insert(all.end(), r2.begin(), r2.end());
  const RulePool pool = dedup(all, Criterion::gini, d.p, d.K);
  CHECK(pool.rules.size() == 2);
  CHECK(pool.rules[0].provenance_tree == 0);  // first provenance kept

  // Clause order does not matter: canonical intervals are sorted.
  Rule a = make_rule({{0, Interval{-kInf, 2.0}}, {1, Interval{1.0, kInf}}}, {1, 0});
  Rule b = make_rule({{1, Interval{1.0, kInf}}, {0, Interval{-kInf, 2.0}}}, {1, 0});
  std::sort(b.intervals.begin(), b.intervals.end(),
            [](const FeatureInterval& x, const FeatureInterval& y) { return x.feature < y.feature; });
  const RulePool two = dedup({a, b}, Criterion::gini, 2, 2);
  CHECK(two.rules.size() == 1);

  // Nearly-equal thresholds stay distinct (exact equality only).
  Rule c = make_rule({{0, Interval{-kInf, 2.0}}}, {1, 0});
  Rule e = make_rule({{0, Interval{-kInf, 2.0000001}}}, {1, 0});
  CHECK(dedup({c, e}, Criterion::gini, 1, 2).rules.size() == 2);

  // Idempotence.
  const RulePool once = dedup(all, Criterion::gini, d.p, d.K);
  const RulePool twice = dedup(once.rules, Criterion::gini, d.p, d.K);
  CHECK(once.rules.size() == twice.rules.size());
}

TEST_CASE("format_rule: fixed 6-decimal format") {
  Rule r = make_rule({{1, Interval{-1.4, kInf}}, {3, Interval{-kInf, 0.52}}}, {12, 3});
  r.impurity = 0.32;
  CHECK(format_rule(r) ==
        "IF x1 > -1.400000 AND x3 <= 0.520000 THEN class=0 counts=[12,3] impurity=0.320000");

  Rule root = make_rule({}, {5, 0});
  root.impurity = 0.0;
  CHECK(format_rule(root) == "IF TRUE THEN class=0 counts=[5,0] impurity=0.000000");

  Rule both = make_rule({{2, Interval{0.1, 3.5}}}, {0, 4});
  both.impurity = 0.0;
  CHECK(format_rule(both) ==
        "IF x2 > 0.100000 AND x2 <= 3.500000 THEN class=1 counts=[0,4] impurity=0.000000");
}

TEST_CASE("pool JSON round-trip preserves rules exactly") {
  Rng rng(41);
  const Dataset d = testsup::random_dataset(rng, 30, 2, 2);
  const std::vector<double> w(d.m, 1.0);
  TreeParams params;
  params.max_depth = 3;
  const RulePool pool = pool_from_tree(fit_tree(d, w, params), d);

  const RulePool back = pool_from_json(pool_to_json(pool));
  REQUIRE(back.rules.size() == pool.rules.size());
  CHECK(back.p == pool.p);
  CHECK(back.K == pool.K);
  for (std::size_t i = 0; i < pool.rules.size(); ++i) {
    CHECK(back.rules[i].covered_ids == pool.rules[i].covered_ids);
    CHECK(back.rules[i].class_counts == pool.rules[i].class_counts);
    CHECK(back.rules[i].impurity == pool.rules[i].impurity);
    REQUIRE(back.rules[i].intervals.size() == pool.rules[i].intervals.size());
    for (std::size_t v = 0; v < pool.rules[i].intervals.size(); ++v) {
      CHECK(back.rules[i].intervals[v].feature == pool.rules[i].intervals[v].feature);
      CHECK(back.rules[i].intervals[v].interval.lower == pool.rules[i].intervals[v].interval.lower);
      CHECK(back.rules[i].intervals[v].interval.upper == pool.rules[i].intervals[v].interval.upper);
    }
  }
}
