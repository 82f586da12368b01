#include "doctest.h"
#include "ruleforge/forest.hpp"
#include "test_support.hpp"

using namespace ruleforge;

TEST_CASE("fit_forest: degenerate single tree equals a plain fit") {
  Rng rng(3);
  const Dataset d = testsup::random_dataset(rng, 40, 3, 2);
  ForestParams fp;
  fp.n_trees = 1;
  fp.bootstrap = false;
  fp.sqrt_features = false;
  fp.tree_params.max_depth = 3;
  fp.seed = 5;
  const Forest forest = fit_forest(d, fp);

  const std::vector<double> ones(d.m, 1.0);
  TreeParams plain = fp.tree_params;
  plain.feature_subsample = 0;
  plain.seed = 123;  // irrelevant without feature subsampling
  const TreeNode tree = fit_tree(d, ones, plain);
  CHECK(same_structure(forest.trees.front(), tree));
}

TEST_CASE("fit_forest: deterministic for a fixed seed") {
  Rng rng(8);
  const Dataset d = testsup::random_dataset(rng, 50, 4, 2);
  ForestParams fp;
  fp.n_trees = 10;
  fp.tree_params.max_depth = 4;
  fp.seed = 77;
  const Forest a = fit_forest(d, fp);
  const Forest b = fit_forest(d, fp);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(same_structure(a.trees[t], b.trees[t]));
  CHECK(a.tree_seeds == b.tree_seeds);
}

TEST_CASE("forest_predict: vote aggregation and ties") {
  // Two stumps with hand-set leaves: counts (A:3,B:1) and (A:0,B:5) -> B.
  auto make_stump = [](double a_left, double b_left, double a_right, double b_right) {
    TreeNode root;
    root.feature_index = 0;
    root.threshold = 0.5;
    root.left = std::make_unique<TreeNode>();
    root.left->weighted_totals = {a_left, b_left};
    root.right = std::make_unique<TreeNode>();
    root.right->weighted_totals = {a_right, b_right};
    return root;
  };
  Forest forest;
  forest.params.per_tree_vote = false;
  forest.trees.push_back(make_stump(3, 1, 0, 0));
  forest.trees.push_back(make_stump(0, 5, 0, 0));
  const std::vector<double> x{0.0};
  CHECK(forest_predict(forest, x) == 1);  // 3 < 6

  // Exact tie -> class index 0.
  Forest tied;
  tied.trees.push_back(make_stump(2, 2, 0, 0));
  CHECK(forest_predict(tied, x) == 0);

  // One-tree forest equals the tree's leaf majority.
  Forest single;
  single.trees.push_back(make_stump(1, 4, 0, 0));
  CHECK(forest_predict(single, x) == tree_predict(single.trees.front(), x));

  // Per-tree voting counts trees, not samples.
  Forest per_tree;
  per_tree.params.per_tree_vote = true;
  per_tree.trees.push_back(make_stump(3, 1, 0, 0));
  per_tree.trees.push_back(make_stump(0, 5, 0, 0));
  per_tree.trees.push_back(make_stump(9, 1, 0, 0));
  CHECK(forest_predict(per_tree, x) == 0);  // 2 tree votes to 1
}

TEST_CASE("fit_forest: bootstrap weights only reference training samples") {
  Rng rng(13);
  const Dataset d = testsup::random_dataset(rng, 30, 2, 2);
  ForestParams fp;
  fp.n_trees = 5;
  fp.tree_params.max_depth = 2;
  fp.seed = 9;
  const Forest forest = fit_forest(d, fp);
  for (const TreeNode& tree : forest.trees) {
    std::vector<const TreeNode*> stack{&tree};
    while (!stack.empty()) {
      const TreeNode* node = stack.back();
      stack.pop_back();
      if (node->is_leaf()) {
        CHECK(!node->sample_ids.empty());
        for (int id : node->sample_ids) CHECK((id >= 0 && id < static_cast<int>(d.m)));
      } else {
        stack.push_back(node->left.get());
        stack.push_back(node->right.get());
      }
    }
  }
}
