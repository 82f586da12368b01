#pragma once

#include <cstdint>
#include <vector>

#include "ruleforge/tree.hpp"

namespace ruleforge {

struct ForestParams {
  int n_trees = 100;
  TreeParams tree_params;
  std::uint64_t seed = 0;
  bool bootstrap = true;       // size-m bootstrap with replacement
  bool sqrt_features = true;   // ceil(sqrt(p)) candidate features per split
  bool per_tree_vote = false;  // one-tree-one-vote instead of count-weighted
};

struct Forest {
  std::vector<TreeNode> trees;
  ForestParams params;
  std::vector<std::uint64_t> tree_seeds;
};

// Deterministic per (dataset, params); tree t's randomness depends only on
// (params.seed, t).
Forest fit_forest(const Dataset& data, const ForestParams& params);

// Default: per-tree leaf class counts summed over all trees, argmax class;
// per_tree_vote sums one majority vote per tree instead. Ties -> lowest
// class index.
int forest_predict(const Forest& forest, std::span<const double> x);

}  // namespace ruleforge
