#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ruleforge/dataset.hpp"

namespace ruleforge {

enum class Criterion { gini, entropy };

const char* to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

struct TreeParams {
  int max_depth = 5;
  int min_samples_split = 2;
  Criterion criterion = Criterion::gini;
  int feature_subsample = 0;  // candidate features per split; 0 = all
  std::uint64_t seed = 0;
};

// Internal node when feature_index >= 0 (x goes left iff
// x[feature_index] <= threshold), leaf otherwise.
struct TreeNode {
  int feature_index = -1;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  // Leaf payload, filled at fit time.
  std::vector<double> weighted_totals;  // per-class sums of sample weights
  std::vector<int> raw_counts;          // per-class sample counts
  std::vector<int> sample_ids;          // samples routed here during fitting

  bool is_leaf() const { return feature_index < 0; }
};

// Impurity of a class-weight vector: Gini in [0, 1 - 1/K], or Shannon entropy
// normalized by ln(K) so both criteria live in [0, 1]. Throws on negative or
// all-zero totals.
double weighted_impurity(std::span<const double> class_totals, Criterion criterion);

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;  // weighted impurity decrease, > 0
};

// Best axis-aligned split of the given node samples over the candidate
// features, or nullopt when no split reduces weighted impurity. Thresholds
// are midpoints of adjacent distinct values; ties broken by (larger decrease,
// lower feature index, smaller threshold).
std::optional<SplitChoice> find_best_split(const Dataset& data,
                                           std::span<const int> ids,
                                           std::span<const double> weights,
                                           std::span<const int> features,
                                           Criterion criterion);

// CART-style recursive fit under per-sample weights (weights.size() == m,
// all >= 0, at least one positive; zero-weight samples are excluded). Growth
// stops at max_depth, node purity, fewer than min_samples_split samples, or
// when no split reduces weighted impurity.
TreeNode fit_tree(const Dataset& data, std::span<const double> sample_weights,
                  const TreeParams& params);

const TreeNode& route_to_leaf(const TreeNode& root, std::span<const double> x);

// Majority class of the routed leaf by weighted totals; ties -> lowest index.
int tree_predict(const TreeNode& root, std::span<const double> x);

int leaf_count(const TreeNode& root);
int tree_depth(const TreeNode& root);

// Structural equality: same split features/thresholds and same leaf
// positions; leaf statistics are ignored.
bool same_structure(const TreeNode& a, const TreeNode& b);

}  // namespace ruleforge
